//! Brute-force path oracle for the period densities.
//!
//! Paths of Brownian motion with drift are simulated on a fine grid and the
//! fraction landing in a box of (low, high, close) space is compared with the
//! integral of the closed-form density over the same box. Grid extremes can
//! be refined with the exact law of a Brownian bridge maximum between grid
//! points, which removes the discretisation bias of the extremes. All
//! coordinates are offsets from the open.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::likelihood::{
    log_density_chlo, log_density_close_max, log_density_close_min, log_density_range,
    log_density_range_close, PeriodParams,
};
use crate::quadrature::GaussLegendre;
use crate::rng::{Purpose, RngStreams};
use crate::series::SeriesControl;

/// Half-open interval `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    #[inline]
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v < self.hi
    }
}

/// A box in the coordinates of one of the densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Chlo { low: Interval, high: Interval, close: Interval },
    CloseMax { close: Interval, high: Interval },
    CloseMin { close: Interval, low: Interval },
    RangeClose { range: Interval, close: Interval },
    Range { range: Interval },
}

impl Region {
    pub fn kind(&self) -> &'static str {
        match self {
            Region::Chlo { .. } => "chlo",
            Region::CloseMax { .. } => "close_max",
            Region::CloseMin { .. } => "close_min",
            Region::RangeClose { .. } => "range_close",
            Region::Range { .. } => "range",
        }
    }

    #[inline]
    pub fn contains(&self, low: f64, high: f64, close: f64) -> bool {
        match self {
            Region::Chlo { low: l, high: h, close: c } => {
                l.contains(low) && h.contains(high) && c.contains(close)
            }
            Region::CloseMax { close: c, high: h } => c.contains(close) && h.contains(high),
            Region::CloseMin { close: c, low: l } => c.contains(close) && l.contains(low),
            Region::RangeClose { range, close: c } => range.contains(high - low) && c.contains(close),
            Region::Range { range } => range.contains(high - low),
        }
    }

    /// The box's intervals in the order they appear in the variant.
    pub fn intervals(&self) -> Vec<(&'static str, Interval)> {
        match *self {
            Region::Chlo { low, high, close } => vec![("low", low), ("high", high), ("close", close)],
            Region::CloseMax { close, high } => vec![("close", close), ("high", high)],
            Region::CloseMin { close, low } => vec![("close", close), ("low", low)],
            Region::RangeClose { range, close } => vec![("range", range), ("close", close)],
            Region::Range { range } => vec![("range", range)],
        }
    }
}

/// (low, high, close) of one simulated period starting at zero.
///
/// With `bridge`, every grid step whose endpoints come within six local
/// standard deviations of the grid maximum (minimum) gets an exact draw of the
/// bridge maximum (minimum) over that step; other steps cannot reach the
/// extreme except with probability below `e^-72`.
pub fn simulate_extremes<R: Rng + ?Sized>(
    p: &PeriodParams,
    grid_nodes: usize,
    bridge: bool,
    rng: &mut R,
    buf: &mut Vec<f64>,
) -> (f64, f64, f64) {
    let k = grid_nodes.max(1);
    let h = 1.0 / k as f64;
    let drift = p.mu * h;
    let scale = p.sigma * h.sqrt();
    buf.clear();
    buf.push(0.0);
    let (mut y, mut lo, mut hi) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..k {
        let z: f64 = StandardNormal.sample(rng);
        y += drift + scale * z;
        lo = lo.min(y);
        hi = hi.max(y);
        buf.push(y);
    }
    if bridge {
        let band = 6.0 * scale;
        let var2 = 2.0 * scale * scale;
        let (glo, ghi) = (lo, hi);
        for w in buf.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a.max(b) >= ghi - band {
                let u = 1.0 - rng.random::<f64>();
                let m = 0.5 * (a + b + ((b - a) * (b - a) - var2 * u.ln()).sqrt());
                hi = hi.max(m);
            }
            if a.min(b) <= glo + band {
                let u = 1.0 - rng.random::<f64>();
                let m = 0.5 * (a + b - ((b - a) * (b - a) - var2 * u.ln()).sqrt());
                lo = lo.min(m);
            }
        }
    }
    (lo, hi, y)
}

/// Monte Carlo probabilities of several regions from one set of paths, each
/// with its binomial standard error.
pub fn mc_box_probabilities(
    p: &PeriodParams,
    regions: &[Region],
    n_paths: usize,
    grid_nodes: usize,
    bridge: bool,
    streams: &RngStreams,
) -> Result<Vec<(f64, f64)>> {
    p.validate()?;
    if n_paths == 0 {
        return Err(Error::InvalidParameter("need at least one path".into()));
    }
    const CHUNK: usize = 4096;
    let n_chunks = n_paths.div_ceil(CHUNK);
    let counts = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut counts = vec![0u64; regions.len()];
            let mut buf = Vec::with_capacity(grid_nodes + 1);
            for i in c * CHUNK..((c + 1) * CHUNK).min(n_paths) {
                let mut rng = streams.stream(Purpose::Oracle, 0, i as u64);
                let (lo, hi, close) = simulate_extremes(p, grid_nodes, bridge, &mut rng, &mut buf);
                for (n, r) in counts.iter_mut().zip(regions) {
                    *n += u64::from(r.contains(lo, hi, close));
                }
            }
            counts
        })
        .reduce(
            || vec![0u64; regions.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let n = n_paths as f64;
    Ok(counts
        .into_iter()
        .map(|c| {
            let q = c as f64 / n;
            (q, (q * (1.0 - q) / n).sqrt())
        })
        .collect())
}

/// Single-region form of [`mc_box_probabilities`].
pub fn mc_density_oracle(
    p: &PeriodParams,
    region: &Region,
    n_paths: usize,
    grid_nodes: usize,
    streams: &RngStreams,
) -> Result<(f64, f64)> {
    Ok(mc_box_probabilities(p, std::slice::from_ref(region), n_paths, grid_nodes, true, streams)?[0])
}

/// Integral of the matching closed-form density over `region`.
pub fn quadrature_probability(
    region: &Region,
    p: &PeriodParams,
    ctl: &SeriesControl,
    gl: &GaussLegendre,
    panels: usize,
) -> f64 {
    let dens = |r: Result<f64>| r.map(f64::exp).unwrap_or(0.0);
    let series = |r: Result<crate::likelihood::DensityEval>| {
        r.map(|e| e.log_density.exp()).unwrap_or(0.0)
    };
    match *region {
        Region::Chlo { low, high, close } => gl.integrate_with_breaks(
            |x| {
                gl.integrate_with_breaks(
                    |l| {
                        gl.integrate_with_breaks(
                            |h| series(log_density_chlo(0.0, x, l, h, p, ctl)),
                            high.lo,
                            high.hi,
                            &[x.max(0.0)],
                            panels,
                        )
                    },
                    low.lo,
                    low.hi,
                    &[x.min(0.0)],
                    panels,
                )
            },
            close.lo,
            close.hi,
            &[0.0],
            panels,
        ),
        Region::CloseMax { close, high } => gl.integrate_with_breaks(
            |x| {
                gl.integrate_with_breaks(
                    |h| dens(log_density_close_max(0.0, x, h, p)),
                    high.lo,
                    high.hi,
                    &[x.max(0.0)],
                    panels,
                )
            },
            close.lo,
            close.hi,
            &[0.0],
            panels,
        ),
        Region::CloseMin { close, low } => gl.integrate_with_breaks(
            |x| {
                gl.integrate_with_breaks(
                    |l| dens(log_density_close_min(0.0, x, l, p)),
                    low.lo,
                    low.hi,
                    &[x.min(0.0)],
                    panels,
                )
            },
            close.lo,
            close.hi,
            &[0.0],
            panels,
        ),
        Region::RangeClose { range, close } => gl.integrate_with_breaks(
            |x| {
                gl.integrate_with_breaks(
                    |r| series(log_density_range_close(r, 0.0, x, p, ctl)),
                    range.lo,
                    range.hi,
                    &[x.abs()],
                    panels,
                )
            },
            close.lo,
            close.hi,
            &[0.0],
            panels,
        ),
        Region::Range { range } => gl.integrate(
            |r| series(log_density_range(r, p.sigma, ctl)),
            range.lo.max(0.0),
            range.hi,
            panels,
        ),
    }
}

/// `per_kind` boxes of each kind, all inside the support, sized in units of
/// `sigma` and spread over the bulk of the distribution.
pub fn oracle_boxes<R: Rng + ?Sized>(p: &PeriodParams, per_kind: usize, rng: &mut R) -> Vec<Region> {
    let s = p.sigma;
    let mut out = Vec::with_capacity(5 * per_kind);
    let close_iv = |rng: &mut R| {
        let c = p.mu + s * rng.random_range(-1.5..1.5);
        Interval::new(c - 0.25 * s, c + 0.25 * s)
    };
    for _ in 0..per_kind {
        let close = close_iv(rng);
        let top = close.lo.min(0.0) - s * rng.random_range(0.0..0.8);
        let bottom = close.hi.max(0.0) + s * rng.random_range(0.0..0.8);
        out.push(Region::Chlo {
            low: Interval::new(top - 0.4 * s, top),
            high: Interval::new(bottom, bottom + 0.4 * s),
            close,
        });
    }
    for _ in 0..per_kind {
        let close = close_iv(rng);
        let bottom = close.hi.max(0.0) + s * rng.random_range(0.0..0.8);
        out.push(Region::CloseMax {
            close,
            high: Interval::new(bottom, bottom + 0.4 * s),
        });
    }
    for _ in 0..per_kind {
        let close = close_iv(rng);
        let top = close.lo.min(0.0) - s * rng.random_range(0.0..0.8);
        out.push(Region::CloseMin {
            close,
            low: Interval::new(top - 0.4 * s, top),
        });
    }
    for _ in 0..per_kind {
        let close = close_iv(rng);
        let r0 = close.lo.abs().max(close.hi.abs()) + s * rng.random_range(0.0..1.0);
        out.push(Region::RangeClose {
            range: Interval::new(r0, r0 + 0.4 * s),
            close,
        });
    }
    for _ in 0..per_kind {
        let r0 = s * rng.random_range(0.3..3.0);
        out.push(Region::Range {
            range: Interval::new(r0, r0 + 0.3 * s),
        });
    }
    out
}

/// One oracle comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRow {
    pub region: Region,
    pub mc_probability: f64,
    pub mc_se: f64,
    pub quadrature: f64,
}

impl OracleRow {
    /// Discrepancy in standard errors.
    pub fn z_score(&self) -> f64 {
        (self.mc_probability - self.quadrature) / self.mc_se
    }
}

/// Simulates once and compares every region with its quadrature probability.
pub fn oracle_report(
    p: &PeriodParams,
    regions: &[Region],
    n_paths: usize,
    grid_nodes: usize,
    ctl: &SeriesControl,
    streams: &RngStreams,
) -> Result<Vec<OracleRow>> {
    let mc = mc_box_probabilities(p, regions, n_paths, grid_nodes, true, streams)?;
    let gl = GaussLegendre::new(16);
    Ok(regions
        .par_iter()
        .zip(mc)
        .map(|(r, (q, se))| OracleRow {
            region: *r,
            mc_probability: q,
            mc_se: se,
            quadrature: quadrature_probability(r, p, ctl, &gl, 1),
        })
        .collect())
}

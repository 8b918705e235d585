//! Per-period densities of Brownian motion with drift over a unit interval.
//!
//! All densities are conditional on the opening log-price and on a constant
//! drift `mu` and volatility `sigma` within the period. The full joint law of
//! (low, high, close) is an image sum; the range/close and range-only laws are
//! its analytic marginals, and the single-extreme laws are closed forms. When
//! the range is small against the volatility the image sums cancel badly, and
//! their Poisson-dual forms (the eigenfunction expansions of Brownian motion
//! killed at both ends of the range) are used instead.
//!
//! Every function returns a natural-log density. Values outside the support
//! (boundaries included) come back as `-inf`; non-finite inputs are errors.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::series::{truncated_signed_series, SeriesControl, Term};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Standardised range below which the three image sums are replaced by their
/// Poisson-dual (eigenfunction) forms. At `sqrt(pi/2)` both decay as `e^(-pi n^2)`.
pub const DUAL_CROSSOVER: f64 = 1.253_314_137_315_500_3;

/// Drift and volatility of the log-price within one unit period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodParams {
    pub mu: f64,
    pub sigma: f64,
}

impl PeriodParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        let p = Self { mu, sigma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(Error::InvalidInput(format!("drift must be finite, got {}", self.mu)));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidInput(format!(
                "volatility must be positive and finite, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    /// `mu*x/sigma^2 - mu^2/(2 sigma^2)`: the Girsanov factor for a net move `x`.
    #[inline]
    fn log_drift_factor(&self, x: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        self.mu * x / s2 - 0.5 * self.mu * self.mu / s2
    }
}

/// One period's log-prices. `open` is whatever price the period starts from
/// (the previous close, or the period's own open when they differ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChloObservation {
    pub open: f64,
    pub close: f64,
    pub low: Option<f64>,
    pub high: Option<f64>,
}

impl ChloObservation {
    pub fn new(open: f64, close: f64, low: Option<f64>, high: Option<f64>) -> Self {
        Self { open, close, low, high }
    }

    pub fn close_only(open: f64, close: f64) -> Self {
        Self::new(open, close, None, None)
    }

    pub fn full(open: f64, close: f64, low: f64, high: f64) -> Self {
        Self::new(open, close, Some(low), Some(high))
    }

    /// Errors if any present price is NaN or infinite.
    pub fn validate(&self) -> Result<()> {
        let vals = [Some(self.open), Some(self.close), self.low, self.high];
        if vals.iter().flatten().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("non-finite price in observation {self:?}")))
        }
    }

    /// Low usable for likelihood purposes: present and strictly below open and close.
    pub fn usable_low(&self) -> Option<f64> {
        self.low.filter(|&l| l < self.open.min(self.close))
    }

    /// High usable for likelihood purposes: present and strictly above open and close.
    pub fn usable_high(&self) -> Option<f64> {
        self.high.filter(|&h| h > self.open.max(self.close))
    }

    pub fn range(&self) -> Option<f64> {
        match (self.low, self.high) {
            (Some(l), Some(h)) => Some(h - l),
            _ => None,
        }
    }
}

/// A log-density from a truncated series, with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEval {
    pub log_density: f64,
    pub terms_used: u32,
    pub converged: bool,
    /// The truncated sum came out zero or negative inside the support
    /// (cancellation); `log_density` is then `-inf`.
    pub nonpositive: bool,
}

impl DensityEval {
    fn outside_support() -> Self {
        Self {
            log_density: f64::NEG_INFINITY,
            terms_used: 0,
            converged: true,
            nonpositive: false,
        }
    }
}

fn check_finite(vals: &[f64]) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("non-finite input {vals:?}")))
    }
}

/// Gaussian log-density of the close given the open: `N(open + mu, sigma^2)`.
pub fn log_density_close(open: f64, close: f64, p: &PeriodParams) -> Result<f64> {
    check_finite(&[open, close])?;
    p.validate()?;
    let z = (close - open - p.mu) / p.sigma;
    Ok(-HALF_LN_2PI - p.sigma.ln() - 0.5 * z * z)
}

/// Joint log-density of (low, high, close) given the open.
pub fn log_density_chlo(
    open: f64,
    close: f64,
    low: f64,
    high: f64,
    p: &PeriodParams,
    ctl: &SeriesControl,
) -> Result<DensityEval> {
    check_finite(&[open, close, low, high])?;
    p.validate()?;
    if !(low < open.min(close) && high > open.max(close)) {
        return Ok(DensityEval::outside_support());
    }
    let s = p.sigma;
    let x = (close - open) / s;
    let a = (low - open) / s;
    let r = (high - low) / s;
    let drift = p.log_drift_factor(close - open);
    if r < DUAL_CROSSOVER {
        let range = high - low;
        let u = (close - open) / range;
        let v = (2.0 * (low - open) - (close - open)) / range;
        let sum = truncated_signed_series(|k| [chlo_dual_term(f64::from(k + 1), u, v, r)], ctl);
        return Ok(finish(drift - 3.0 * s.ln(), sum));
    }
    let sum = truncated_signed_series(
        |k| {
            let n = f64::from(k + 1);
            let [t1p, t2p] = chlo_terms(n, x, a, r);
            let [t1m, t2m] = chlo_terms(-n, x, a, r);
            [t1p, t2p, t1m, t2m]
        },
        ctl,
    );
    Ok(finish(drift - HALF_LN_2PI - 3.0 * s.ln(), sum))
}

#[inline]
fn chlo_terms(n: f64, x: f64, a: f64, r: f64) -> [Term; 2] {
    let u = x - 2.0 * n * r;
    let v = x - 2.0 * a - 2.0 * n * r;
    [
        Term::new(4.0 * n * n * (u * u - 1.0), 0.5 * u * u),
        Term::new(-4.0 * n * (n - 1.0) * (v * v - 1.0), 0.5 * v * v),
    ]
}

/// k-th eigenmode of the joint density with `t = k pi / r`. The positions
/// enter as fractions of the range, `u = x / r` and `v = (2a - x) / r`, and
/// the leading power `t^4 / r^3` is carried in the exponent so that tiny
/// ranges neither overflow nor lose the phase.
#[inline]
fn chlo_dual_term(k: f64, u: f64, v: f64, r: f64) -> Term {
    let kp = k * PI;
    let t2 = (kp / r).powi(2);
    let (i1, i2) = (1.0 / t2, 1.0 / (t2 * t2));
    let (th1, th2) = (kp * u, kp * v);
    let (s1, c1) = th1.sin_cos();
    let (s2, c2) = th2.sin_cos();
    let coef = (1.0 - 5.0 * i1 + (2.0 - th1 * th1) * i2) * c1
        + 2.0 * th1 * (i1 - 2.0 * i2) * s1
        + (-1.0 + 5.0 * i1 + (th2 * th2 + 2.0 * kp * th2 - 2.0) * i2) * c2
        - 2.0 * (kp + th2) * (i1 - 2.0 * i2) * s2;
    Term::new(coef, 0.5 * t2 - 4.0 * kp.ln() + 7.0 * r.ln())
}

/// Joint log-density of (range, close) given the open, with `range = high - low`.
///
/// Obtained by integrating the joint (low, high, close) density along the
/// low-price coordinate at fixed range.
pub fn log_density_range_close(
    range: f64,
    open: f64,
    close: f64,
    p: &PeriodParams,
    ctl: &SeriesControl,
) -> Result<DensityEval> {
    check_finite(&[range, open, close])?;
    p.validate()?;
    let net = close - open;
    if !(range > net.abs()) {
        return Ok(DensityEval::outside_support());
    }
    let s = p.sigma;
    let x = net.abs() / s;
    let r = range / s;
    let drift = p.log_drift_factor(net);
    if r < DUAL_CROSSOVER {
        let u = net.abs() / range;
        let sum = truncated_signed_series(|k| [range_close_dual_term(f64::from(k + 1), u, r)], ctl);
        return Ok(finish(drift - 2.0 * s.ln(), sum));
    }
    let sum = truncated_signed_series(
        |k| {
            let n = f64::from(k + 1);
            let [a, b, c] = range_close_terms(n, x, r);
            let [d, e, f] = range_close_terms(-n, x, r);
            [a, b, c, d, e, f]
        },
        ctl,
    );
    Ok(finish(drift - HALF_LN_2PI - 2.0 * s.ln(), sum))
}

#[inline]
fn range_close_terms(n: f64, x: f64, r: f64) -> [Term; 3] {
    let u = 2.0 * n * r - x;
    let v = x + 2.0 * (n - 1.0) * r;
    let nn1 = 2.0 * n * (n - 1.0);
    [
        Term::new((r - x) * 4.0 * n * n * (u * u - 1.0), 0.5 * u * u),
        Term::new(nn1 * u, 0.5 * u * u),
        Term::new(-nn1 * v, 0.5 * v * v),
    ]
}

/// k-th eigenmode of the (range, close) density, `u = |x| / r`, leading
/// power `t^3 / r^3` in the exponent.
#[inline]
fn range_close_dual_term(k: f64, u: f64, r: f64) -> Term {
    let kp = k * PI;
    let t2 = (kp / r).powi(2);
    let i1 = 1.0 / t2;
    let th = kp * u;
    let (s, c) = th.sin_cos();
    let coef = (kp - th) * (1.0 - th * th * i1 * i1 - 3.0 * i1) * c
        + (2.0 * kp * th * (1.0 - i1) * i1 - 2.0 * th * th * i1 + 1.0 + 3.0 * th * th * i1 * i1 - 3.0 * i1) * s;
    Term::new(coef, 0.5 * t2 - 3.0 * kp.ln() + 6.0 * r.ln())
}

/// Log-density of the range alone. The range carries no information on the
/// drift, so none is taken.
pub fn log_density_range(range: f64, sigma: f64, ctl: &SeriesControl) -> Result<DensityEval> {
    check_finite(&[range])?;
    PeriodParams::new(0.0, sigma)?;
    if !(range > 0.0) {
        return Ok(DensityEval::outside_support());
    }
    let r = range / sigma;
    if r < DUAL_CROSSOVER {
        let sum = truncated_signed_series(
            |k| {
                let om = f64::from(2 * k + 1) * PI;
                let q = (r / om).powi(2);
                [Term::new(8.0 * (1.0 - q), 0.5 / q - 2.0 * om.ln() + 5.0 * r.ln())]
            },
            ctl,
        );
        return Ok(finish(-sigma.ln(), sum));
    }
    let sum = truncated_signed_series(
        |k| {
            let n = f64::from(k + 1);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            [Term::new(8.0 * sign * n * n, 0.5 * n * n * r * r)]
        },
        ctl,
    );
    Ok(finish(-HALF_LN_2PI - sigma.ln(), sum))
}

fn finish(head: f64, sum: crate::series::SeriesSum) -> DensityEval {
    match sum.ln() {
        Some(ln) => DensityEval {
            log_density: head + ln,
            terms_used: sum.terms_used,
            converged: sum.converged,
            nonpositive: false,
        },
        None => DensityEval {
            log_density: f64::NEG_INFINITY,
            terms_used: sum.terms_used,
            converged: sum.converged,
            nonpositive: true,
        },
    }
}

/// Joint log-density of (high, close) given the open, low unobserved.
pub fn log_density_close_max(open: f64, close: f64, high: f64, p: &PeriodParams) -> Result<f64> {
    check_finite(&[open, close, high])?;
    p.validate()?;
    if !(high > open.max(close)) {
        return Ok(f64::NEG_INFINITY);
    }
    let w = (2.0 * (high - open) - (close - open)) / p.sigma;
    Ok(single_extreme(w, close - open, p))
}

/// Joint log-density of (low, close) given the open, high unobserved.
pub fn log_density_close_min(open: f64, close: f64, low: f64, p: &PeriodParams) -> Result<f64> {
    check_finite(&[open, close, low])?;
    p.validate()?;
    if !(low < open.min(close)) {
        return Ok(f64::NEG_INFINITY);
    }
    let w = ((close - open) - 2.0 * (low - open)) / p.sigma;
    Ok(single_extreme(w, close - open, p))
}

#[inline]
fn single_extreme(w: f64, net: f64, p: &PeriodParams) -> f64 {
    LN_2 + w.ln() - HALF_LN_2PI - 2.0 * p.sigma.ln() - 0.5 * w * w + p.log_drift_factor(net)
}

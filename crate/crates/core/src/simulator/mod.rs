//! Synthetic bars from the stochastic volatility model.
//!
//! Each period draws a fresh log-volatility from the AR(1), then walks an
//! Euler path of Brownian motion with drift on a fine grid and reads off the
//! open, high, low and close. Periods are chained so that every open equals
//! the previous close.

mod oracle;
mod study;

pub use oracle::{
    mc_box_probabilities, mc_density_oracle, oracle_boxes, oracle_report, quadrature_probability,
    simulate_extremes, Interval, OracleRow, Region,
};
pub use study::{run_study, DatasetFit, Measure, ModelPair, RatioRow, StudyReport, TABLE1_PAIRS};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::likelihood::{ChloObservation, PeriodParams};
use crate::vol_process::{evolve_logvol, stationary_init, Theta};

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_periods: usize,
    pub grid_nodes: usize,
    pub theta: Theta,
    /// Initial asset price (level, not log).
    pub s0: f64,
    pub n_datasets: usize,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_periods: 156,
            grid_nodes: 1000,
            theta: Theta {
                mu: 0.000961,
                alpha: -3.75,
                phi: 0.9,
                tau2: 0.11 * 0.11,
            },
            s0: 100.0,
            n_datasets: 100,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_periods < 1 {
            return Err(Error::InvalidParameter("n_periods must be at least 1".into()));
        }
        if self.grid_nodes < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid_nodes must be at least 2, got {}",
                self.grid_nodes
            )));
        }
        if !(self.s0 > 0.0 && self.s0.is_finite()) {
            return Err(Error::InvalidParameter(format!("s0 must be positive, got {}", self.s0)));
        }
        self.theta.validate()
    }
}

/// One simulated series: log-price bars and the latent log-volatility path.
#[derive(Debug, Clone, PartialEq)]
pub struct SimDataset {
    pub bars: Vec<ChloObservation>,
    pub true_log_sigma: Vec<f64>,
}

impl SimDataset {
    pub fn true_sigma(&self) -> Vec<f64> {
        self.true_log_sigma.iter().map(|v| v.exp()).collect()
    }
}

/// Euler path `y_k = y_{k-1} + mu/K + sigma sqrt(1/K) z_k` over `K = grid_nodes`
/// steps. High and low are taken over the grid, open included.
pub fn simulate_period<R: Rng + ?Sized>(
    open: f64,
    p: &PeriodParams,
    grid_nodes: usize,
    rng: &mut R,
) -> ChloObservation {
    let k = grid_nodes.max(1) as f64;
    let drift = p.mu / k;
    let scale = p.sigma / k.sqrt();
    let (mut y, mut lo, mut hi) = (open, open, open);
    for _ in 0..grid_nodes {
        let z: f64 = StandardNormal.sample(rng);
        y += drift + scale * z;
        lo = lo.min(y);
        hi = hi.max(y);
    }
    ChloObservation::full(open, y, lo, hi)
}

/// A full dataset: stationary start, AR(1) volatility, chained bars from `ln s0`.
pub fn simulate_dataset<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Result<SimDataset> {
    cfg.validate()?;
    let theta = &cfg.theta;
    let mut log_sigma = stationary_init(theta, StandardNormal.sample(rng))?;
    let mut open = cfg.s0.ln();
    let mut bars = Vec::with_capacity(cfg.n_periods);
    let mut path = Vec::with_capacity(cfg.n_periods);
    for _ in 0..cfg.n_periods {
        log_sigma = evolve_logvol(log_sigma, theta, StandardNormal.sample(rng));
        let p = PeriodParams {
            mu: theta.mu,
            sigma: log_sigma.exp(),
        };
        let bar = simulate_period(open, &p, cfg.grid_nodes, rng);
        open = bar.close;
        bars.push(bar);
        path.push(log_sigma);
    }
    Ok(SimDataset {
        bars,
        true_log_sigma: path,
    })
}

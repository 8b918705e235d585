//! Sequential Monte Carlo fit of the stochastic volatility model.
//!
//! Parameters are learned jointly with the latent log-volatility using an
//! auxiliary particle filter whose static parameters move under a shrinkage
//! kernel (Liu and West). The particle cloud carries weights between periods;
//! resampling happens inside each step through the auxiliary indices.

mod cloud;
mod kernel;
mod observe;
mod step;
mod summary;

pub use cloud::{init_cloud, Particle, ParticleCloud};
pub use kernel::{kernel_factor, shrink_locations, shrinkage_constants, weighted_moments, COV_JITTER};
pub use observe::{BarEvidence, LikEval, ModelVariant};
pub use step::{filter_step, point_volatility, systematic_resample};
pub use summary::{
    ess, summarize, weighted_quantile, weighted_quantiles, FilterSnapshot, StepDiagnostics, Summary,
};

use crate::error::{Error, Result};
use crate::likelihood::ChloObservation;
use crate::rng::RngStreams;
use crate::series::SeriesControl;
use crate::vol_process::PriorHyper;

#[derive(Debug, Clone, PartialEq)]
pub struct FilterConfig {
    pub variant: ModelVariant,
    pub n_particles: usize,
    /// Liu-West discount factor, in (0.5, 1).
    pub discount: f64,
    pub hyper: PriorHyper,
    pub series: SeriesControl,
    pub seed: u64,
    /// Systematically resample after a step when the ESS drops below this
    /// fraction of the cloud size.
    pub resample_ess_fraction: Option<f64>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            variant: ModelVariant::Exsv,
            n_particles: 30_000,
            discount: 0.95,
            hyper: PriorHyper::default(),
            series: SeriesControl::default(),
            seed: 0,
            resample_ess_fraction: None,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_particles < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 particles, got {}",
                self.n_particles
            )));
        }
        shrinkage_constants(self.discount)?;
        self.hyper.validate()?;
        if let Some(f) = self.resample_ess_fraction {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "resample ESS fraction must lie in (0, 1], got {f}"
                )));
            }
        }
        Ok(())
    }
}

/// Filters `bars` in order, returning one snapshot per bar.
pub fn run_filter(bars: &[ChloObservation], config: &FilterConfig) -> Result<Vec<FilterSnapshot>> {
    run_filter_with(bars, config, &RngStreams::new(config.seed))
}

/// [`run_filter`] drawing from an explicit stream family.
pub fn run_filter_with(
    bars: &[ChloObservation],
    config: &FilterConfig,
    streams: &RngStreams,
) -> Result<Vec<FilterSnapshot>> {
    config.validate()?;
    for (i, b) in bars.iter().enumerate() {
        b.validate()
            .map_err(|e| Error::InvalidInput(format!("bar {}: {e}", i + 1)))?;
    }
    let mut cloud = init_cloud(&config.hyper, config.n_particles, config.variant, streams)?;
    let mut out = Vec::with_capacity(bars.len());
    for obs in bars {
        let (next, snap) = filter_step(&cloud, obs, config, streams)?;
        log::debug!(
            "period {}: ess {:.1}, sigma {:.5}",
            snap.time_index,
            snap.ess,
            snap.sigma.mean
        );
        cloud = next;
        out.push(snap);
    }
    Ok(out)
}

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::{Purpose, RngStreams};
use crate::vol_process::{sample_prior, stationary_init, Eta, PriorHyper};

use super::ModelVariant;

/// One hypothesis about the current log-volatility and the structural parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub log_sigma: f64,
    pub eta: Eta,
}

/// Weighted particle approximation of the filtering distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleCloud {
    particles: Vec<Particle>,
    weights: Vec<f64>,
    time_index: usize,
}

impl ParticleCloud {
    /// Builds a cloud; weights are renormalised to sum to one.
    pub fn new(particles: Vec<Particle>, weights: Vec<f64>, time_index: usize) -> Result<Self> {
        if particles.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "a cloud needs at least 2 particles, got {}",
                particles.len()
            )));
        }
        if particles.len() != weights.len() {
            return Err(Error::InvalidInput("particles and weights differ in length".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidInput("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidInput("weights sum to zero".into()));
        }
        if particles.iter().any(|p| !(p.log_sigma.is_finite() && p.eta.is_finite())) {
            return Err(Error::InvalidInput("non-finite particle".into()));
        }
        let dim = particles[0].eta.dim();
        if particles.iter().any(|p| p.eta.dim() != dim) {
            return Err(Error::InvalidInput("particles disagree on parameter dimension".into()));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(Self {
            particles,
            weights,
            time_index,
        })
    }

    pub fn uniform(particles: Vec<Particle>, time_index: usize) -> Result<Self> {
        let n = particles.len().max(1);
        Self::new(particles, vec![1.0 / n as f64; n], time_index)
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn time_index(&self) -> usize {
        self.time_index
    }

    pub fn dim(&self) -> usize {
        self.particles[0].eta.dim()
    }
}

/// Draws `n` particles from the prior with stationary log-volatility and
/// uniform weights. Range-only models get driftless parameter vectors.
pub fn init_cloud(
    hyper: &PriorHyper,
    n: usize,
    variant: ModelVariant,
    streams: &RngStreams,
) -> Result<ParticleCloud> {
    hyper.validate()?;
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 particles, got {n}")));
    }
    let particles = (0..n)
        .map(|j| {
            let mut rng = streams.stream(Purpose::Init, 0, j as u64);
            let theta = sample_prior(hyper, &mut rng)?;
            let z: f64 = StandardNormal.sample(&mut rng);
            let log_sigma = stationary_init(&theta, z)?;
            let (eta, _) = theta.to_eta();
            let eta = if variant.learns_drift() {
                eta
            } else {
                Eta::driftless(eta.alpha(), eta.logit_phi(), eta.log_tau2())
            };
            Ok(Particle { log_sigma, eta })
        })
        .collect::<Result<Vec<_>>>()?;
    ParticleCloud::uniform(particles, 0)
}

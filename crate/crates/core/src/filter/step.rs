//! One period of the Liu-West auxiliary particle filter.

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::likelihood::ChloObservation;
use crate::rng::{Purpose, RngStreams};
use crate::vol_process::expit;

use super::cloud::{Particle, ParticleCloud};
use super::kernel::{kernel_factor, shrink_locations, shrinkage_constants, weighted_moments};
use super::observe::{BarEvidence, LikEval};
use super::summary::{ess, summarize, FilterSnapshot, StepDiagnostics};
use super::FilterConfig;

/// Point estimate of next period's volatility: the AR(1) mean step in logs.
#[inline]
pub fn point_volatility(p: &Particle) -> f64 {
    let alpha = p.eta.alpha();
    (alpha + expit(p.eta.logit_phi()) * (p.log_sigma - alpha)).exp()
}

/// Advances `cloud` by one bar.
///
/// 1. point estimates `z_j` (volatility) and shrunk kernel locations `m_j`;
/// 2. auxiliary indices drawn with probability proportional to the carried
///    weight times the likelihood at `(m_j, z_j)`;
/// 3. new parameters from `N(m_parent, (1 - a^2) V)`;
/// 4. new log-volatility from the AR(1) under the new parameters, started at
///    the parent's log-volatility;
/// 5. weights = likelihood at the new particle over the parent's first-stage
///    likelihood.
pub fn filter_step(
    cloud: &ParticleCloud,
    obs: &ChloObservation,
    config: &FilterConfig,
    streams: &RngStreams,
) -> Result<(ParticleCloud, FilterSnapshot)> {
    obs.validate()?;
    let period = cloud.time_index() + 1;
    let n = cloud.len();
    let ctl = &config.series;
    let evidence = BarEvidence::classify(config.variant, obs);
    let (a, spread) = shrinkage_constants(config.discount)?;
    let ps = cloud.particles();
    let w = cloud.weights();
    let mut diag = StepDiagnostics::default();

    // Step 1.
    let (mean, cov) = weighted_moments(ps, w);
    let locs = shrink_locations(ps, &mean, a);
    let first: Vec<LikEval> = ps
        .par_iter()
        .zip(&locs)
        .map(|(p, m)| evidence.log_likelihood(m.mu(), point_volatility(p), ctl))
        .collect();
    tally(&mut diag, &first);

    // Step 2.
    let log_g: Vec<f64> = w.iter().zip(&first).map(|(w, l)| w.ln() + l.log_lik).collect();
    let probs = normalise_log(&log_g).ok_or(Error::FilterDegeneracy { period })?;
    let index = WeightedIndex::new(&probs).map_err(|_| Error::FilterDegeneracy { period })?;
    let mut sel_rng = streams.stream(Purpose::Select, period as u64, 0);
    let parents: Vec<usize> = (0..n).map(|_| sel_rng.sample(&index)).collect();

    // Steps 3 and 4, then the second-stage likelihood.
    let chol = kernel_factor(&cov, spread);
    let d = cloud.dim();
    let moved: Vec<(Particle, LikEval)> = parents
        .par_iter()
        .enumerate()
        .map(|(j, &parent)| {
            let mut rng = streams.stream(Purpose::Propagate, period as u64, j as u64);
            let mut z = [0.0_f64; 4];
            for zk in z.iter_mut().take(d) {
                *zk = StandardNormal.sample(&mut rng);
            }
            let mut eta = locs[parent];
            for (i, v) in eta.as_mut_slice().iter_mut().enumerate() {
                *v += (0..=i).map(|k| chol[(i, k)] * z[k]).sum::<f64>();
            }
            let e: f64 = StandardNormal.sample(&mut rng);
            let alpha = eta.alpha();
            let log_sigma = alpha
                + eta.phi() * (ps[parent].log_sigma - alpha)
                + (0.5 * eta.log_tau2()).exp() * e;
            if !(log_sigma.is_finite() && eta.is_finite()) {
                return (ps[parent], LikEval::zero());
            }
            let lik = evidence.log_likelihood(eta.mu(), log_sigma.exp(), ctl);
            (Particle { log_sigma, eta }, lik)
        })
        .collect();

    // Step 5.
    let mut log_w = Vec::with_capacity(n);
    let mut particles = Vec::with_capacity(n);
    for ((p, lik), &parent) in moved.iter().zip(&parents) {
        log_w.push(lik.log_lik - first[parent].log_lik);
        particles.push(*p);
        if lik.log_lik == f64::NEG_INFINITY {
            diag.neg_inf_loglik += 1;
        }
        diag.series_failures += usize::from(lik.series_failure);
        diag.nonpositive_sums += usize::from(lik.nonpositive);
    }
    let weights = normalise_log(&log_w).ok_or(Error::FilterDegeneracy { period })?;
    let mut next = ParticleCloud::new(particles, weights, period)?;

    if let Some(frac) = config.resample_ess_fraction {
        if ess(next.weights())? < frac * n as f64 {
            let mut rng = streams.stream(Purpose::Resample, period as u64, 0);
            next = systematic_resample(&next, &mut rng)?;
        }
    }
    let snap = summarize(&next, diag)?;
    Ok((next, snap))
}

fn tally(diag: &mut StepDiagnostics, evals: &[LikEval]) {
    for e in evals {
        diag.series_failures += usize::from(e.series_failure);
        diag.nonpositive_sums += usize::from(e.nonpositive);
    }
}

/// `exp(x - max x)`; `None` when every entry is `-inf`.
fn normalise_log(log_w: &[f64]) -> Option<Vec<f64>> {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return None;
    }
    Some(log_w.iter().map(|l| (l - max).exp()).collect())
}

/// Systematic resampling to a uniformly weighted cloud.
pub fn systematic_resample<R: Rng + ?Sized>(cloud: &ParticleCloud, rng: &mut R) -> Result<ParticleCloud> {
    let n = cloud.len();
    let u0: f64 = rng.random::<f64>() / n as f64;
    let mut out = Vec::with_capacity(n);
    let mut cum = 0.0;
    let mut i = 0;
    let w = cloud.weights();
    for k in 0..n {
        let u = u0 + k as f64 / n as f64;
        while i < n - 1 && cum + w[i] < u {
            cum += w[i];
            i += 1;
        }
        out.push(cloud.particles()[i]);
    }
    ParticleCloud::uniform(out, cloud.time_index())
}

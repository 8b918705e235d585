//! Shrinkage-kernel algebra for the static parameters.
//!
//! Locations are pulled toward the cloud mean by `a` and perturbed with
//! covariance `(1 - a^2) V`, which keeps the first two moments of the
//! parameter cloud unchanged.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::vol_process::Eta;

use super::cloud::Particle;

/// Diagonal jitter added to the parameter covariance before factorising.
pub const COV_JITTER: f64 = 1e-12;

/// `a = (3 eps - 1) / (2 eps)` and `1 - a^2` for a discount `eps` in (0.5, 1).
pub fn shrinkage_constants(discount: f64) -> Result<(f64, f64)> {
    if !(discount > 0.5 && discount < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "discount factor must lie in (0.5, 1), got {discount}"
        )));
    }
    let a = (3.0 * discount - 1.0) / (2.0 * discount);
    Ok((a, 1.0 - a * a))
}

/// Weighted mean and covariance of the parameter vectors.
pub fn weighted_moments(particles: &[Particle], weights: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let d = particles[0].eta.dim();
    let total: f64 = weights.iter().sum();
    let mut mean = vec![0.0; d];
    for (p, w) in particles.iter().zip(weights) {
        for (m, v) in mean.iter_mut().zip(p.eta.as_slice()) {
            *m += w * v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= total);
    let mut cov = DMatrix::zeros(d, d);
    let mut dev = vec![0.0; d];
    for (p, w) in particles.iter().zip(weights) {
        for ((dv, v), m) in dev.iter_mut().zip(p.eta.as_slice()).zip(&mean) {
            *dv = v - m;
        }
        for i in 0..d {
            for k in 0..=i {
                cov[(i, k)] += w * dev[i] * dev[k];
            }
        }
    }
    for i in 0..d {
        for k in 0..=i {
            let v = cov[(i, k)] / total;
            cov[(i, k)] = v;
            cov[(k, i)] = v;
        }
    }
    (mean, cov)
}

/// Kernel locations `a * eta_j + (1 - a) * mean`.
pub fn shrink_locations(particles: &[Particle], mean: &[f64], a: f64) -> Vec<Eta> {
    particles
        .iter()
        .map(|p| {
            let mut e = p.eta;
            for (v, m) in e.as_mut_slice().iter_mut().zip(mean) {
                *v = a * *v + (1.0 - a) * m;
            }
            e
        })
        .collect()
}

/// Lower Cholesky factor of `scale * (cov + jitter I)`. Falls back to the
/// diagonal when the covariance is numerically indefinite.
pub fn kernel_factor(cov: &DMatrix<f64>, scale: f64) -> DMatrix<f64> {
    let d = cov.nrows();
    let mut m = cov * scale;
    for i in 0..d {
        m[(i, i)] += scale * COV_JITTER;
    }
    match m.clone().cholesky() {
        Some(c) => c.l(),
        None => DMatrix::from_fn(d, d, |i, k| if i == k { m[(i, i)].max(0.0).sqrt() } else { 0.0 }),
    }
}

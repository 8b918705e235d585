//! AR(1) log-volatility dynamics, parameter priors and the unconstrained
//! parameterisation used for kernel perturbation.
//!
//! Conventions: `Beta(q, r)` has mean `q/(q+r)`; the inverse gamma `IG(u, v)`
//! is shape/scale, so `1/tau2 ~ Gamma(shape = u, rate = v)` and the mean of
//! `tau2` is `v/(u-1)`.

use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, Normal};

use crate::error::{Error, Result};

/// Bounds applied to `phi` before taking its logit.
pub const PHI_CLAMP: f64 = 1e-12;

/// Structural parameters in natural space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta {
    /// Drift per period.
    pub mu: f64,
    /// Long-run mean of log-volatility; `exp(alpha)` is the median volatility.
    pub alpha: f64,
    /// Autoregressive coefficient, `0 <= phi < 1`.
    pub phi: f64,
    /// Innovation variance of log-volatility.
    pub tau2: f64,
}

impl Theta {
    pub fn new(mu: f64, alpha: f64, phi: f64, tau2: f64) -> Result<Self> {
        let t = Self { mu, alpha, phi, tau2 };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite theta {self:?}")));
        }
        if !(0.0..1.0).contains(&self.phi) {
            return Err(Error::InvalidParameter(format!(
                "phi must satisfy 0 <= phi < 1, got {}",
                self.phi
            )));
        }
        if !(self.tau2 > 0.0 && self.tau2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tau2 must be positive, got {}",
                self.tau2
            )));
        }
        Ok(())
    }

    pub fn tau(&self) -> f64 {
        self.tau2.sqrt()
    }

    /// Variance of the stationary log-volatility distribution.
    pub fn stationary_variance(&self) -> f64 {
        self.tau2 / (1.0 - self.phi * self.phi)
    }

    /// Transform to the unconstrained parameterisation. The flag is set when
    /// `phi` had to be clamped away from 0 or 1 first.
    pub fn to_eta(&self) -> (Eta, bool) {
        let clamped = self.phi.clamp(PHI_CLAMP, 1.0 - PHI_CLAMP);
        let eta = Eta::with_drift(self.mu, self.alpha, logit(clamped), self.tau2.ln());
        (eta, clamped != self.phi)
    }
}

/// Structural parameters mapped to the real line:
/// `(mu, alpha, logit(phi), log(tau2))`, with the drift coordinate absent for
/// models that fix the drift at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eta {
    c: [f64; 4],
    has_drift: bool,
}

impl Eta {
    pub fn with_drift(mu: f64, alpha: f64, logit_phi: f64, log_tau2: f64) -> Self {
        Self {
            c: [mu, alpha, logit_phi, log_tau2],
            has_drift: true,
        }
    }

    pub fn driftless(alpha: f64, logit_phi: f64, log_tau2: f64) -> Self {
        Self {
            c: [0.0, alpha, logit_phi, log_tau2],
            has_drift: false,
        }
    }

    /// Builds from a coordinate slice of length 4 (with drift) or 3 (without).
    pub fn from_slice(v: &[f64]) -> Result<Self> {
        match *v {
            [mu, a, p, t] => Ok(Self::with_drift(mu, a, p, t)),
            [a, p, t] => Ok(Self::driftless(a, p, t)),
            _ => Err(Error::InvalidInput(format!(
                "eta needs 3 or 4 coordinates, got {}",
                v.len()
            ))),
        }
    }

    pub fn has_drift(&self) -> bool {
        self.has_drift
    }

    pub fn dim(&self) -> usize {
        if self.has_drift {
            4
        } else {
            3
        }
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        if self.has_drift {
            &self.c
        } else {
            &self.c[1..]
        }
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        if self.has_drift {
            &mut self.c
        } else {
            &mut self.c[1..]
        }
    }

    /// Drift; zero when the drift coordinate is absent.
    #[inline]
    pub fn mu(&self) -> f64 {
        self.c[0]
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.c[1]
    }

    #[inline]
    pub fn logit_phi(&self) -> f64 {
        self.c[2]
    }

    #[inline]
    pub fn log_tau2(&self) -> f64 {
        self.c[3]
    }

    #[inline]
    pub fn phi(&self) -> f64 {
        expit(self.c[2])
    }

    #[inline]
    pub fn tau2(&self) -> f64 {
        self.c[3].exp()
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    /// Back to natural space. `phi` may round to exactly 1.0 for very large
    /// logits, so this does not re-validate.
    pub fn to_theta(&self) -> Theta {
        Theta {
            mu: self.mu(),
            alpha: self.alpha(),
            phi: self.phi(),
            tau2: self.tau2(),
        }
    }
}

#[inline]
pub fn logit(p: f64) -> f64 {
    p.ln() - (-p).ln_1p()
}

#[inline]
pub fn expit(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Hyperparameters of the independent priors on `mu`, `alpha`, `phi`, `tau2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorHyper {
    /// Normal prior on the drift: mean and variance.
    pub mu_mean: f64,
    pub mu_var: f64,
    /// Normal prior on alpha: mean and variance.
    pub alpha_mean: f64,
    pub alpha_var: f64,
    /// Beta shapes for phi.
    pub phi_q: f64,
    pub phi_r: f64,
    /// Inverse-gamma shape and scale for tau2.
    pub tau2_shape: f64,
    pub tau2_scale: f64,
}

impl Default for PriorHyper {
    fn default() -> Self {
        Self {
            mu_mean: 0.0,
            mu_var: 0.0001,
            alpha_mean: -3.75,
            alpha_var: 0.025,
            phi_q: 9.0,
            phi_r: 1.0,
            tau2_shape: 6.0,
            tau2_scale: 0.06,
        }
    }
}

impl PriorHyper {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.mu_mean,
            self.mu_var,
            self.alpha_mean,
            self.alpha_var,
            self.phi_q,
            self.phi_r,
            self.tau2_shape,
            self.tau2_scale,
        ];
        if !all.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite prior {self:?}")));
        }
        let positive = [
            ("mu_var", self.mu_var),
            ("alpha_var", self.alpha_var),
            ("phi_q", self.phi_q),
            ("phi_r", self.phi_r),
            ("tau2_shape", self.tau2_shape),
            ("tau2_scale", self.tau2_scale),
        ];
        for (name, v) in positive {
            if v <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// `alpha + phi * (logsigma_prev - alpha) + tau * noise`.
#[inline]
pub fn evolve_logvol(logsigma_prev: f64, theta: &Theta, noise: f64) -> f64 {
    theta.alpha + theta.phi * (logsigma_prev - theta.alpha) + theta.tau() * noise
}

/// Draw from the stationary law `N(alpha, tau2 / (1 - phi^2))` given a
/// standard normal `noise`.
pub fn stationary_init(theta: &Theta, noise: f64) -> Result<f64> {
    if !(theta.phi < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "stationary law needs phi < 1, got {}",
            theta.phi
        )));
    }
    Ok(theta.alpha + theta.stationary_variance().sqrt() * noise)
}

/// One independent draw of each structural parameter from its prior.
pub fn sample_prior<R: Rng + ?Sized>(hyper: &PriorHyper, rng: &mut R) -> Result<Theta> {
    hyper.validate()?;
    let bad = |e: &dyn std::fmt::Display| Error::InvalidParameter(e.to_string());
    let mu = Normal::new(hyper.mu_mean, hyper.mu_var.sqrt()).map_err(|e| bad(&e))?;
    let alpha = Normal::new(hyper.alpha_mean, hyper.alpha_var.sqrt()).map_err(|e| bad(&e))?;
    let phi = Beta::new(hyper.phi_q, hyper.phi_r).map_err(|e| bad(&e))?;
    let precision = Gamma::new(hyper.tau2_shape, 1.0 / hyper.tau2_scale).map_err(|e| bad(&e))?;

    let mu = mu.sample(rng);
    let alpha = alpha.sample(rng);
    // A beta draw can round to exactly 1.0; the stationary law needs phi < 1.
    let phi = loop {
        let v: f64 = phi.sample(rng);
        if v < 1.0 {
            break v;
        }
    };
    let tau2 = loop {
        let g: f64 = precision.sample(rng);
        if g > 0.0 && g.is_finite() {
            break 1.0 / g;
        }
    };
    Ok(Theta { mu, alpha, phi, tau2 })
}

//! Weighted summaries of a particle cloud.

use crate::error::{Error, Result};

use super::cloud::ParticleCloud;

/// Effective sample size `N / (1 + V(w) / E(w)^2)`.
///
/// Evaluated on weights rescaled by their maximum, where the expression
/// reduces to `(sum w)^2 / sum w^2`; uniform and one-hot weights then give
/// exactly `N` and `1`.
pub fn ess(weights: &[f64]) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::InvalidInput("ess of an empty weight vector".into()));
    }
    let max = weights.iter().copied().fold(0.0_f64, f64::max);
    if !(max > 0.0 && max.is_finite()) {
        return Err(Error::InvalidInput("weights must have a positive finite maximum".into()));
    }
    let (s, s2) = weights.iter().fold((0.0, 0.0), |(s, s2), &w| {
        let u = w / max;
        (s + u, s2 + u * u)
    });
    Ok(s * s / s2)
}

/// Smallest value whose cumulative weight reaches `q` of the total, after
/// sorting by value.
pub fn weighted_quantile(values: &[f64], weights: &[f64], q: f64) -> Result<f64> {
    Ok(weighted_quantiles(values, weights, &[q])?[0])
}

/// Several quantiles with one sort.
pub fn weighted_quantiles(values: &[f64], weights: &[f64], qs: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InvalidInput("quantile of an empty sample".into()));
    }
    if values.len() != weights.len() {
        return Err(Error::InvalidInput("values and weights differ in length".into()));
    }
    if let Some(q) = qs.iter().find(|q| !(0.0..=1.0).contains(*q)) {
        return Err(Error::InvalidInput(format!("quantile level {q} outside [0, 1]")));
    }
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let total: f64 = weights.iter().sum();
    let mut out = Vec::with_capacity(qs.len());
    for &q in qs {
        // Absorb rounding in the running sum so that e.g. the median of
        // 1..=100 under uniform weights lands on 50.
        let target = q * total * (1.0 - 1e-12);
        let mut cum = 0.0;
        let mut pick = values[*idx.last().unwrap()];
        for &i in &idx {
            cum += weights[i];
            if weights[i] > 0.0 && cum >= target {
                pick = values[i];
                break;
            }
        }
        out.push(pick);
    }
    Ok(out)
}

/// Weighted mean with 5% and 95% quantiles.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Summary {
    pub mean: f64,
    pub q05: f64,
    pub q95: f64,
}

impl Summary {
    pub fn of(values: &[f64], weights: &[f64]) -> Result<Self> {
        let mean = values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>()
            / weights.iter().sum::<f64>();
        let q = weighted_quantiles(values, weights, &[0.05, 0.95])?;
        Ok(Self {
            mean,
            q05: q[0],
            q95: q[1],
        })
    }

    pub fn contains(&self, v: f64) -> bool {
        self.q05 <= v && v <= self.q95
    }
}

/// Per-period filter output.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterSnapshot {
    /// 1-based period index (the bar just assimilated).
    pub time_index: usize,
    pub sigma: Summary,
    pub mu: Summary,
    pub alpha: Summary,
    pub phi: Summary,
    pub tau2: Summary,
    pub ess: f64,
    /// Particles whose updated likelihood was zero.
    pub neg_inf_loglik: usize,
    /// Series evaluations that hit the term cap.
    pub series_failures: usize,
    /// Series evaluations whose truncated sum cancelled to a non-positive value.
    pub nonpositive_sums: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepDiagnostics {
    pub neg_inf_loglik: usize,
    pub series_failures: usize,
    pub nonpositive_sums: usize,
}

pub fn summarize(cloud: &ParticleCloud, diag: StepDiagnostics) -> Result<FilterSnapshot> {
    let w = cloud.weights();
    let ps = cloud.particles();
    let col = |f: &dyn Fn(&super::cloud::Particle) -> f64| ps.iter().map(f).collect::<Vec<f64>>();
    Ok(FilterSnapshot {
        time_index: cloud.time_index(),
        sigma: Summary::of(&col(&|p| p.log_sigma.exp()), w)?,
        mu: Summary::of(&col(&|p| p.eta.mu()), w)?,
        alpha: Summary::of(&col(&|p| p.eta.alpha()), w)?,
        phi: Summary::of(&col(&|p| p.eta.phi()), w)?,
        tau2: Summary::of(&col(&|p| p.eta.tau2()), w)?,
        ess: ess(w)?,
        neg_inf_loglik: diag.neg_inf_loglik,
        series_failures: diag.series_failures,
        nonpositive_sums: diag.nonpositive_sums,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ess_examples() {
        assert_eq!(ess(&vec![0.01; 100]).unwrap(), 100.0);
        let mut one_hot = vec![0.0; 100];
        one_hot[17] = 1.0;
        assert_eq!(ess(&one_hot).unwrap(), 1.0);
        let v = ess(&[0.5, 0.25, 0.25]).unwrap();
        assert!((v - 3.0 / 1.125).abs() < 1e-14);
        assert!(ess(&[]).is_err());
        assert!(ess(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn ess_matches_variance_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let w: Vec<f64> = (0..50).map(|_| rng.random::<f64>()).collect();
        let n = w.len() as f64;
        let e = w.iter().sum::<f64>() / n;
        let v = w.iter().map(|x| (x - e).powi(2)).sum::<f64>() / n;
        let direct = n / (1.0 + v / (e * e));
        assert!((ess(&w).unwrap() - direct).abs() < 1e-10);
    }

    #[test]
    fn quantile_examples() {
        let vals: Vec<f64> = (1..=100).map(f64::from).collect();
        let w = vec![0.01; 100];
        assert_eq!(weighted_quantile(&vals, &w, 0.5).unwrap(), 50.0);
        assert_eq!(weighted_quantile(&vals, &w, 0.0).unwrap(), 1.0);
        assert_eq!(weighted_quantile(&vals, &w, 1.0).unwrap(), 100.0);

        let mut w = vec![0.0; 100];
        w[41] = 1.0;
        for q in [0.0, 0.05, 0.5, 0.95, 1.0] {
            assert_eq!(weighted_quantile(&vals, &w, q).unwrap(), 42.0);
        }
        assert!(weighted_quantile(&[], &[], 0.5).is_err());
        assert!(weighted_quantile(&[1.0], &[1.0], 1.5).is_err());
    }

    #[test]
    fn quantile_matches_resampling_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let n = 400;
        let vals: Vec<f64> = (0..n).map(|i| (i as f64 / n as f64 * 3.0).sin() + i as f64 / 100.0).collect();
        let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let tot: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / tot).collect();
        let dist = rand::distr::weighted::WeightedIndex::new(&w).unwrap();
        let mut draws: Vec<f64> = (0..1_000_000).map(|_| vals[rng.sample(&dist)]).collect();
        draws.sort_by(f64::total_cmp);
        for q in [0.05, 0.25, 0.5, 0.75, 0.95] {
            let oracle = draws[(q * draws.len() as f64) as usize];
            let got = weighted_quantile(&vals, &w, q).unwrap();
            assert!((oracle - got).abs() < 1e-2, "q={q}: {oracle} vs {got}");
        }
    }
}

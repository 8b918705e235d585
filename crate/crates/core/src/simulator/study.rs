//! Model-comparison study on synthetic data.

use crate::error::{Error, Result};
use crate::filter::{run_filter_with, weighted_quantile, FilterConfig, FilterSnapshot, ModelVariant};
use crate::rng::{Purpose, RngStreams};

use super::{simulate_dataset, SimConfig};

/// Numerator and denominator model of a ratio row.
pub type ModelPair = (ModelVariant, ModelVariant);

/// The row pairs of the published comparison table.
pub const TABLE1_PAIRS: [ModelPair; 4] = [
    (ModelVariant::Stsv, ModelVariant::Rasv),
    (ModelVariant::Rasv, ModelVariant::Rcsv),
    (ModelVariant::Rcsv, ModelVariant::Exsv),
    (ModelVariant::Rasv, ModelVariant::Exsv),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Rmsd,
    Mad,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Rmsd => "RMSD",
            Measure::Mad => "MAD",
        }
    }
}

/// One model fitted to one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetFit {
    pub dataset: usize,
    pub variant: ModelVariant,
    /// `sqrt(mean_t (sigma_hat_t - sigma_t)^2)` on posterior-mean volatility.
    pub rmsd: f64,
    /// `median_t |sigma_hat_t - sigma_t|`.
    pub mad: f64,
    /// Fraction of periods whose 90% interval contains the true volatility.
    pub coverage: f64,
    /// `|mu_hat - mu|` at the last period; `None` for range-only fits.
    pub drift_error: Option<f64>,
    pub snapshots: Vec<FilterSnapshot>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub numerator: ModelVariant,
    pub denominator: ModelVariant,
    pub measure: Measure,
    pub median: f64,
    pub q05: f64,
    pub q95: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub fits: Vec<DatasetFit>,
    pub rows: Vec<RatioRow>,
}

impl StudyReport {
    pub fn fits_for(&self, variant: ModelVariant) -> impl Iterator<Item = &DatasetFit> {
        self.fits.iter().filter(move |f| f.variant == variant)
    }

    pub fn row(&self, pair: ModelPair, measure: Measure) -> Option<&RatioRow> {
        self.rows
            .iter()
            .find(|r| (r.numerator, r.denominator) == pair && r.measure == measure)
    }
}

/// Median as the mean of the two middle order statistics for even counts.
pub(crate) fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn score(dataset: usize, variant: ModelVariant, truth: &[f64], mu: f64, snaps: Vec<FilterSnapshot>) -> DatasetFit {
    let dev: Vec<f64> = snaps.iter().zip(truth).map(|(s, t)| s.sigma.mean - t).collect();
    let n = dev.len() as f64;
    let rmsd = (dev.iter().map(|d| d * d).sum::<f64>() / n).sqrt();
    let abs: Vec<f64> = dev.iter().map(|d| d.abs()).collect();
    let covered = snaps.iter().zip(truth).filter(|(s, &t)| s.sigma.contains(t)).count();
    DatasetFit {
        dataset,
        variant,
        rmsd,
        mad: median(&abs),
        coverage: covered as f64 / n,
        drift_error: variant
            .learns_drift()
            .then(|| (snaps.last().map_or(0.0, |s| s.mu.mean) - mu).abs()),
        snapshots: snaps,
    }
}

/// Simulates `sim.n_datasets` series and fits every model appearing in
/// `pairs` to each one. Models fitted to the same dataset share random
/// streams. Ratio rows give the median and empirical 5%/95% quantiles of the
/// per-dataset ratios.
pub fn run_study(sim: &SimConfig, filter: &FilterConfig, pairs: &[ModelPair]) -> Result<StudyReport> {
    sim.validate()?;
    filter.validate()?;
    if sim.n_datasets == 0 {
        return Err(Error::InvalidParameter("study needs at least one dataset".into()));
    }
    let mut models: Vec<ModelVariant> = Vec::new();
    for &(a, b) in pairs {
        for m in [a, b] {
            if !models.contains(&m) {
                models.push(m);
            }
        }
    }
    models.sort_by_key(|m| ModelVariant::ALL.iter().position(|x| x == m));

    let sim_streams = RngStreams::new(sim.seed);
    let fit_streams = RngStreams::new(filter.seed);
    let mut fits = Vec::with_capacity(sim.n_datasets * models.len());
    for d in 0..sim.n_datasets {
        let mut rng = sim_streams.derive(d as u64).stream(Purpose::Simulate, 0, 0);
        let data = simulate_dataset(sim, &mut rng)?;
        let truth = data.true_sigma();
        let streams = fit_streams.derive(d as u64);
        for &variant in &models {
            let cfg = FilterConfig {
                variant,
                ..filter.clone()
            };
            let snaps = run_filter_with(&data.bars, &cfg, &streams).map_err(|e| Error::Study {
                dataset: d,
                source: Box::new(e),
            })?;
            let fit = score(d, variant, &truth, sim.theta.mu, snaps);
            log::info!(
                "dataset {d} {variant}: rmsd {:.6} mad {:.6} coverage {:.3}",
                fit.rmsd,
                fit.mad,
                fit.coverage
            );
            fits.push(fit);
        }
    }

    let mut rows = Vec::new();
    for &(num, den) in pairs {
        for measure in [Measure::Rmsd, Measure::Mad] {
            let pick = |v: ModelVariant| -> Vec<f64> {
                fits.iter()
                    .filter(|f| f.variant == v)
                    .map(|f| match measure {
                        Measure::Rmsd => f.rmsd,
                        Measure::Mad => f.mad,
                    })
                    .collect()
            };
            let ratios: Vec<f64> = pick(num).iter().zip(pick(den)).map(|(a, b)| a / b).collect();
            let w = vec![1.0; ratios.len()];
            rows.push(RatioRow {
                numerator: num,
                denominator: den,
                measure,
                median: median(&ratios),
                q05: weighted_quantile(&ratios, &w, 0.05)?,
                q95: weighted_quantile(&ratios, &w, 0.95)?,
            });
        }
    }
    Ok(StudyReport { fits, rows })
}

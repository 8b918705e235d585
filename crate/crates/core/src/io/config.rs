//! Run configuration: a flat TOML file whose keys all have defaults.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::filter::{FilterConfig, ModelVariant};
use crate::series::SeriesControl;
use crate::simulator::SimConfig;
use crate::vol_process::{PriorHyper, Theta};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelVariant,
    pub particles: usize,
    pub discount: f64,
    pub seed: u64,
    pub resample_ess_fraction: Option<f64>,
    pub weekend_effect: bool,
    pub strict: bool,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    /// `simulate`: latent volatility path; `study`: per-dataset fit metrics.
    pub truth: Option<PathBuf>,

    pub mu_mean: f64,
    pub mu_var: f64,
    pub alpha_mean: f64,
    pub alpha_var: f64,
    pub phi_q: f64,
    pub phi_r: f64,
    pub tau2_shape: f64,
    pub tau2_scale: f64,
    pub series_rel_tol: f64,
    pub series_max_terms: u32,

    pub n_periods: usize,
    pub grid_nodes: usize,
    pub true_mu: f64,
    pub true_alpha: f64,
    pub true_phi: f64,
    pub true_tau: f64,
    pub s0: f64,
    pub n_datasets: usize,
    pub start_date: NaiveDate,

    pub oracle_mu: f64,
    pub oracle_sigma: f64,
    pub oracle_paths: usize,
    pub oracle_grid_nodes: usize,
    pub oracle_boxes: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let hyper = PriorHyper::default();
        let sim = SimConfig::default();
        Self {
            model: ModelVariant::Exsv,
            particles: 30_000,
            discount: 0.95,
            seed: 0,
            resample_ess_fraction: None,
            weekend_effect: false,
            strict: false,
            input: None,
            output: None,
            truth: None,
            mu_mean: hyper.mu_mean,
            mu_var: hyper.mu_var,
            alpha_mean: hyper.alpha_mean,
            alpha_var: hyper.alpha_var,
            phi_q: hyper.phi_q,
            phi_r: hyper.phi_r,
            tau2_shape: hyper.tau2_shape,
            tau2_scale: hyper.tau2_scale,
            series_rel_tol: SeriesControl::DEFAULT_REL_TOL,
            series_max_terms: SeriesControl::DEFAULT_MAX_TERMS,
            n_periods: sim.n_periods,
            grid_nodes: sim.grid_nodes,
            true_mu: sim.theta.mu,
            true_alpha: sim.theta.alpha,
            true_phi: sim.theta.phi,
            true_tau: sim.theta.tau(),
            s0: sim.s0,
            n_datasets: sim.n_datasets,
            start_date: NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date"),
            oracle_mu: 0.0,
            oracle_sigma: 0.025,
            oracle_paths: 1_000_000,
            oracle_grid_nodes: 10_000,
            oracle_boxes: 20,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn hyper(&self) -> PriorHyper {
        PriorHyper {
            mu_mean: self.mu_mean,
            mu_var: self.mu_var,
            alpha_mean: self.alpha_mean,
            alpha_var: self.alpha_var,
            phi_q: self.phi_q,
            phi_r: self.phi_r,
            tau2_shape: self.tau2_shape,
            tau2_scale: self.tau2_scale,
        }
    }

    pub fn filter_config(&self) -> Result<FilterConfig> {
        let cfg = FilterConfig {
            variant: self.model,
            n_particles: self.particles,
            discount: self.discount,
            hyper: self.hyper(),
            series: SeriesControl::new(self.series_rel_tol, self.series_max_terms)?,
            seed: self.seed,
            resample_ess_fraction: self.resample_ess_fraction,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn sim_config(&self) -> Result<SimConfig> {
        let cfg = SimConfig {
            n_periods: self.n_periods,
            grid_nodes: self.grid_nodes,
            theta: Theta::new(self.true_mu, self.true_alpha, self.true_phi, self.true_tau * self.true_tau)?,
            s0: self.s0,
            n_datasets: self.n_datasets,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn input(&self) -> Result<&Path> {
        self.input
            .as_deref()
            .ok_or_else(|| Error::Config("no input file given (--input or `input`)".into()))
    }

    pub fn output(&self) -> Result<&Path> {
        self.output
            .as_deref()
            .ok_or_else(|| Error::Config("no output file given (--output or `output`)".into()))
    }
}

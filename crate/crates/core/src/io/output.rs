//! CSV writers for filter, study and oracle results.
//!
//! Column orders:
//! - snapshots: `date,time_index,sigma_mean,sigma_q05,sigma_q95,` then
//!   `mean,q05,q95` for each of `mu`, `alpha`, `phi`, `tau2`, then
//!   `ess,neg_inf_loglik,series_failures,nonpositive_sums`
//! - study: `numerator,denominator,measure,median,q05,q95`
//! - fits: `dataset,model,rmsd,mad,coverage,drift_error,min_ess`
//! - truth: `date,log_sigma,sigma`
//! - oracle: `kind,axes,lo1,hi1,lo2,hi2,lo3,hi3,mc_probability,mc_se,quadrature,z`

use std::path::Path;

use chrono::NaiveDate;

use crate::error::Result;
use crate::filter::{FilterSnapshot, Summary};
use crate::simulator::{OracleRow, StudyReport};

use super::fmt_f64 as f;

pub fn write_snapshots(path: &Path, dates: &[NaiveDate], snaps: &[FilterSnapshot]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["date".to_string(), "time_index".to_string()];
    for name in ["sigma", "mu", "alpha", "phi", "tau2"] {
        for stat in ["mean", "q05", "q95"] {
            header.push(format!("{name}_{stat}"));
        }
    }
    header.extend(["ess", "neg_inf_loglik", "series_failures", "nonpositive_sums"].map(String::from));
    w.write_record(&header)?;
    for (d, s) in dates.iter().zip(snaps) {
        let mut row = vec![d.to_string(), s.time_index.to_string()];
        for Summary { mean, q05, q95 } in [s.sigma, s.mu, s.alpha, s.phi, s.tau2] {
            row.extend([f(mean), f(q05), f(q95)]);
        }
        row.extend([
            f(s.ess),
            s.neg_inf_loglik.to_string(),
            s.series_failures.to_string(),
            s.nonpositive_sums.to_string(),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_study(path: &Path, report: &StudyReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["numerator", "denominator", "measure", "median", "q05", "q95"])?;
    for r in &report.rows {
        w.write_record([
            r.numerator.name().to_string(),
            r.denominator.name().to_string(),
            r.measure.name().to_string(),
            f(r.median),
            f(r.q05),
            f(r.q95),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_fits(path: &Path, report: &StudyReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["dataset", "model", "rmsd", "mad", "coverage", "drift_error", "min_ess"])?;
    for fit in &report.fits {
        let min_ess = fit.snapshots.iter().map(|s| s.ess).fold(f64::INFINITY, f64::min);
        w.write_record([
            fit.dataset.to_string(),
            fit.variant.name().to_string(),
            f(fit.rmsd),
            f(fit.mad),
            f(fit.coverage),
            fit.drift_error.map(f).unwrap_or_default(),
            f(min_ess),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_truth(path: &Path, dates: &[NaiveDate], log_sigma: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["date", "log_sigma", "sigma"])?;
    for (d, v) in dates.iter().zip(log_sigma) {
        w.write_record([d.to_string(), f(*v), f(v.exp())])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_oracle(path: &Path, rows: &[OracleRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "kind", "axes", "lo1", "hi1", "lo2", "hi2", "lo3", "hi3", "mc_probability", "mc_se", "quadrature", "z",
    ])?;
    for r in rows {
        let ivs = r.region.intervals();
        let axes: Vec<&str> = ivs.iter().map(|(n, _)| *n).collect();
        let mut rec = vec![r.region.kind().to_string(), axes.join("|")];
        for k in 0..3 {
            match ivs.get(k) {
                Some((_, iv)) => rec.extend([f(iv.lo), f(iv.hi)]),
                None => rec.extend([String::new(), String::new()]),
            }
        }
        rec.extend([f(r.mc_probability), f(r.mc_se), f(r.quadrature), f(r.z_score())]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

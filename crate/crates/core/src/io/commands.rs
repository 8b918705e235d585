//! `fit`, `simulate`, `study` and `oracle`.

use crate::error::Result;
use crate::filter::{run_filter, FilterSnapshot};
use crate::likelihood::PeriodParams;
use crate::rng::{Purpose, RngStreams};
use crate::simulator::{oracle_boxes, oracle_report, simulate_dataset, OracleRow, StudyReport, TABLE1_PAIRS};

use super::bars::{dataset_records, parse_bars, to_observations, write_bars};
use super::output::{write_fits, write_oracle, write_snapshots, write_study, write_truth};
use super::RunConfig;

/// Fits the configured model to the input bars and writes one snapshot row per bar.
pub fn run_fit(cfg: &RunConfig) -> Result<Vec<FilterSnapshot>> {
    let filter = cfg.filter_config()?;
    let records = parse_bars(cfg.input()?, cfg.strict)?;
    let out = cfg.output()?;
    let obs = to_observations(&records, cfg.weekend_effect);
    let snaps = run_filter(&obs, &filter)?;
    let dates: Vec<_> = records.iter().map(|r| r.date).collect();
    write_snapshots(out, &dates, &snaps)?;
    Ok(snaps)
}

/// Writes one simulated dataset (the first dataset of a study with the same
/// seed) as a bar file, and its latent path when `truth` is set.
pub fn run_simulate(cfg: &RunConfig) -> Result<()> {
    let sim = cfg.sim_config()?;
    let out = cfg.output()?;
    let mut rng = RngStreams::new(sim.seed).derive(0).stream(Purpose::Simulate, 0, 0);
    let data = simulate_dataset(&sim, &mut rng)?;
    let records = dataset_records(&data, cfg.start_date);
    write_bars(out, &records)?;
    if let Some(path) = &cfg.truth {
        let dates: Vec<_> = records.iter().map(|r| r.date).collect();
        write_truth(path, &dates, &data.true_log_sigma)?;
    }
    Ok(())
}

/// Runs the four-model comparison and writes the ratio table, plus
/// per-dataset metrics when `truth` is set.
pub fn run_study(cfg: &RunConfig) -> Result<StudyReport> {
    let sim = cfg.sim_config()?;
    let filter = cfg.filter_config()?;
    let out = cfg.output()?;
    let report = crate::simulator::run_study(&sim, &filter, &TABLE1_PAIRS)?;
    write_study(out, &report)?;
    if let Some(path) = &cfg.truth {
        write_fits(path, &report)?;
    }
    Ok(report)
}

/// Compares Monte Carlo box probabilities with integrated densities.
pub fn run_oracle(cfg: &RunConfig) -> Result<Vec<OracleRow>> {
    let p = PeriodParams::new(cfg.oracle_mu, cfg.oracle_sigma)?;
    let out = cfg.output()?;
    let series = cfg.filter_config()?.series;
    let streams = RngStreams::new(cfg.seed);
    let mut rng = streams.stream(Purpose::Oracle, 1, 0);
    let regions = oracle_boxes(&p, cfg.oracle_boxes, &mut rng);
    let rows = oracle_report(&p, &regions, cfg.oracle_paths, cfg.oracle_grid_nodes, &series, &streams)?;
    write_oracle(out, &rows)?;
    Ok(rows)
}

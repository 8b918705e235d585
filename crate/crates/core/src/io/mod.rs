//! File formats, configuration and the command implementations behind the
//! `chlo-sv` binary.
//!
//! Every floating-point value is written with 17 significant digits so that
//! outputs round-trip exactly and repeated runs compare byte for byte.

mod bars;
mod commands;
mod config;
mod output;

pub use bars::{dataset_records, parse_bars, read_bars, to_observations, write_bars, BarRecord};
pub use commands::{run_fit, run_oracle, run_simulate, run_study};
pub use config::RunConfig;
pub use output::{write_fits, write_oracle, write_snapshots, write_study, write_truth};

pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

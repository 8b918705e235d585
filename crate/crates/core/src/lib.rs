//! Stochastic volatility estimation from open/high/low/close bars.
//!
//! The crate evaluates the exact law of the low, high and close of drifted
//! Brownian motion over a period ([`likelihood`]), couples it to an AR(1)
//! log-volatility process ([`vol_process`]) and fits the resulting state-space
//! model with a Liu-West auxiliary particle filter ([`filter`]). The
//! [`simulator`] generates synthetic bars, runs model-comparison studies and
//! hosts a Monte Carlo path oracle for the densities; [`io`] holds the CSV and
//! config plumbing behind the `chlo-sv` binary.

pub mod error;
pub mod filter;
pub mod io;
pub mod likelihood;
pub mod quadrature;
pub mod rng;
pub mod series;
pub mod simulator;
pub mod vol_process;

pub use error::{Error, Result};
pub use filter::{
    ess, run_filter, weighted_quantile, FilterConfig, FilterSnapshot, ModelVariant, ParticleCloud,
};
pub use likelihood::{ChloObservation, DensityEval, PeriodParams};
pub use series::SeriesControl;
pub use vol_process::{Eta, PriorHyper, Theta};

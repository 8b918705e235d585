//! Python bindings: closed-form bar densities, the simulator and the particle filter.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use chlo_sv::likelihood as lik;
use chlo_sv::rng::{Purpose, RngStreams};
use chlo_sv::simulator::{simulate_dataset, SimConfig};
use chlo_sv::{ChloObservation, Error, FilterConfig, ModelVariant, PeriodParams, SeriesControl, Theta};

create_exception!(pychlo, FilterDegeneracyError, PyRuntimeError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::FilterDegeneracy { .. } => FilterDegeneracyError::new_err(e.to_string()),
        Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn series(rel_tol: Option<f64>, max_terms: Option<u32>) -> PyResult<SeriesControl> {
    SeriesControl::new(
        rel_tol.unwrap_or(SeriesControl::DEFAULT_REL_TOL),
        max_terms.unwrap_or(SeriesControl::DEFAULT_MAX_TERMS),
    )
    .map_err(to_py)
}

fn params(mu: f64, sigma: f64) -> PyResult<PeriodParams> {
    PeriodParams::new(mu, sigma).map_err(to_py)
}

/// Log-density of the close alone.
#[pyfunction]
fn log_density_close(open: f64, close: f64, mu: f64, sigma: f64) -> PyResult<f64> {
    lik::log_density_close(open, close, &params(mu, sigma)?).map_err(to_py)
}

/// Joint log-density of (close, low, high) given the open.
#[pyfunction]
#[pyo3(signature = (open, close, low, high, mu, sigma, rel_tol=None, max_terms=None))]
#[allow(clippy::too_many_arguments)]
fn log_density_chlo(
    open: f64,
    close: f64,
    low: f64,
    high: f64,
    mu: f64,
    sigma: f64,
    rel_tol: Option<f64>,
    max_terms: Option<u32>,
) -> PyResult<f64> {
    let e = lik::log_density_chlo(open, close, low, high, &params(mu, sigma)?, &series(rel_tol, max_terms)?)
        .map_err(to_py)?;
    Ok(e.log_density)
}

/// Joint log-density of (range, close) given the open.
#[pyfunction]
#[pyo3(signature = (range, open, close, mu, sigma, rel_tol=None, max_terms=None))]
fn log_density_range_close(
    range: f64,
    open: f64,
    close: f64,
    mu: f64,
    sigma: f64,
    rel_tol: Option<f64>,
    max_terms: Option<u32>,
) -> PyResult<f64> {
    let e = lik::log_density_range_close(range, open, close, &params(mu, sigma)?, &series(rel_tol, max_terms)?)
        .map_err(to_py)?;
    Ok(e.log_density)
}

/// Log-density of the driftless range.
#[pyfunction]
#[pyo3(signature = (range, sigma, rel_tol=None, max_terms=None))]
fn log_density_range(range: f64, sigma: f64, rel_tol: Option<f64>, max_terms: Option<u32>) -> PyResult<f64> {
    let e = lik::log_density_range(range, sigma, &series(rel_tol, max_terms)?).map_err(to_py)?;
    Ok(e.log_density)
}

/// One log-price bar; `low` and `high` may be `None`.
#[pyclass(frozen, get_all, from_py_object)]
#[derive(Clone)]
struct Bar {
    open: f64,
    high: Option<f64>,
    low: Option<f64>,
    close: f64,
}

#[pymethods]
impl Bar {
    #[new]
    #[pyo3(signature = (open, high, low, close))]
    fn new(open: f64, high: Option<f64>, low: Option<f64>, close: f64) -> Self {
        Self { open, high, low, close }
    }

    fn __repr__(&self) -> String {
        format!("Bar(open={}, high={:?}, low={:?}, close={})", self.open, self.high, self.low, self.close)
    }
}

impl From<&Bar> for ChloObservation {
    fn from(b: &Bar) -> Self {
        ChloObservation::new(b.open, b.close, b.low, b.high)
    }
}

#[pyclass(frozen, get_all)]
struct Dataset {
    bars: Vec<Bar>,
    true_log_sigma: Vec<f64>,
}

#[pymethods]
impl Dataset {
    fn true_sigma(&self) -> Vec<f64> {
        self.true_log_sigma.iter().map(|v| v.exp()).collect()
    }

    fn __len__(&self) -> usize {
        self.bars.len()
    }
}

/// Simulates one chained series of log-price bars.
#[pyfunction]
#[pyo3(signature = (n_periods=156, seed=0, dataset=0, grid_nodes=1000, mu=0.000961, alpha=-3.75, phi=0.9, tau2=0.0121, s0=100.0))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    n_periods: usize,
    seed: u64,
    dataset: u64,
    grid_nodes: usize,
    mu: f64,
    alpha: f64,
    phi: f64,
    tau2: f64,
    s0: f64,
) -> PyResult<Dataset> {
    let cfg = SimConfig {
        n_periods,
        grid_nodes,
        theta: Theta::new(mu, alpha, phi, tau2).map_err(to_py)?,
        s0,
        n_datasets: 1,
        seed,
    };
    let mut rng = RngStreams::new(seed).derive(dataset).stream(Purpose::Simulate, 0, 0);
    let data = simulate_dataset(&cfg, &mut rng).map_err(to_py)?;
    Ok(Dataset {
        bars: data
            .bars
            .iter()
            .map(|o| Bar::new(o.open, o.high, o.low, o.close))
            .collect(),
        true_log_sigma: data.true_log_sigma,
    })
}

/// Posterior mean and 90% interval of one quantity.
#[pyclass(frozen, get_all, skip_from_py_object)]
#[derive(Clone, Copy)]
struct Summary {
    mean: f64,
    q05: f64,
    q95: f64,
}

impl From<chlo_sv::filter::Summary> for Summary {
    fn from(s: chlo_sv::filter::Summary) -> Self {
        Self { mean: s.mean, q05: s.q05, q95: s.q95 }
    }
}

#[pyclass(frozen, get_all)]
struct Snapshot {
    time_index: usize,
    sigma: Summary,
    mu: Summary,
    alpha: Summary,
    phi: Summary,
    tau2: Summary,
    ess: f64,
    neg_inf_loglik: usize,
    series_failures: usize,
    nonpositive_sums: usize,
}

/// Runs the particle filter over `bars` and returns one snapshot per bar.
/// `model` is one of stsv, rasv, rcsv, exsv.
#[pyfunction]
#[pyo3(signature = (bars, model="exsv", particles=30_000, discount=0.95, seed=0, resample_ess_fraction=None))]
fn run_filter(
    py: Python<'_>,
    bars: Vec<Bar>,
    model: &str,
    particles: usize,
    discount: f64,
    seed: u64,
    resample_ess_fraction: Option<f64>,
) -> PyResult<Vec<Snapshot>> {
    let variant: ModelVariant = model.parse().map_err(to_py)?;
    let cfg = FilterConfig {
        variant,
        n_particles: particles,
        discount,
        seed,
        resample_ess_fraction,
        ..FilterConfig::default()
    };
    let obs: Vec<ChloObservation> = bars.iter().map(ChloObservation::from).collect();
    let snaps = py
        .detach(|| chlo_sv::run_filter(&obs, &cfg))
        .map_err(to_py)?;
    Ok(snaps
        .into_iter()
        .map(|s| Snapshot {
            time_index: s.time_index,
            sigma: s.sigma.into(),
            mu: s.mu.into(),
            alpha: s.alpha.into(),
            phi: s.phi.into(),
            tau2: s.tau2.into(),
            ess: s.ess,
            neg_inf_loglik: s.neg_inf_loglik,
            series_failures: s.series_failures,
            nonpositive_sums: s.nonpositive_sums,
        })
        .collect())
}

#[pymodule]
fn pychlo(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(log_density_close, m)?)?;
    m.add_function(wrap_pyfunction!(log_density_chlo, m)?)?;
    m.add_function(wrap_pyfunction!(log_density_range_close, m)?)?;
    m.add_function(wrap_pyfunction!(log_density_range, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(run_filter, m)?)?;
    m.add_class::<Bar>()?;
    m.add_class::<Dataset>()?;
    m.add_class::<Summary>()?;
    m.add_class::<Snapshot>()?;
    m.add("FilterDegeneracyError", m.py().get_type::<FilterDegeneracyError>())?;
    m.add("MODELS", ModelVariant::ALL.iter().map(|v| v.name().to_ascii_lowercase()).collect::<Vec<_>>())?;
    Ok(())
}

//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use chlo_sv::likelihood::PeriodParams;
use chlo_sv::rng::{Purpose, RngStreams};
use chlo_sv::simulator::simulate_extremes;

/// Joint density of (low, high, close) given open = 0, summed naively over
/// n in [-200, 200].
pub fn ref_chlo(low: f64, high: f64, close: f64, p: &PeriodParams) -> f64 {
    let s = p.sigma;
    let (x, a, r) = (close / s, low / s, (high - low) / s);
    let mut sum = 0.0;
    for n in -200i32..=200 {
        let n = f64::from(n);
        let u = x - 2.0 * n * r;
        let v = x - 2.0 * a - 2.0 * n * r;
        sum += 4.0 * n * n * (u * u - 1.0) * (-0.5 * u * u).exp()
            - 4.0 * n * (n - 1.0) * (v * v - 1.0) * (-0.5 * v * v).exp();
    }
    let drift = (p.mu * close - 0.5 * p.mu * p.mu) / (s * s);
    drift.exp() / ((2.0 * PI).sqrt() * s.powi(3)) * sum
}

/// Joint density of (range, close) given open = 0, naive sum over n in [-200, 200].
pub fn ref_range_close(range: f64, close: f64, p: &PeriodParams) -> f64 {
    let s = p.sigma;
    let (x, r) = (close.abs() / s, range / s);
    let mut sum = 0.0;
    for n in -200i32..=200 {
        let n = f64::from(n);
        let u = 2.0 * n * r - x;
        let v = x + 2.0 * (n - 1.0) * r;
        let eu = (-0.5 * u * u).exp();
        sum += (r - x) * 4.0 * n * n * (u * u - 1.0) * eu + 2.0 * n * (n - 1.0) * u * eu
            - 2.0 * n * (n - 1.0) * v * (-0.5 * v * v).exp();
    }
    let drift = (p.mu * close - 0.5 * p.mu * p.mu) / (s * s);
    drift.exp() / ((2.0 * PI).sqrt() * s * s) * sum
}

/// Density of the range, naive alternating sum over n in [1, 200].
pub fn ref_range(range: f64, sigma: f64) -> f64 {
    let r = range / sigma;
    let mut sum = 0.0;
    for n in 1..=200 {
        let n = f64::from(n);
        let sign = if n as i32 % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * n * n * (-0.5 * n * n * r * r).exp();
    }
    8.0 / ((2.0 * PI).sqrt() * sigma) * sum
}

pub fn gaussian(x: f64, mean: f64, sd: f64) -> f64 {
    (-0.5 * ((x - mean) / sd).powi(2)).exp() / ((2.0 * PI).sqrt() * sd)
}

/// Draws `n` period parameters with sigma in [0.005, 0.2] and |mu| < sigma,
/// and one (low, high, close) realisation of each.
pub fn typical_points(n: usize, seed: u64) -> Vec<(PeriodParams, f64, f64, f64)> {
    use rand::Rng;
    let streams = RngStreams::new(seed);
    let mut buf = Vec::new();
    (0..n)
        .map(|i| {
            let mut rng = streams.stream(Purpose::Oracle, 9, i as u64);
            let sigma = 0.005 * 40f64.powf(rng.random::<f64>());
            let mu = sigma * rng.random_range(-1.0..1.0);
            let p = PeriodParams { mu, sigma };
            let (lo, hi, x) = simulate_extremes(&p, 64, true, &mut rng, &mut buf);
            (p, lo, hi, x)
        })
        .collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

//! Which likelihood a bar contributes under each model variant.

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::Error;
use crate::likelihood::{
    log_density_chlo, log_density_close, log_density_close_max, log_density_close_min,
    log_density_range, log_density_range_close, ChloObservation, DensityEval, PeriodParams,
};
use crate::series::SeriesControl;

/// Observation model used by the filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(try_from = "String")]
pub enum ModelVariant {
    /// Close-only Gaussian likelihood.
    Stsv,
    /// Range-only likelihood, drift fixed at zero.
    Rasv,
    /// Range and close.
    Rcsv,
    /// Full open/high/low/close likelihood.
    Exsv,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 4] = [Self::Stsv, Self::Rasv, Self::Rcsv, Self::Exsv];

    /// Whether the drift is a learned parameter under this variant.
    pub fn learns_drift(self) -> bool {
        !matches!(self, Self::Rasv)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Stsv => "STSV",
            Self::Rasv => "RASV",
            Self::Rcsv => "RCSV",
            Self::Exsv => "EXSV",
        }
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl TryFrom<String> for ModelVariant {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl FromStr for ModelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "stsv" => Ok(Self::Stsv),
            "rasv" => Ok(Self::Rasv),
            "rcsv" => Ok(Self::Rcsv),
            "exsv" => Ok(Self::Exsv),
            other => Err(Error::Config(format!(
                "unknown model '{other}', expected stsv|rasv|rcsv|exsv"
            ))),
        }
    }
}

/// The part of a bar a variant actually conditions on.
///
/// Extremes that are missing, or that touch the open/close (zero-probability
/// events under the continuous model, e.g. zero-range bars), are dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BarEvidence {
    /// Nothing informative (range-only model without a usable range).
    Flat,
    Close { open: f64, close: f64 },
    Range { range: f64 },
    RangeClose { range: f64, open: f64, close: f64 },
    HighClose { open: f64, close: f64, high: f64 },
    LowClose { open: f64, close: f64, low: f64 },
    Full { open: f64, close: f64, low: f64, high: f64 },
}

/// One likelihood evaluation with its series diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LikEval {
    pub log_lik: f64,
    pub series_failure: bool,
    pub nonpositive: bool,
}

impl LikEval {
    fn plain(log_lik: f64) -> Self {
        Self {
            log_lik,
            series_failure: false,
            nonpositive: false,
        }
    }

    pub fn zero() -> Self {
        Self::plain(f64::NEG_INFINITY)
    }

    fn series(e: DensityEval) -> Self {
        Self {
            log_lik: e.log_density,
            series_failure: !e.converged,
            nonpositive: e.nonpositive,
        }
    }
}

impl BarEvidence {
    pub fn classify(variant: ModelVariant, obs: &ChloObservation) -> Self {
        let (open, close) = (obs.open, obs.close);
        let low = obs.usable_low();
        let high = obs.usable_high();
        match variant {
            ModelVariant::Stsv => Self::Close { open, close },
            ModelVariant::Rasv => match obs.range() {
                Some(range) if range > 0.0 => Self::Range { range },
                _ => Self::Flat,
            },
            ModelVariant::Rcsv => match obs.range() {
                Some(range) if range > (close - open).abs() => Self::RangeClose { range, open, close },
                _ => Self::Close { open, close },
            },
            ModelVariant::Exsv => match (low, high) {
                (Some(low), Some(high)) => Self::Full { open, close, low, high },
                (None, Some(high)) => Self::HighClose { open, close, high },
                (Some(low), None) => Self::LowClose { open, close, low },
                (None, None) => Self::Close { open, close },
            },
        }
    }

    /// Log-likelihood at drift `mu` and volatility `sigma`. Particles whose
    /// volatility is not a positive finite number get `-inf`.
    pub fn log_likelihood(&self, mu: f64, sigma: f64, ctl: &SeriesControl) -> LikEval {
        let p = PeriodParams { mu, sigma };
        if p.validate().is_err() {
            return LikEval::plain(f64::NEG_INFINITY);
        }
        // Observations are validated before filtering, so errors below can
        // only come from the particle side.
        let res = match *self {
            Self::Flat => Ok(LikEval::plain(0.0)),
            Self::Close { open, close } => log_density_close(open, close, &p).map(LikEval::plain),
            Self::Range { range } => log_density_range(range, sigma, ctl).map(LikEval::series),
            Self::RangeClose { range, open, close } => {
                log_density_range_close(range, open, close, &p, ctl).map(LikEval::series)
            }
            Self::HighClose { open, close, high } => {
                log_density_close_max(open, close, high, &p).map(LikEval::plain)
            }
            Self::LowClose { open, close, low } => {
                log_density_close_min(open, close, low, &p).map(LikEval::plain)
            }
            Self::Full { open, close, low, high } => {
                log_density_chlo(open, close, low, high, &p, ctl).map(LikEval::series)
            }
        };
        match res {
            Ok(e) if e.log_lik.is_nan() || e.log_lik == f64::INFINITY => LikEval {
                log_lik: f64::NEG_INFINITY,
                series_failure: true,
                nonpositive: e.nonpositive,
            },
            Ok(e) => e,
            Err(_) => LikEval::zero(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_variants() {
        assert_eq!("EXSV".parse::<ModelVariant>().unwrap(), ModelVariant::Exsv);
        assert_eq!("rasv".parse::<ModelVariant>().unwrap(), ModelVariant::Rasv);
        assert!("garch".parse::<ModelVariant>().is_err());
        assert!(!ModelVariant::Rasv.learns_drift());
        assert!(ModelVariant::Rcsv.learns_drift());
    }

    #[test]
    fn classification_follows_missingness() {
        let full = ChloObservation::full(0.0, 0.01, -0.01, 0.02);
        assert!(matches!(BarEvidence::classify(ModelVariant::Exsv, &full), BarEvidence::Full { .. }));
        assert!(matches!(BarEvidence::classify(ModelVariant::Rcsv, &full), BarEvidence::RangeClose { .. }));
        assert!(matches!(BarEvidence::classify(ModelVariant::Rasv, &full), BarEvidence::Range { .. }));
        assert!(matches!(BarEvidence::classify(ModelVariant::Stsv, &full), BarEvidence::Close { .. }));

        let no_low = ChloObservation::new(0.0, 0.01, None, Some(0.02));
        assert!(matches!(BarEvidence::classify(ModelVariant::Exsv, &no_low), BarEvidence::HighClose { .. }));
        assert!(matches!(BarEvidence::classify(ModelVariant::Rcsv, &no_low), BarEvidence::Close { .. }));
        assert_eq!(BarEvidence::classify(ModelVariant::Rasv, &no_low), BarEvidence::Flat);

        // low touching the open is unusable
        let touch = ChloObservation::full(0.0, 0.01, 0.0, 0.02);
        assert!(matches!(BarEvidence::classify(ModelVariant::Exsv, &touch), BarEvidence::HighClose { .. }));

        let flat = ChloObservation::full(0.3, 0.3, 0.3, 0.3);
        assert!(matches!(BarEvidence::classify(ModelVariant::Exsv, &flat), BarEvidence::Close { .. }));
        assert_eq!(BarEvidence::classify(ModelVariant::Rasv, &flat), BarEvidence::Flat);
        assert!(matches!(BarEvidence::classify(ModelVariant::Rcsv, &flat), BarEvidence::Close { .. }));
    }

    #[test]
    fn exsv_without_extremes_matches_stsv_exactly() {
        let obs = ChloObservation::close_only(0.1, 0.13);
        let ctl = SeriesControl::default();
        let a = BarEvidence::classify(ModelVariant::Exsv, &obs).log_likelihood(0.001, 0.02, &ctl);
        let b = BarEvidence::classify(ModelVariant::Stsv, &obs).log_likelihood(0.001, 0.02, &ctl);
        assert_eq!(a, b);
    }

    #[test]
    fn bad_particle_sigma_gives_zero_likelihood() {
        let e = BarEvidence::Close { open: 0.0, close: 0.0 };
        let ctl = SeriesControl::default();
        assert_eq!(e.log_likelihood(0.0, 0.0, &ctl).log_lik, f64::NEG_INFINITY);
        assert_eq!(e.log_likelihood(0.0, f64::INFINITY, &ctl).log_lik, f64::NEG_INFINITY);
    }
}

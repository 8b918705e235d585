//! OHLC bar files: `date,open,high,low,close` in price levels.

use std::path::Path;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::likelihood::ChloObservation;
use crate::simulator::SimDataset;

/// One row of a bar file. Prices are levels; high and low may be missing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarRecord {
    pub date: NaiveDate,
    pub open: f64,
    pub high: Option<f64>,
    pub low: Option<f64>,
    pub close: f64,
}

impl BarRecord {
    /// Checks prices and ordering. In lenient mode an offending extreme is
    /// dropped to missing; open and close problems are always errors.
    fn check(mut self, row: usize, strict: bool) -> Result<Self> {
        let err = |message: String| Error::Data { row, message };
        for (name, v) in [("open", self.open), ("close", self.close)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(err(format!("{name} price must be positive, got {v}")));
            }
        }
        let body_lo = self.open.min(self.close);
        let body_hi = self.open.max(self.close);
        let mut problems = Vec::new();
        if let Some(h) = self.high {
            if !(h.is_finite() && h > 0.0) {
                problems.push(format!("high price must be positive, got {h}"));
                self.high = None;
            } else if h < body_hi {
                problems.push(format!("high {h} below max(open, close) {body_hi}"));
                self.high = None;
            }
        }
        if let Some(l) = self.low {
            if !(l.is_finite() && l > 0.0) {
                problems.push(format!("low price must be positive, got {l}"));
                self.low = None;
            } else if l > body_lo {
                problems.push(format!("low {l} above min(open, close) {body_lo}"));
                self.low = None;
            }
        }
        if problems.is_empty() {
            return Ok(self);
        }
        let msg = problems.join("; ");
        if strict {
            Err(err(msg))
        } else {
            log::warn!("row {row}: {msg}; treating the extreme as missing");
            Ok(self)
        }
    }
}

/// Reads and validates a bar file, returning records sorted by date. Row
/// numbers in errors count the header as row 1.
pub fn parse_bars(path: &Path, strict: bool) -> Result<Vec<BarRecord>> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
    read_bars(file, strict)
}

pub fn read_bars<R: std::io::Read>(reader: R, strict: bool) -> Result<Vec<BarRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let expected = ["date", "open", "high", "low", "close"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Data {
            row: 1,
            message: format!("expected header {}, got {}", expected.join(","), headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec.position().map_or(0, |p| p.line() as usize);
        let bar: BarRecord = rec.deserialize(Some(&headers)).map_err(|e| Error::Data {
            row,
            message: format!("malformed row: {e}"),
        })?;
        out.push((row, bar.check(row, strict)?));
    }
    out.sort_by_key(|(_, b)| b.date);
    if let Some(w) = out.windows(2).find(|w| w[0].1.date == w[1].1.date) {
        return Err(Error::Data {
            row: w[1].0,
            message: format!("duplicate date {}", w[1].1.date),
        });
    }
    Ok(out.into_iter().map(|(_, b)| b).collect())
}

pub fn write_bars(path: &Path, bars: &[BarRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["date", "open", "high", "low", "close"])?;
    let opt = |v: Option<f64>| v.map(super::fmt_f64).unwrap_or_default();
    for b in bars {
        w.write_record([
            b.date.to_string(),
            super::fmt_f64(b.open),
            opt(b.high),
            opt(b.low),
            super::fmt_f64(b.close),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Log-price observations. With `weekend_effect` each bar starts from its
/// own open; otherwise from the previous close (the first bar keeps its open).
pub fn to_observations(bars: &[BarRecord], weekend_effect: bool) -> Vec<ChloObservation> {
    let mut prev_close: Option<f64> = None;
    bars.iter()
        .map(|b| {
            let open = match (weekend_effect, prev_close) {
                (false, Some(c)) => c,
                _ => b.open.ln(),
            };
            let close = b.close.ln();
            prev_close = Some(close);
            ChloObservation::new(open, close, b.low.map(f64::ln), b.high.map(f64::ln))
        })
        .collect()
}

/// Level-price records for a simulated dataset, one per week from `start`.
pub fn dataset_records(data: &SimDataset, start: NaiveDate) -> Vec<BarRecord> {
    data.bars
        .iter()
        .enumerate()
        .map(|(i, b)| BarRecord {
            date: start + Days::new(7 * i as u64),
            open: b.open.exp(),
            high: b.high.map(f64::exp),
            low: b.low.map(f64::exp),
            close: b.close.exp(),
        })
        .collect()
}

//! Signed series engine shared by the image-sum densities.
//!
//! Every density built from reflected Gaussian images is a sum of terms of the
//! form `c * exp(-d)` where the coefficient `c` may be negative. Terms are
//! grouped into blocks (for two-sided sums, block `k` holds the indices `±(k+1)`
//! or `k` and `-k`) and blocks are consumed outward until one contributes
//! less than `rel_tol` of the running total.
//!
//! Summation happens in units of `exp(-shift)` where `shift` is the smallest
//! exponent seen so far, so sums whose every term would underflow still
//! produce a usable logarithm.

use crate::error::{Error, Result};

/// Stopping rule for [`truncated_signed_series`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    rel_tol: f64,
    max_terms: u32,
}

impl SeriesControl {
    pub const DEFAULT_REL_TOL: f64 = 1e-12;
    pub const DEFAULT_MAX_TERMS: u32 = 100;

    pub fn new(rel_tol: f64, max_terms: u32) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "series rel_tol must lie in (0, 1), got {rel_tol}"
            )));
        }
        if max_terms == 0 {
            return Err(Error::InvalidParameter(
                "series max_terms must be at least 1".into(),
            ));
        }
        Ok(Self { rel_tol, max_terms })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_terms(&self) -> u32 {
        self.max_terms
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: Self::DEFAULT_REL_TOL,
            max_terms: Self::DEFAULT_MAX_TERMS,
        }
    }
}

/// One term `coef * exp(-exponent)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub exponent: f64,
}

impl Term {
    #[inline]
    pub fn new(coef: f64, exponent: f64) -> Self {
        Self { coef, exponent }
    }
}

/// Result of a truncated series: `scaled * exp(-shift)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub scaled: f64,
    pub shift: f64,
    /// Number of blocks consumed.
    pub terms_used: u32,
    pub converged: bool,
}

impl SeriesSum {
    /// The sum in linear space. Underflows to zero for very large shifts;
    /// use [`SeriesSum::ln`] when the magnitude matters.
    pub fn value(&self) -> f64 {
        if self.scaled == 0.0 {
            0.0
        } else {
            self.scaled * (-self.shift).exp()
        }
    }

    /// Natural log of the sum, or `None` when the sum is not strictly positive.
    pub fn ln(&self) -> Option<f64> {
        (self.scaled > 0.0).then(|| self.scaled.ln() - self.shift)
    }
}

/// Sums blocks `0, 1, 2, ...` produced by `block` until a block's absolute
/// contribution falls to `rel_tol * |total|` or `max_terms` blocks have been used.
pub fn truncated_signed_series<F, I>(mut block: F, ctl: &SeriesControl) -> SeriesSum
where
    F: FnMut(u32) -> I,
    I: IntoIterator<Item = Term>,
{
    let mut total = 0.0_f64;
    let mut shift = f64::INFINITY;
    let mut k = 0;
    loop {
        let mut block_abs = 0.0_f64;
        for term in block(k) {
            if term.coef == 0.0 || term.exponent == f64::INFINITY {
                continue;
            }
            if term.exponent < shift {
                if shift.is_finite() {
                    let rescale = (term.exponent - shift).exp();
                    total *= rescale;
                    block_abs *= rescale;
                }
                shift = term.exponent;
            }
            let v = term.coef * (shift - term.exponent).exp();
            total += v;
            block_abs += v.abs();
        }
        k += 1;
        if block_abs <= ctl.rel_tol * total.abs() {
            return SeriesSum {
                scaled: total,
                shift: if shift.is_finite() { shift } else { 0.0 },
                terms_used: k,
                converged: true,
            };
        }
        if k >= ctl.max_terms {
            return SeriesSum {
                scaled: total,
                shift: if shift.is_finite() { shift } else { 0.0 },
                terms_used: k,
                converged: false,
            };
        }
    }
}

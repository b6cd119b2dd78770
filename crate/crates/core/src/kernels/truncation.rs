//! Adaptive truncation of infinite contours from a fitted tail bound.
//!
//! The integrand is sampled near the current cut-off, a constant `c` is
//! fitted so that `|integrand| <= c * shape`, and the discarded tail is
//! bounded by `c * ∫ shape` beyond the cut-off on both ends.

use crate::oracle::composite_gl;
use crate::prelude::*;

/// Relative tail size at which extension stops.
pub(crate) const TAIL_TARGET: f64 = 1e-12;
/// Relative tail size above which a capped truncation is an error.
pub(crate) const TAIL_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Truncation {
    /// Cut-off (height for lines, length for rays).
    pub height: f64,
    /// Estimated absolute mass of both discarded tails.
    pub tail: f64,
    /// Accumulated absolute mass inside the cut-off, the reference scale.
    pub scale: f64,
}

impl Truncation {
    pub fn relative_tail(&self) -> f64 {
        if self.scale > 0.0 {
            self.tail / self.scale
        } else {
            self.tail
        }
    }
}

/// Chooses a cut-off in `[start, cap]`.
///
/// `log_sample(y)` is the log of the largest integrand modulus at distance
/// `y` along the contour (both ends); `log_shape(y)` is the log of the decay
/// bound up to a constant.
pub(crate) fn adapt_truncation(
    start: f64,
    cap: f64,
    log_sample: &dyn Fn(f64) -> f64,
    log_shape: &dyn Fn(f64) -> f64,
) -> Result<Truncation> {
    let start = start.min(cap);
    let scale = composite_gl(0.0, start, 0.25, 8, |y| log_sample(y).exp());
    let mut height = start;
    loop {
        let tail = tail_bound(height, log_sample, log_shape);
        let t = Truncation { height, tail, scale };
        if !(tail.is_finite()) {
            if height >= cap {
                return Err(Error::Truncation { tail, tolerance: TAIL_LIMIT * scale, truncation: height });
            }
        } else if tail <= TAIL_TARGET * scale {
            return Ok(t);
        } else if height >= cap {
            if tail <= TAIL_LIMIT * scale {
                return Ok(t);
            }
            return Err(Error::Truncation { tail, tolerance: TAIL_LIMIT * scale, truncation: height });
        }
        height = (height * 1.5).min(cap);
    }
}

fn tail_bound(height: f64, log_sample: &dyn Fn(f64) -> f64, log_shape: &dyn Fn(f64) -> f64) -> f64 {
    // Fit the constant on the last unit before the cut-off.
    let log_c = [1.0, 0.5, 0.0]
        .iter()
        .map(|d| (height - d).max(height * 0.5))
        .map(|y| log_sample(y) - log_shape(y))
        .fold(f64::NEG_INFINITY, f64::max);
    let anchor = log_shape(height);
    // Integrate the shape relative to its value at the cut-off to stay in range.
    let rel = composite_gl(height, height + 60.0, 0.5, 8, |y| (log_shape(y) - anchor).exp());
    2.0 * (log_c + anchor).exp() * rel
}

//! Numerical check of the decay hypothesis on `F`:
//! `∫_{±ℓ_{δ2}} e^{π(N/2−1)|Im w|} |Im w|^κ |F(w)| |dw| < ∞` and the same
//! weight integrated over the horizontal segment `−δ1 + iM → δ2 + iM`
//! tending to zero as `|M|` grows.

use super::{KernelParams, SymbolF};
use crate::oracle::composite_gl;
use crate::prelude::*;
use core::f64::consts::PI;

/// Exponents `κ` that are checked.
pub const DECAY_KAPPAS: [u32; 3] = [0, 1, 2];
/// Heights of the horizontal segments.
pub const SEGMENT_HEIGHTS: [f64; 3] = [10.0, 20.0, 40.0];
/// Target for the segment integral at the last height.
pub const SEGMENT_TARGET: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LineIntegral {
    /// Real part of the vertical line.
    pub re: f64,
    pub kappa: u32,
    /// Integral up to the truncation height.
    pub value: f64,
    /// Share of `value` coming from the upper half of the height range.
    pub tail_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SegmentIntegral {
    pub height: f64,
    pub kappa: u32,
    /// Larger of the integrals at `+M` and `−M`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayReport {
    pub lines: Vec<LineIntegral>,
    pub segments: Vec<SegmentIntegral>,
    /// All line integrals are finite with a negligible upper tail.
    pub lines_finite: bool,
    /// For each `κ`, segment integrals decrease in `M` and end below [`SEGMENT_TARGET`].
    pub segments_vanish: bool,
}

impl DecayReport {
    pub fn passed(&self) -> bool {
        self.lines_finite && self.segments_vanish
    }
}

fn log_weight(symbol: &SymbolF, big_n: usize, kappa: u32, w: C64) -> Result<f64> {
    let y = w.im.abs();
    let lk = if kappa == 0 {
        0.0
    } else if y == 0.0 {
        f64::NEG_INFINITY
    } else {
        kappa as f64 * y.ln()
    };
    Ok(PI * (big_n as f64 / 2.0 - 1.0) * y + lk + symbol.ln_eval(w)?.re)
}

/// Evaluates the decay integrals on lines `Re w = ±δ2` up to `height` and on
/// the segments at [`SEGMENT_HEIGHTS`].
pub fn decay_diagnostics(symbol: &SymbolF, big_n: usize, kp: &KernelParams, height: f64) -> Result<DecayReport> {
    symbol.validate()?;
    kp.validate()?;
    if !(height > 0.0) {
        return Err(Error::domain(format!("height must be positive, got {height}")));
    }
    if !(symbol.pole_floor() > kp.delta2) {
        return Err(Error::domain(format!("poles of F must lie right of delta2 = {}", kp.delta2)));
    }
    let mut failure = None;
    let mut weight = |kappa: u32, w: C64| match log_weight(symbol, big_n, kappa, w) {
        Ok(l) => l.exp(),
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let mut lines = Vec::new();
    for re in [kp.delta2, -kp.delta2] {
        for kappa in DECAY_KAPPAS {
            let half = |lo: f64, hi: f64, weight: &mut dyn FnMut(u32, C64) -> f64| {
                composite_gl(lo, hi, 0.5, 16, |y| weight(kappa, C64::new(re, y)) + weight(kappa, C64::new(re, -y)))
            };
            let lower = half(0.0, height / 2.0, &mut weight);
            let upper = half(height / 2.0, height, &mut weight);
            let value = lower + upper;
            lines.push(LineIntegral { re, kappa, value, tail_fraction: if value > 0.0 { upper / value } else { 0.0 } });
        }
    }
    let mut segments = Vec::new();
    for &m in &SEGMENT_HEIGHTS {
        for kappa in DECAY_KAPPAS {
            let at = |sign: f64, weight: &mut dyn FnMut(u32, C64) -> f64| {
                composite_gl(-kp.delta1, kp.delta2, 0.1, 16, |x| weight(kappa, C64::new(x, sign * m)))
            };
            let value = at(1.0, &mut weight).max(at(-1.0, &mut weight));
            segments.push(SegmentIntegral { height: m, kappa, value });
        }
    }
    if let Some(e) = failure {
        return Err(e);
    }
    let lines_finite = lines.iter().all(|l| l.value.is_finite() && l.tail_fraction < 1e-6);
    let segments_vanish = DECAY_KAPPAS.iter().all(|&k| {
        let vals: Vec<f64> = segments.iter().filter(|s| s.kappa == k).map(|s| s.value).collect();
        vals.windows(2).all(|p| p[1] < p[0]) && vals.last().is_some_and(|v| *v < SEGMENT_TARGET)
    });
    Ok(DecayReport { lines, segments, lines_finite, segments_vanish })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_gamma_symbol_satisfies_the_hypothesis() {
        for (n, big_n) in [(1, 1), (2, 2), (3, 2), (4, 3)] {
            let symbol = SymbolF::log_gamma(1.0, vec![1.0; n]).unwrap();
            let kp = KernelParams::default_for(vec![0.0; big_n]).unwrap();
            let r = decay_diagnostics(&symbol, big_n, &kp, 60.0).unwrap();
            assert!(r.passed(), "n = {n}, N = {big_n}: {r:?}");
            assert_eq!(r.lines.len(), 6);
            assert_eq!(r.segments.len(), 9);
        }
    }

    #[test]
    fn too_many_columns_fail() {
        // n < N: the weight grows, the segment integrals do not vanish.
        let symbol = SymbolF::log_gamma(1.0, vec![1.0]).unwrap();
        let kp = KernelParams::default_for(vec![0.0; 4]).unwrap();
        let r = decay_diagnostics(&symbol, 4, &kp, 60.0).unwrap();
        assert!(!r.segments_vanish);
        assert!(!r.passed());
    }

    #[test]
    fn semi_discrete_symbol_decays() {
        let symbol = SymbolF::semi_discrete(1.0, 1.0).unwrap();
        let kp = KernelParams::new(0.15, 0.5, vec![0.0; 3]).unwrap();
        assert!(decay_diagnostics(&symbol, 3, &kp, 30.0).unwrap().passed());
    }
}

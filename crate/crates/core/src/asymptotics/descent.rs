//! Sampled versions of the local and global descent inequalities for `G`
//! along `γC_f` (for `v`) and `C_{<,n}` (for `w`).
//!
//! Each inequality has the shape `L(z) ≤ −c·D(z)` or `L(z) ≥ c·D(z)` with
//! `L = Re[G(z) − G(t̄)]`. The report gives the largest `c` compatible with
//! every sample; a non-positive value means the inequality fails for all
//! positive constants, and the worst violation at `c = 0⁺` is recorded.

use super::{critical_constants, g_exponent};
use crate::contour::descent_arc_radius;
use crate::prelude::*;
use core::f64::consts::PI;

/// Length of the sampled part of `C_{<,n}` beyond the distance-`γ` ball.
const LINE_REACH: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum DescentPart {
    /// Straight segments of `γC_f`: `L ≤ Re[−c₁γ³(v − t̄)³]`.
    Segment,
    /// Circular arc of `γC_f`: `L ≤ −c`.
    Arc,
    /// `C_{<,n}` within distance `γ` of `t̄`: `L ≥ Re[−c₂γ³(w − t̄)³]`.
    Ball,
    /// `C_{<,n}` beyond distance `γ`: `L ≥ Re[c w / γ]`.
    Line,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DescentSample {
    pub part: DescentPart,
    pub re: f64,
    pub im: f64,
    /// `Re[G(z) − G(t̄)]`.
    pub lhs: f64,
    /// The factor multiplying the constant on the right-hand side.
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DescentReport {
    pub gamma: f64,
    pub n: u64,
    pub samples_per_segment: usize,
    pub c1: f64,
    pub c2: f64,
    pub c_arc: f64,
    pub c_line: f64,
    /// Worst violation per part, in the order segment, arc, ball, line;
    /// zero when the fitted constant is positive.
    pub violations: [f64; 4],
    pub samples: Vec<DescentSample>,
}

impl DescentReport {
    /// Every fitted constant is positive.
    pub fn constants_positive(&self) -> bool {
        self.c1 > 0.0 && self.c2 > 0.0 && self.c_arc > 0.0 && self.c_line > 0.0
    }

    /// Positive constants and no violation at any sample.
    pub fn all_hold(&self) -> bool {
        self.constants_positive() && self.violations.iter().all(|&v| v == 0.0)
    }
}

/// Largest `c` allowed by the samples with positive scale in `lhs ≤ −c·scale`
/// (`upper = true`) or `lhs ≥ c·scale`, and the worst violation of the
/// inequality at `max(c, 0)` over all samples.
fn fit(samples: &[DescentSample], upper: bool) -> (f64, f64) {
    // Normalize both cases to `s·lhs ≥ c·scale` with s = ∓1.
    let s = if upper { -1.0 } else { 1.0 };
    let c = samples.iter().filter(|x| x.scale > 0.0).map(|x| s * x.lhs / x.scale).fold(f64::INFINITY, f64::min);
    let c = if c.is_finite() { c } else { 0.0 };
    let violation = samples.iter().map(|x| c.max(0.0) * x.scale - s * x.lhs).fold(0.0, f64::max);
    (c, violation)
}

/// Samples `G` on the descent contours at `samples_per_segment` points per
/// piece and fits the four constants.
pub fn descent_check(gamma: f64, n: u64, samples_per_segment: usize) -> Result<DescentReport> {
    let k = critical_constants(gamma)?;
    if n == 0 || samples_per_segment < 2 {
        return Err(Error::domain("descent check needs n >= 1 and at least two samples per segment"));
    }
    let t = C64::new(k.t_bar, 0.0);
    let g_t = g_exponent(t, gamma)?;
    let lhs = |z: C64| -> Result<f64> { Ok((g_exponent(z, gamma)? - g_t).re) };
    let m = samples_per_segment;
    let frac = |i: usize| (i as f64 + 0.5) / m as f64;
    let mut samples = Vec::new();
    let mut push = |part, z: C64, scale: f64| -> Result<()> {
        samples.push(DescentSample { part, re: z.re, im: z.im, lhs: lhs(z)?, scale });
        Ok(())
    };

    // Segments from t̄ to t̄ + γ e^{±2πi/3}; the point t̄ itself is excluded.
    for sign in [1.0, -1.0] {
        for i in 0..m {
            let v = t + C64::from_polar(gamma * frac(i), sign * 2.0 * PI / 3.0);
            push(DescentPart::Segment, v, (gamma.powi(3) * (v - t).powi(3)).re)?;
        }
    }
    // Arc about the origin of radius γ|1/2 + e^{2πi/3}|, through the negative axis.
    let radius = gamma * descent_arc_radius();
    let top = (t + C64::from_polar(gamma, 2.0 * PI / 3.0)).arg();
    for i in 0..=m {
        let phi = top + (2.0 * (PI - top)) * i as f64 / m as f64;
        push(DescentPart::Arc, C64::from_polar(radius, phi), 1.0)?;
    }
    // Rays of C_{<,n} from t̄ + n^{-1/3} at angles ±π/3.
    let base = t + (n as f64).powf(-1.0 / 3.0);
    let ball_reach = {
        // Distance along the ray at which |w − t̄| = γ.
        let d = base.re - t.re;
        let b = d * (PI / 3.0).cos();
        (-b + (b * b - d * d + gamma * gamma).max(0.0).sqrt()).max(0.0)
    };
    for sign in [1.0, -1.0] {
        let dir = C64::from_polar(1.0, sign * PI / 3.0);
        for i in 0..m {
            let w = base + dir * (ball_reach * frac(i));
            if (w - t).norm() < gamma {
                push(DescentPart::Ball, w, (-(gamma.powi(3)) * (w - t).powi(3)).re)?;
            }
        }
        // Geometric spacing beyond the ball out to LINE_REACH.
        let start = ball_reach.max(1e-12);
        let ratio = (LINE_REACH / start).max(1.0).ln();
        for i in 0..m {
            let s = start * (ratio * i as f64 / (m - 1) as f64).exp();
            let w = base + dir * s;
            if (w - t).norm() >= gamma {
                push(DescentPart::Line, w, w.re / gamma)?;
            }
        }
    }

    let pick = |part| samples.iter().copied().filter(|s: &DescentSample| s.part == part).collect::<Vec<_>>();
    let (c1, v1) = fit(&pick(DescentPart::Segment), true);
    let (c_arc, v_arc) = fit(&pick(DescentPart::Arc), true);
    let (c2, v2) = fit(&pick(DescentPart::Ball), false);
    let (c_line, v_line) = fit(&pick(DescentPart::Line), false);
    Ok(DescentReport {
        gamma,
        n,
        samples_per_segment,
        c1,
        c2,
        c_arc,
        c_line,
        violations: [v1, v_arc, v2, v_line],
        samples,
    })
}

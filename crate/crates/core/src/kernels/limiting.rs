//! The cubic limiting kernel and the Tracy-Widom distribution function.
//!
//! `K(ṽ, ṽ') = (1/2πi) ∫ dw̃ 1/(ṽ − w̃) · e^{−cṽ³ + rṽ} / e^{−cw̃³ + rw̃} · 1/(w̃ − ṽ')`
//! with `ṽ` on the rays `e^{±2πi/3} R_+` and `w̃` on `shift + e^{±πi/3} R_+`.
//! `c = ḡ_γ/6` for the limit of `K_u`; `c = 1/3` gives `F_GUE(r) = det(I + K)`.

use super::truncation::{adapt_truncation, Truncation};
use crate::asymptotics::critical_constants;
use crate::contour::{discretize_graded, limiting_contours, PanelGrading};
use crate::fredholm::{nystrom_det, Kernel, KernelOperator};
use crate::linalg::CMatrix;
use crate::prelude::*;
use crate::quadrature::QuadratureGrid;
use crate::specfun::is_finite;
use core::f64::consts::FRAC_PI_3;

/// Panels on the rays: fine near the corner, at most one unit wide.
const RAY_GRADING: PanelGrading = PanelGrading { first: 0.25, growth: 1.4, max: 1.0 };
const START_LENGTH: f64 = 3.0;

#[derive(Debug, Clone)]
pub struct LimitingKernel {
    c: f64,
    r: f64,
    grid: QuadratureGrid,
    truncation: Truncation,
}

impl LimitingKernel {
    /// Builds the `w̃` grid with `order` nodes per panel. The ray length is
    /// chosen adaptively up to `truncation`, judged at the `probes`.
    pub fn new(c: f64, r: f64, shift: f64, truncation: f64, order: usize, probes: &[C64]) -> Result<Self> {
        if !(c > 0.0) || !r.is_finite() {
            return Err(Error::domain(format!("limiting kernel needs c > 0 and finite r, got c = {c}, r = {r}")));
        }
        let exponent = move |z: C64| -c * z * z * z + r * z;
        let ray = move |y: f64, s: f64| C64::new(shift, 0.0) + C64::from_polar(y, s * FRAC_PI_3);
        let log_shape = |y: f64| [1.0, -1.0].iter().map(|&s| -exponent(ray(y, s)).re).fold(f64::NEG_INFINITY, f64::max);
        let log_sample = |y: f64| {
            let mut best = f64::NEG_INFINITY;
            for s in [1.0, -1.0] {
                let w = ray(y, s);
                for &v in probes {
                    for &vp in probes {
                        let m = (exponent(v) - exponent(w)).re - (v - w).norm().ln() - (w - vp).norm().ln();
                        best = best.max(m);
                    }
                }
            }
            best
        };
        let trunc = adapt_truncation(START_LENGTH, truncation, &log_sample, &log_shape)?;
        let (_, w_contour) = limiting_contours(shift, trunc.height)?;
        let grid = discretize_graded(&w_contour, order, &RAY_GRADING)?;
        Ok(Self { c, r, grid, truncation: trunc })
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    fn exponent(&self, z: C64) -> C64 {
        -self.c * z * z * z + self.r * z
    }
}

impl Kernel for LimitingKernel {
    fn evaluate(&self, v: C64, vp: C64) -> Result<C64> {
        let ev = self.exponent(v);
        let mut acc = C64::new(0.0, 0.0);
        for (w, wt) in self.grid.iter() {
            acc += wt * (ev - self.exponent(w)).exp() / ((v - w) * (w - vp));
        }
        if !is_finite(acc) {
            return Err(Error::Pole(format!("limiting kernel singular at ({v}, {vp})")));
        }
        Ok(acc)
    }

    fn matrix(&self, nodes: &[C64]) -> Result<CMatrix> {
        let ws = self.grid.nodes();
        let wts = self.grid.weights();
        let ew: Vec<C64> = ws.iter().map(|&w| self.exponent(w)).collect();
        let a = CMatrix::from_fn(nodes.len(), ws.len(), |j, k| {
            let v = nodes[j];
            wts[k] * (self.exponent(v) - ew[k]).exp() / (v - ws[k])
        });
        let b = CMatrix::from_fn(ws.len(), nodes.len(), |k, l| (ws[k] - nodes[l]).inv());
        let m = a.matmul(&b);
        if !m.is_finite() {
            return Err(Error::Singularity { row: 0, col: 0 });
        }
        Ok(m)
    }
}

/// `K(ṽ, ṽ')` with `c = ḡ_γ/6`.
pub fn limiting_kernel_eval(
    v: C64,
    vp: C64,
    r: f64,
    gamma: f64,
    shift: f64,
    truncation: f64,
    order: usize,
) -> Result<C64> {
    let g_bar = critical_constants(gamma)?.g_bar;
    LimitingKernel::new(g_bar / 6.0, r, shift, truncation, order, &[v, vp])?.evaluate(v, vp)
}

/// Discretization of the Tracy-Widom determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TwSettings {
    /// Gauss-Legendre nodes per panel on both contours.
    pub order: usize,
    /// Maximal ray length.
    pub truncation: f64,
    /// Offset of the `w̃` contour from the origin.
    pub shift: f64,
}

impl Default for TwSettings {
    fn default() -> Self {
        Self { order: 16, truncation: 8.0, shift: 1.0 }
    }
}

/// `F_GUE(r)` with the default shift.
pub fn tw_cdf(r: f64, order: usize, truncation: f64) -> Result<f64> {
    tw_cdf_with(r, &TwSettings { order, truncation, ..TwSettings::default() })
}

/// `F_GUE(r) = det(I + K)` with `c = 1/3`, clipped to `[0, 1]`.
pub fn tw_cdf_with(r: f64, s: &TwSettings) -> Result<f64> {
    let (v_contour, _) = limiting_contours(s.shift, s.truncation)?;
    let probes: Vec<C64> = [0.0, 0.5, 1.5, 3.0]
        .iter()
        .flat_map(|&t| [C64::from_polar(t, 2.0 * FRAC_PI_3), C64::from_polar(t, -2.0 * FRAC_PI_3)])
        .collect();
    let kernel = LimitingKernel::new(1.0 / 3.0, r, s.shift, s.truncation, s.order, &probes)?;
    let op = KernelOperator::new(kernel, v_contour).with_grading(RAY_GRADING);
    let det = nystrom_det(&op, s.order)?;
    if det.value.im.abs() > 1e-6 {
        return Err(Error::Convergence(format!("F_GUE({r}) has imaginary part {}", det.value.im)));
    }
    Ok(det.value.re.clamp(0.0, 1.0))
}

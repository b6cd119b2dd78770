//! The semi-discrete (O'Connell-Yor) polymer kernel, written in `s = w − v`.
//!
//! `K(v, v') = (1/2πi) ∫_{ℓ_{δ2}} Γ(−s)Γ(1+s) Π_m Γ(v−a_m)/Γ(s+v−a_m)
//!             · u^s e^{vts + ts²/2} / (v + s − v') ds` on `C_{δ1}`, `δ1 < δ2/2`.

use super::ku::circle_probes;
use super::truncation::{adapt_truncation, Truncation};
use super::{line_grid, project_real, sum_log_gamma_shifted, KernelParams, LaplaceEstimate, LaplaceMethod};
use crate::contour::circle_contour;
use crate::fredholm::{nystrom_det, Kernel, KernelOperator};
use crate::linalg::CMatrix;
use crate::parallel::map_indexed;
use crate::prelude::*;
use crate::quadrature::QuadratureGrid;
use crate::specfun::{is_finite, pi_over_sin_pi};
use core::f64::consts::PI;

const START_HEIGHT: f64 = 8.0;

#[derive(Debug, Clone)]
pub struct SemiDiscreteKernel {
    t: f64,
    ln_u: f64,
    a: Vec<f64>,
    grid: QuadratureGrid,
    truncation: Truncation,
}

impl SemiDiscreteKernel {
    pub fn new(t: f64, a: Vec<f64>, u: f64, kp: &KernelParams) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::domain(format!("t must be positive, got {t}")));
        }
        if !(u > 0.0) || !u.is_finite() {
            return Err(Error::domain(format!("u must be positive, got {u}")));
        }
        if a.is_empty() {
            return Err(Error::domain("the drift vector must be non-empty"));
        }
        let kp = KernelParams { a: a.clone(), ..kp.clone() };
        kp.validate()?;
        if !(kp.delta1 < kp.delta2 / 2.0) {
            return Err(Error::domain(format!("delta1 must be < delta2/2, got {} and {}", kp.delta1, kp.delta2)));
        }
        let mut k = Self {
            t,
            ln_u: u.ln(),
            a,
            grid: QuadratureGrid::new(vec![C64::new(0.0, 0.0); 2], vec![C64::new(0.0, 0.0); 2])?,
            truncation: Truncation { height: 0.0, tail: 0.0, scale: 0.0 },
        };
        let probes = circle_probes(kp.delta1);
        let log_sample = |y: f64| {
            let mut best = f64::NEG_INFINITY;
            for s in [C64::new(kp.delta2, y), C64::new(kp.delta2, -y)] {
                for &v in &probes {
                    let Ok(l) = k.ln_factor(v, s) else {
                        return f64::INFINITY;
                    };
                    for &vp in &probes {
                        best = best.max(l.re - (v + s - vp).norm().ln());
                    }
                }
            }
            best
        };
        let big_n = k.a.len() as f64;
        let log_shape = |y: f64| {
            -0.5 * t * y * y + (PI * (big_n / 2.0 - 1.0) + t * kp.delta1) * y.abs()
                - (big_n * kp.delta2 + 1.0) * y.abs().max(1.0).ln()
        };
        let trunc = adapt_truncation(START_HEIGHT, kp.inner_truncation, &log_sample, &log_shape)?;
        k.grid = line_grid(kp.delta2, trunc.height, kp.inner_order, k.ln_u)?;
        k.truncation = trunc;
        Ok(k)
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    /// Log of everything except `π/sin(−πs)` and `1/(v+s−v')`.
    fn ln_factor(&self, v: C64, s: C64) -> Result<C64> {
        Ok(sum_log_gamma_shifted(v, &self.a, 0.0)? - sum_log_gamma_shifted(v + s, &self.a, 0.0)?
            + s * self.ln_u
            + self.t * v * s
            + 0.5 * self.t * s * s)
    }

    /// `Φ(v, s_k) = W_k Γ(−s)Γ(1+s) · exp(ln_factor)` for all inner nodes.
    fn row(&self, v: C64) -> Result<Vec<C64>> {
        self.grid.iter().map(|(s, wt)| Ok(wt * pi_over_sin_pi(-s) * self.ln_factor(v, s)?.exp())).collect()
    }
}

impl Kernel for SemiDiscreteKernel {
    fn evaluate(&self, v: C64, vp: C64) -> Result<C64> {
        let phi = self.row(v)?;
        Ok(self.grid.nodes().iter().zip(&phi).map(|(&s, &p)| p / (v + s - vp)).sum())
    }

    fn matrix(&self, nodes: &[C64]) -> Result<CMatrix> {
        let m = nodes.len();
        let rows = map_indexed(m, |j| -> Result<Vec<C64>> {
            let v = nodes[j];
            let phi = self.row(v)?;
            Ok(nodes
                .iter()
                .map(|&vp| self.grid.nodes().iter().zip(&phi).map(|(&s, &p)| p / (v + s - vp)).sum())
                .collect())
        });
        let mut flat = Vec::with_capacity(m * m);
        for (j, r) in rows.into_iter().enumerate() {
            let r = r?;
            if let Some(l) = r.iter().position(|z| !is_finite(*z)) {
                return Err(Error::Singularity { row: j, col: l });
            }
            flat.extend(r);
        }
        Ok(CMatrix::from_rows(m, m, flat))
    }
}

/// `E[exp(−u Z^N(t))]` for the semi-discrete polymer with drifts `a`, as the
/// Nyström determinant on `C_{δ1}` with 64 trapezoid nodes.
pub fn semi_discrete_laplace(big_n: usize, t: f64, a: &[f64], u: f64, kp: &KernelParams) -> Result<LaplaceEstimate> {
    if big_n == 0 || a.len() != big_n {
        return Err(Error::domain(format!("need N >= 1 drifts, got N = {big_n} and {} drifts", a.len())));
    }
    let kernel = SemiDiscreteKernel::new(t, a.to_vec(), u, kp)?;
    let trunc = kernel.truncation();
    let op = KernelOperator::new(kernel, circle_contour(kp.delta1, C64::new(0.0, 0.0))?);
    let det = nystrom_det(&op, 64)?;
    let value = project_real(det.value, LaplaceMethod::Nystrom)?;
    Ok(LaplaceEstimate {
        value,
        method: LaplaceMethod::Nystrom,
        error_estimate: det.convergence_estimate + trunc.tail,
        imag_residual: det.value.im,
        grid_order: Some(64),
        truncation: Some(trunc.height),
    })
}

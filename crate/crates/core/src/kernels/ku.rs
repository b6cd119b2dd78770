//! The kernel `K_u` on `C_{δ1}` and its Nyström determinant.

use super::truncation::{adapt_truncation, Truncation};
use super::{
    check_log_gamma_hypotheses, line_grid, project_real, sum_log_gamma_shifted, KernelParams, LaplaceEstimate,
    LaplaceMethod, SymbolF,
};
use crate::contour::circle_contour;
use crate::fredholm::{nystrom_det, Kernel, KernelOperator};
use crate::linalg::CMatrix;
use crate::parallel::map_indexed;
use crate::polymer::PolymerParams;
use crate::prelude::*;
use crate::quadrature::QuadratureGrid;
use crate::specfun::{is_finite, pi_over_sin_pi, sin_pi, POLE_TOLERANCE};
use core::f64::consts::PI;

/// Height where truncation search starts.
pub(crate) const START_HEIGHT: f64 = 8.0;

/// `K_u(v, v') = (1/2πi) ∫_{ℓ_{δ2}} π/sin(π(v−w)) · H(w)/H(v) · 1/(w−v') dw`
/// with `H(z) = F(z) / Π Γ(z − a_m)`, on a fixed truncated inner grid.
#[derive(Debug, Clone)]
pub struct KuKernel {
    symbol: SymbolF,
    a: Vec<f64>,
    delta2: f64,
    grid: QuadratureGrid,
    ln_h_w: Vec<C64>,
    truncation: Truncation,
}

impl KuKernel {
    /// Builds the inner grid, choosing the truncation from the integrand at
    /// the probe points (used as both `v` and `v'`).
    pub fn new(symbol: SymbolF, kp: &KernelParams, probes: &[C64]) -> Result<Self> {
        kp.validate()?;
        symbol.validate()?;
        if !(symbol.pole_floor() > kp.delta2) {
            return Err(Error::domain(format!("poles of F must lie right of delta2 = {}", kp.delta2)));
        }
        let mut k = Self {
            symbol,
            a: kp.a.clone(),
            delta2: kp.delta2,
            grid: QuadratureGrid::new(vec![C64::new(0.0, 0.0); 2], vec![C64::new(0.0, 0.0); 2])?,
            ln_h_w: Vec::new(),
            truncation: Truncation { height: 0.0, tail: 0.0, scale: 0.0 },
        };
        let probe_h: Vec<(C64, C64)> = probes.iter().map(|&v| Ok((v, k.ln_h(v)?))).collect::<Result<_>>()?;
        let log_sample = |y: f64| {
            let mut best = f64::NEG_INFINITY;
            for w in [C64::new(k.delta2, y), C64::new(k.delta2, -y)] {
                let Ok(lw) = k.ln_h(w) else {
                    return f64::INFINITY;
                };
                for &(v, lv) in &probe_h {
                    for &(vp, _) in &probe_h {
                        let m = pi_over_sin_pi(v - w).norm().ln() + (lw - lv).re - (w - vp).norm().ln();
                        best = best.max(m);
                    }
                }
            }
            best
        };
        let log_shape = |y: f64| k.log_decay_shape(y);
        let trunc = adapt_truncation(START_HEIGHT, kp.inner_truncation, &log_sample, &log_shape)?;
        let grid = line_grid(kp.delta2, trunc.height, kp.inner_order, k.symbol.u.ln())?;
        let ln_h_w = grid.nodes().iter().map(|&w| k.ln_h(w)).collect::<Result<Vec<_>>>()?;
        k.grid = grid;
        k.ln_h_w = ln_h_w;
        k.truncation = trunc;
        Ok(k)
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn inner_grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    /// `ln F(z) − Σ ln Γ(z − a_m)`.
    fn ln_h(&self, z: C64) -> Result<C64> {
        Ok(self.symbol.ln_eval(z)? - sum_log_gamma_shifted(z, &self.a, 0.0)?)
    }

    pub(crate) fn log_decay_shape(&self, y: f64) -> f64 {
        log_decay_shape(&self.symbol, &self.a, self.delta2, y)
    }

    fn check_separation(v: C64, vp: C64, w: C64) -> Result<()> {
        if sin_pi(v - w).norm() < POLE_TOLERANCE || (w - vp).norm() < POLE_TOLERANCE {
            return Err(Error::Pole(format!("K_u integrand singular at v = {v}, v' = {vp}, w = {w}")));
        }
        Ok(())
    }

    /// Integrand of the inner `w` integral (without the `1/(2πi)`).
    pub fn integrand(&self, v: C64, vp: C64, w: C64) -> Result<C64> {
        Self::check_separation(v, vp, w)?;
        Ok(pi_over_sin_pi(v - w) * (self.ln_h(w)? - self.ln_h(v)?).exp() / (w - vp))
    }
}

impl Kernel for KuKernel {
    fn evaluate(&self, v: C64, vp: C64) -> Result<C64> {
        let lv = self.ln_h(v)?;
        let mut acc = C64::new(0.0, 0.0);
        for ((&w, &wt), &lw) in self.grid.nodes().iter().zip(self.grid.weights()).zip(&self.ln_h_w) {
            Self::check_separation(v, vp, w)?;
            acc += wt * pi_over_sin_pi(v - w) * (lw - lv).exp() / (w - vp);
        }
        Ok(acc)
    }

    /// `K = A B` with `A(v, w) = W π/sin(π(v−w)) H(w)/H(v)` and `B(w, v') = 1/(w−v')`.
    fn matrix(&self, nodes: &[C64]) -> Result<CMatrix> {
        let m = nodes.len();
        let p = self.grid.len();
        let ws = self.grid.nodes();
        let wts = self.grid.weights();
        let rows = map_indexed(m, |j| -> Result<Vec<C64>> {
            let v = nodes[j];
            let lv = self.ln_h(v)?;
            (0..p)
                .map(|k| {
                    Self::check_separation(v, v, ws[k])?;
                    Ok(wts[k] * pi_over_sin_pi(v - ws[k]) * (self.ln_h_w[k] - lv).exp())
                })
                .collect()
        });
        let mut a = Vec::with_capacity(m * p);
        for r in rows {
            a.extend(r?);
        }
        let a = CMatrix::from_rows(m, p, a);
        let b = CMatrix::from_fn(p, m, |k, l| (ws[k] - nodes[l]).inv());
        let k = a.matmul(&b);
        if !k.is_finite() {
            for j in 0..m {
                for l in 0..m {
                    if !is_finite(k[(j, l)]) {
                        return Err(Error::Singularity { row: j, col: l });
                    }
                }
            }
        }
        Ok(k)
    }
}

/// Log of the decay bound `e^{π(N/2−1)|y|} |y|^{−Nη−1} |F(δ2 + iy)|`,
/// with `η = min_m(δ2 − a_m) − 1/2` from `|Γ(x+iy)| ~ |y|^{x−1/2} e^{−π|y|/2}`.
pub(crate) fn log_decay_shape(symbol: &SymbolF, a: &[f64], delta2: f64, y: f64) -> f64 {
    let n_cols = a.len() as f64;
    let a_max = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let eta = delta2 - a_max - 0.5;
    let y = y.abs().max(1.0);
    let lf = [y, -y]
        .iter()
        .filter_map(|&s| symbol.ln_eval(C64::new(delta2, s)).ok())
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    PI * (n_cols / 2.0 - 1.0) * y - (n_cols * eta + 1.0) * y.ln() + lf
}

/// `K_u(v, v')` for a single pair of points.
pub fn eval_ku(v: C64, vp: C64, symbol: &SymbolF, kp: &KernelParams) -> Result<C64> {
    KuKernel::new(symbol.clone(), kp, &[v, vp])?.evaluate(v, vp)
}

/// Probe points for truncation: eight points on `C_{δ1}`.
pub(crate) fn circle_probes(radius: f64) -> Vec<C64> {
    (0..8).map(|k| C64::from_polar(radius, PI * (2 * k + 1) as f64 / 8.0)).collect()
}

/// `E[exp(-u Z)] = det(I + K_u)` on `C_{δ1}` by Nyström with `outer_order`
/// trapezoid nodes, compared with half as many.
pub fn laplace_via_nystrom(
    params: &PolymerParams,
    u: f64,
    kp: &KernelParams,
    outer_order: usize,
) -> Result<LaplaceEstimate> {
    let kp = kp.for_polymer(params)?;
    check_log_gamma_hypotheses(params, &kp)?;
    let symbol = SymbolF::log_gamma(u, params.alphas.clone())?;
    let kernel = KuKernel::new(symbol, &kp, &circle_probes(kp.delta1))?;
    let trunc = kernel.truncation();
    let op = KernelOperator::new(kernel, circle_contour(kp.delta1, C64::new(0.0, 0.0))?);
    let det = nystrom_det(&op, outer_order)?;
    let value = project_real(det.value, LaplaceMethod::Nystrom)?;
    Ok(LaplaceEstimate {
        value,
        method: LaplaceMethod::Nystrom,
        error_estimate: det.convergence_estimate + trunc.tail,
        imag_residual: det.value.im,
        grid_order: Some(outer_order),
        truncation: Some(trunc.height),
    })
}

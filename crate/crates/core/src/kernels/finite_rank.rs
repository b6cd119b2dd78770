//! The N x N finite-rank form `det[δ_ij + (1/2πi) ∫_{ℓ_{δ2}} f_i g_j]`.
//!
//! Two bases span the same rank-N operator `K̃` on `ℓ_{δ2}`:
//!
//! * `Residue`: `f_i = 1/(w − a_i)`, `g_i = C_i G(w) π/sin(π(a_i − w))`,
//!   obtained from the residues at each `a_i`. It needs pairwise distinct
//!   `a_i` and loses accuracy as they approach each other.
//! * `Newton`: divided differences of `1/(w − v)` at the nodes `a_1..a_N`,
//!   `f̂_p = 1/Π_{m ≤ p}(w − a_m)` and
//!   `ĝ_p(w) = G(w) (1/2πi) ∮_{C_{δ1}} R(v) π/sin(π(v − w)) / Π_{m ≥ p}(v − a_m) dv`
//!   with `R = 1/G · Π(v − a_m)` analytic inside `C_{δ1}`. Valid for any `a`,
//!   tied or not.

use super::ku::{log_decay_shape, START_HEIGHT};
use super::truncation::adapt_truncation;
use super::{
    check_log_gamma_hypotheses, line_grid, project_real, sum_log_gamma_shifted, KernelParams, LaplaceEstimate,
    LaplaceMethod, SymbolF,
};
use crate::contour::{circle_contour, discretize};
use crate::linalg::CMatrix;
use crate::polymer::PolymerParams;
use crate::prelude::*;
use crate::quadrature::QuadratureGrid;
use crate::specfun::{log_gamma, pi_over_sin_pi};

/// Spacing of the arithmetic progression that replaces tied `a_j`.
pub const TIE_SPACING: f64 = 1e-5;
/// Minimal spacing accepted by the residue basis after perturbation.
pub const TIE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum FiniteRankBasis {
    #[default]
    Newton,
    Residue,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TiePerturbation {
    pub original: Vec<f64>,
    pub perturbed: Vec<f64>,
    pub max_shift: f64,
}

fn min_spacing(a: &[f64]) -> f64 {
    let mut s: Vec<f64> = a.to_vec();
    s.sort_by(f64::total_cmp);
    s.windows(2).map(|p| p[1] - p[0]).fold(f64::INFINITY, f64::min)
}

/// Replaces clusters of `a_j` closer than [`TIE_SPACING`] by symmetric
/// arithmetic progressions with that spacing around the cluster mean.
/// Returns `None` when no perturbation is needed.
pub fn perturb_ties(a: &[f64]) -> Result<Option<TiePerturbation>> {
    if min_spacing(a) >= TIE_SPACING {
        return Ok(None);
    }
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| a[i].total_cmp(&a[j]));
    let mut out = a.to_vec();
    // Re-cluster until no spread cluster runs into a neighbour.
    for _ in 0..a.len() {
        let mut start = 0;
        while start < order.len() {
            let mut end = start + 1;
            while end < order.len() && out[order[end]] - out[order[end - 1]] < TIE_SPACING * (1.0 - 1e-9) {
                end += 1;
            }
            let len = end - start;
            if len > 1 {
                let mean = order[start..end].iter().map(|&i| out[i]).sum::<f64>() / len as f64;
                for (k, &i) in order[start..end].iter().enumerate() {
                    out[i] = mean + (k as f64 - (len as f64 - 1.0) / 2.0) * TIE_SPACING;
                }
            }
            start = end;
        }
        if min_spacing(&out) >= TIE_SPACING * (1.0 - 1e-9) {
            break;
        }
    }
    let spacing = min_spacing(&out);
    if spacing < TIE_TOLERANCE {
        return Err(Error::Tie(spacing));
    }
    let max_shift = a.iter().zip(&out).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok(Some(TiePerturbation { original: a.to_vec(), perturbed: out, max_shift }))
}

/// `ln G(w) = ln F(w) + Σ ln(w − a_m) − Σ ln Γ(w − a_m + 1)`.
fn ln_g(symbol: &SymbolF, a: &[f64], w: C64) -> Result<C64> {
    let mut acc = symbol.ln_eval(w)? - sum_log_gamma_shifted(w, a, 1.0)?;
    for &am in a {
        acc += (w - am).ln();
    }
    Ok(acc)
}

/// `ln C_i = −ln F(a_i) + Σ_{m≠i} ln Γ(a_i − a_m)`.
fn ln_c(symbol: &SymbolF, a: &[f64], i: usize) -> Result<C64> {
    let ai = C64::new(a[i], 0.0);
    let mut acc = -symbol.ln_eval(ai)?;
    for (m, &am) in a.iter().enumerate() {
        if m != i {
            acc += log_gamma(ai - am)?;
        }
    }
    Ok(acc)
}

/// `f_i(w) g_j(w)` in the residue basis.
fn residue_pair(symbol: &SymbolF, a: &[f64], i: usize, j: usize, w: C64) -> Result<C64> {
    let g = (ln_c(symbol, a, j)? + ln_g(symbol, a, w)?).exp() * pi_over_sin_pi(C64::new(a[j], 0.0) - w);
    Ok(g / (w - a[i]))
}

/// `(1/2πi) ∮ f_i g_i` on a small circle around `a_i`; equals `−1`.
pub fn residue_check(symbol: &SymbolF, a: &[f64], i: usize) -> Result<C64> {
    if i >= a.len() {
        return Err(Error::domain(format!("index {i} out of range for {} parameters", a.len())));
    }
    let grid = discretize(&circle_contour(0.1, C64::new(a[i], 0.0))?, 64)?;
    let mut acc = C64::new(0.0, 0.0);
    for (w, wt) in grid.iter() {
        acc += wt * residue_pair(symbol, a, i, i, w)?;
    }
    Ok(acc)
}

/// `det[1/(w_j − a_i)]` and the closed form
/// `Π_{i<j}(a_j − a_i)(w_i − w_j) / Π_{i,j}(w_i − a_j)`.
pub fn cauchy_determinant_check(a: &[C64], w: &[C64]) -> Result<(C64, C64)> {
    let n = a.len();
    if w.len() != n {
        return Err(Error::Size(format!("need as many w as a, got {} and {n}", w.len())));
    }
    const TOL: f64 = 1e-14;
    for i in 0..n {
        for j in 0..n {
            if (w[i] - a[j]).norm() < TOL {
                return Err(Error::Degenerate(format!("w[{i}] coincides with a[{j}]")));
            }
            if i < j && ((a[i] - a[j]).norm() < TOL || (w[i] - w[j]).norm() < TOL) {
                return Err(Error::Degenerate(format!("points {i} and {j} coincide")));
            }
        }
    }
    let det = CMatrix::from_fn(n, n, |i, j| (w[j] - a[i]).inv()).det();
    let mut num = C64::new(1.0, 0.0);
    let mut den = C64::new(1.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            if i < j {
                num *= (a[j] - a[i]) * (w[i] - w[j]);
            }
            den *= w[i] - a[j];
        }
    }
    Ok((det, num / den))
}

/// Sampled `f_i` (rows) and `g_j` (rows) on the inner nodes, either basis.
struct Factors {
    f: Vec<Vec<C64>>,
    g: Vec<Vec<C64>>,
}

fn newton_factors(symbol: &SymbolF, a: &[f64], circle: &QuadratureGrid, ws: &[C64]) -> Result<Factors> {
    let big_n = a.len();
    let ln_r: Vec<C64> = circle
        .nodes()
        .iter()
        .map(|&v| Ok(sum_log_gamma_shifted(v, a, 1.0)? - symbol.ln_eval(v)?))
        .collect::<Result<_>>()?;
    // tails[p][j] = 1/Π_{m ≥ p}(v_j − a_m)
    let tails: Vec<Vec<C64>> = (0..big_n)
        .map(|p| circle.nodes().iter().map(|&v| a[p..].iter().map(|&am| v - am).product::<C64>().inv()).collect())
        .collect();
    let mut f = vec![Vec::with_capacity(ws.len()); big_n];
    let mut g = vec![Vec::with_capacity(ws.len()); big_n];
    for &w in ws {
        let lg = ln_g(symbol, a, w)?;
        let mut s = vec![C64::new(0.0, 0.0); big_n];
        for (j, (&v, &u)) in circle.nodes().iter().zip(circle.weights()).enumerate() {
            let common = u * (lg + ln_r[j]).exp() * pi_over_sin_pi(v - w);
            for p in 0..big_n {
                s[p] += common * tails[p][j];
            }
        }
        let mut prod = C64::new(1.0, 0.0);
        for p in 0..big_n {
            prod *= w - a[p];
            f[p].push(prod.inv());
            g[p].push(s[p]);
        }
    }
    Ok(Factors { f, g })
}

fn residue_factors(symbol: &SymbolF, a: &[f64], ws: &[C64]) -> Result<Factors> {
    let big_n = a.len();
    let lc: Vec<C64> = (0..big_n).map(|i| ln_c(symbol, a, i)).collect::<Result<_>>()?;
    let mut f = vec![Vec::with_capacity(ws.len()); big_n];
    let mut g = vec![Vec::with_capacity(ws.len()); big_n];
    for &w in ws {
        let lg = ln_g(symbol, a, w)?;
        for i in 0..big_n {
            f[i].push((w - a[i]).inv());
            g[i].push((lc[i] + lg).exp() * pi_over_sin_pi(C64::new(a[i], 0.0) - w));
        }
    }
    Ok(Factors { f, g })
}

fn factors(
    symbol: &SymbolF,
    a: &[f64],
    basis: FiniteRankBasis,
    circle: &QuadratureGrid,
    ws: &[C64],
) -> Result<Factors> {
    match basis {
        FiniteRankBasis::Newton => newton_factors(symbol, a, circle, ws),
        FiniteRankBasis::Residue => residue_factors(symbol, a, ws),
    }
}

fn finite_rank_det(fac: &Factors, weights: &[C64]) -> C64 {
    let n = fac.f.len();
    let m = CMatrix::from_fn(n, n, |i, j| {
        let s: C64 = (0..weights.len()).map(|k| weights[k] * fac.f[i][k] * fac.g[j][k]).sum();
        s + if i == j { 1.0 } else { 0.0 }
    });
    m.det()
}

/// Finite-rank determinant in the Newton basis with 64 circle nodes.
pub fn laplace_via_finite_rank(params: &PolymerParams, u: f64, kp: &KernelParams) -> Result<LaplaceEstimate> {
    Ok(laplace_via_finite_rank_with(params, u, kp, FiniteRankBasis::Newton, 64)?.0)
}

/// Finite-rank determinant in the chosen basis. `circle_order` is the number
/// of trapezoid nodes on `C_{δ1}` for the Newton basis. The residue basis
/// perturbs tied `a_j` first and reports the perturbation.
pub fn laplace_via_finite_rank_with(
    params: &PolymerParams,
    u: f64,
    kp: &KernelParams,
    basis: FiniteRankBasis,
    circle_order: usize,
) -> Result<(LaplaceEstimate, Option<TiePerturbation>)> {
    let kp = kp.for_polymer(params)?;
    check_log_gamma_hypotheses(params, &kp)?;
    let symbol = SymbolF::log_gamma(u, params.alphas.clone())?;
    let (a, perturbation) = match basis {
        FiniteRankBasis::Newton => (params.a.clone(), None),
        FiniteRankBasis::Residue => match perturb_ties(&params.a)? {
            Some(p) => (p.perturbed.clone(), Some(p)),
            None => (params.a.clone(), None),
        },
    };
    let circle = discretize(&circle_contour(kp.delta1, C64::new(0.0, 0.0))?, circle_order)?;
    let coarse_circle = discretize(&circle_contour(kp.delta1, C64::new(0.0, 0.0))?, (circle_order / 2).max(2))?;

    let log_sample = |y: f64| {
        let ws = [C64::new(kp.delta2, y), C64::new(kp.delta2, -y)];
        match factors(&symbol, &a, basis, &circle, &ws) {
            Ok(fac) => {
                let mut best = f64::NEG_INFINITY;
                for k in 0..2 {
                    for fi in &fac.f {
                        for gj in &fac.g {
                            best = best.max((fi[k] * gj[k]).norm().ln());
                        }
                    }
                }
                best
            }
            Err(_) => f64::INFINITY,
        }
    };
    let log_shape = |y: f64| log_decay_shape(&symbol, &a, kp.delta2, y);
    let trunc = adapt_truncation(START_HEIGHT, kp.inner_truncation, &log_sample, &log_shape)?;
    let line = line_grid(kp.delta2, trunc.height, kp.inner_order, u.ln())?;
    let fine = finite_rank_det(&factors(&symbol, &a, basis, &circle, line.nodes())?, line.weights());
    let change = match basis {
        FiniteRankBasis::Newton => {
            (fine - finite_rank_det(&factors(&symbol, &a, basis, &coarse_circle, line.nodes())?, line.weights())).norm()
        }
        FiniteRankBasis::Residue => 0.0,
    };
    let value = project_real(fine, LaplaceMethod::FiniteRank)?;
    let shift_error = perturbation.as_ref().map_or(0.0, |p| p.max_shift);
    Ok((
        LaplaceEstimate {
            value,
            method: LaplaceMethod::FiniteRank,
            error_estimate: change + trunc.tail + shift_error,
            imag_residual: fine.im,
            grid_order: Some(circle_order),
            truncation: Some(trunc.height),
        },
        perturbation,
    ))
}

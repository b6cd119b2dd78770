//! The N-fold Sklyanin integral over `(−ℓ_{δ1})^N`.

use super::{line_grid, project_real, LaplaceEstimate, LaplaceMethod, SymbolF};
use crate::parallel::map_indexed;
use crate::polymer::PolymerParams;
use crate::prelude::*;
use crate::specfun::{log_gamma, reciprocal_gamma};

/// Largest `N` accepted; the cost is `(grid size)^N`.
pub const NFOLD_MAX: usize = 3;

/// Largest accepted change when the contour is cut at `0.8 T` instead of `T`.
pub const NFOLD_TAIL_TOLERANCE: f64 = 1e-8;

/// `(1/N!) Π_{i≠j} 1/Γ(w_i−w_j) Π_{i,j} Γ(a_j−w_i) Π_j F(w_j)/F(a_j)`, the
/// integrand against `Π dw_j / (2πi)`.
pub fn nfold_integrand(ws: &[C64], a: &[f64], symbol: &SymbolF) -> Result<C64> {
    if ws.len() != a.len() {
        return Err(Error::Size(format!("need one w per a_j, got {} and {}", ws.len(), a.len())));
    }
    let mut acc = C64::new(0.0, 0.0);
    for (i, &wi) in ws.iter().enumerate() {
        acc += symbol.ln_eval(wi)? - symbol.ln_eval(C64::new(a[i], 0.0))?;
        for &aj in a {
            acc += log_gamma(C64::new(aj, 0.0) - wi)?;
        }
    }
    let mut value = acc.exp();
    for (i, &wi) in ws.iter().enumerate() {
        for (j, &wj) in ws.iter().enumerate() {
            if i != j {
                value *= reciprocal_gamma(wi - wj);
            }
        }
    }
    let factorial: f64 = (1..=ws.len()).map(|k| k as f64).product();
    Ok(value / factorial)
}

/// `(2πi)^{-N}/N! ∫…∫ Π_{i≠j} Γ(w_i−w_j)^{-1} Π Γ(a_j−w_i) Π F(w_j)/F(a_j)`
/// over `−ℓ_{δ1}` truncated at `|Im w| <= truncation`, with `order` nodes per
/// panel. The error estimate adds the change against a coarser order to the
/// change from cutting at `0.8 * truncation`; the latter must stay below
/// [`NFOLD_TAIL_TOLERANCE`].
pub fn laplace_via_nfold(
    params: &PolymerParams,
    u: f64,
    delta1: f64,
    truncation: f64,
    order: usize,
) -> Result<LaplaceEstimate> {
    params.validate()?;
    let big_n = params.big_n;
    if big_n > NFOLD_MAX {
        return Err(Error::Size(format!("nfold evaluator supports N <= {NFOLD_MAX}, got N = {big_n}")));
    }
    if !(delta1 > 0.0 && delta1 < 1.0) {
        return Err(Error::domain(format!("delta1 must be in (0, 1), got {delta1}")));
    }
    if let Some(aj) = params.a.iter().find(|&&aj| !(aj > -delta1)) {
        return Err(Error::domain(format!("the line Re w = -delta1 must lie left of every a_j, got a_j = {aj}")));
    }
    if !(truncation > 0.0) || !truncation.is_finite() {
        return Err(Error::domain("truncation must be positive and finite"));
    }
    let symbol = SymbolF::log_gamma(u, params.alphas.clone())?;
    let fine = nfold_on_order(params, &symbol, delta1, truncation, order)?;
    let coarse = nfold_on_order(params, &symbol, delta1, truncation, (2 * order / 3).max(4))?;
    let tail = (fine - nfold_on_order(params, &symbol, delta1, 0.8 * truncation, order)?).norm();
    if !(tail <= NFOLD_TAIL_TOLERANCE) {
        return Err(Error::Truncation { tail, tolerance: NFOLD_TAIL_TOLERANCE, truncation });
    }
    let value = project_real(fine, LaplaceMethod::Nfold)?;
    Ok(LaplaceEstimate {
        value,
        method: LaplaceMethod::Nfold,
        error_estimate: (fine - coarse).norm() + tail,
        imag_residual: fine.im,
        grid_order: Some(order),
        truncation: Some(truncation),
    })
}

fn nfold_on_order(params: &PolymerParams, symbol: &SymbolF, delta1: f64, truncation: f64, order: usize) -> Result<C64> {
    let a = &params.a;
    let big_n = a.len();
    let grid = line_grid(-delta1, truncation, order, symbol.u.ln())?;
    let nodes = grid.nodes();
    let p = nodes.len();
    // Per-node factor W_k Π_j Γ(a_j − w_k) F(w_k), with Π_j F(a_j)^{-1} spread evenly.
    let ln_fa: C64 = a.iter().map(|&aj| symbol.ln_eval(C64::new(aj, 0.0))).sum::<Result<C64>>()?;
    let single: Vec<C64> = nodes
        .iter()
        .zip(grid.weights())
        .map(|(&w, &wt)| {
            let mut l = symbol.ln_eval(w)? - ln_fa / big_n as f64;
            for &aj in a {
                l += log_gamma(C64::new(aj, 0.0) - w)?;
            }
            Ok(wt * l.exp())
        })
        .collect::<Result<_>>()?;
    if big_n == 1 {
        return Ok(single.iter().sum());
    }
    // Pair factor 1/(Γ(w_k − w_l) Γ(w_l − w_k)); zero on the diagonal.
    let rg: Vec<C64> = (0..p * p).map(|idx| reciprocal_gamma(nodes[idx / p] - nodes[idx % p])).collect();
    let pair = |k: usize, l: usize| rg[k * p + l] * rg[l * p + k];
    let parts = map_indexed(p, |k| {
        let mut acc = C64::new(0.0, 0.0);
        for l in 0..p {
            let kl = single[k] * single[l] * pair(k, l);
            if big_n == 2 {
                acc += kl;
            } else {
                for (m, &sm) in single.iter().enumerate() {
                    acc += kl * sm * pair(k, m) * pair(l, m);
                }
            }
        }
        acc
    });
    let factorial: f64 = (1..=big_n).map(|k| k as f64).product();
    Ok(parts.into_iter().sum::<C64>() / factorial)
}

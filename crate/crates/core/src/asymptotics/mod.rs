//! Critical constants and the steepest-descent exponent.
//!
//! `G(z) = ln Γ(z) − ln Γ(γ − z) + f̄_γ z` has a double critical point at
//! `t̄ = γ/2`; near it `G(z) − G(t̄) ≈ −ḡ_γ (z − t̄)³ / 6`.

mod descent;
mod fluctuations;

pub use descent::{descent_check, DescentPart, DescentReport, DescentSample};
pub use fluctuations::{
    fluctuation_experiment, ks_distance, FluctuationRow, TwTable, TW_TABLE_MAX, TW_TABLE_MIN, TW_TABLE_STEP,
};

use crate::prelude::*;
use crate::specfun::{digamma, log_gamma, polygamma, EULER_GAMMA};
use core::f64::consts::TAU;

/// `f̄ = -2Ψ(γ/2)`, `ḡ = -2Ψ''(γ/2)`, `t̄ = γ/2` for the homogeneous polymer.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CriticalConstants {
    pub gamma: f64,
    pub f_bar: f64,
    pub g_bar: f64,
    pub t_bar: f64,
}

pub fn critical_constants(gamma: f64) -> Result<CriticalConstants> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::domain(format!("gamma must be positive, got {gamma}")));
    }
    let t_bar = gamma / 2.0;
    Ok(CriticalConstants { gamma, f_bar: -2.0 * digamma(t_bar)?, g_bar: -2.0 * polygamma(2, t_bar)?, t_bar })
}

/// `G(z)` on the principal branches of `ln Γ`.
pub fn g_exponent(z: C64, gamma: f64) -> Result<C64> {
    let c = critical_constants(gamma)?;
    Ok(log_gamma(z)? - log_gamma(C64::new(gamma, 0.0) - z)? + c.f_bar * z)
}

/// Nodes on the Cauchy circle for derivatives of `ln Γ`.
const CAUCHY_NODES: usize = 64;

/// `d^k/dz^k ln Γ(z) = ψ^{(k−1)}(z)` for `1 <= k <= 4`.
///
/// The argument is first shifted to `Re >= 2` with `ln Γ(z) = ln Γ(z + m) − Σ ln(z + j)`.
/// Real arguments then use the real polygamma; complex ones a trapezoid
/// Cauchy integral of `ln Γ` on the unit circle around the shifted point.
pub fn log_gamma_derivative(k: u32, z: C64) -> Result<C64> {
    if !(1..=4).contains(&k) {
        return Err(Error::domain(format!("derivative order must be in 1..=4, got {k}")));
    }
    if crate::specfun::near_gamma_pole(z) {
        return Err(Error::Pole(format!("Γ has a pole at {z}")));
    }
    let kf = k as i32;
    let fact_km1 = [1.0, 1.0, 1.0, 2.0, 6.0][k as usize];
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    let mut rational = C64::new(0.0, 0.0);
    let mut p = z;
    while p.re < 2.0 {
        rational += sign * fact_km1 / p.powi(kf);
        p += 1.0;
    }
    let shifted = if z.im == 0.0 {
        C64::new(polygamma(k - 1, p.re)?, 0.0)
    } else {
        let base = log_gamma(p)?;
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..CAUCHY_NODES {
            let e = C64::from_polar(1.0, TAU * j as f64 / CAUCHY_NODES as f64);
            acc += (log_gamma(p + e)? - base) * e.powi(-kf);
        }
        acc * fact_km1 * k as f64 / CAUCHY_NODES as f64
    };
    Ok(shifted - rational)
}

/// `G^{(k)}(z)` for `1 <= k <= 4`.
pub fn g_derivative(k: u32, z: C64, gamma: f64) -> Result<C64> {
    let c = critical_constants(gamma)?;
    let reflected = log_gamma_derivative(k, C64::new(gamma, 0.0) - z)?;
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    let linear = if k == 1 { c.f_bar } else { 0.0 };
    Ok(log_gamma_derivative(k, z)? + sign * reflected + linear)
}

/// `f(z̃) = ln(1 − z̃) − ln z̃ + 4z̃ − 2`, the small-γ limit of `G(γz̃) − G(t̄)`.
pub fn rescaled_f(z: C64) -> Result<C64> {
    let one = C64::new(1.0, 0.0);
    if z.norm() < 1e-14 || (one - z).norm() < 1e-14 {
        return Err(Error::Pole(format!("f has a logarithmic singularity at {z}")));
    }
    Ok((one - z).ln() - z.ln() + 4.0 * z - 2.0)
}

/// `max |G(γz̃) − G(t̄) − f(z̃)|` over the given `z̃`.
pub fn rescaled_f_residual(gamma: f64, points: &[C64]) -> Result<f64> {
    let g_crit = g_exponent(C64::new(gamma / 2.0, 0.0), gamma)?;
    let mut worst = 0.0f64;
    for &z in points {
        let d = g_exponent(z * gamma, gamma)? - g_crit - rescaled_f(z)?;
        worst = worst.max(d.norm());
    }
    Ok(worst)
}

/// Residuals of the small-γ expansions `f̄ − (4/γ + 2g)` and `ḡ − 32/γ³`.
pub fn small_gamma_residuals(gamma: f64) -> Result<(f64, f64)> {
    let c = critical_constants(gamma)?;
    Ok((c.f_bar - (4.0 / gamma + 2.0 * EULER_GAMMA), c.g_bar - 32.0 / gamma.powi(3)))
}

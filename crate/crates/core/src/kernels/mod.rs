//! The Laplace-transform kernels and their evaluators.
//!
//! Four routes to `E[exp(-u Z(n, N))]` live here or in [`crate::polymer`]:
//! the N-fold Sklyanin integral ([`laplace_via_nfold`]), the Nyström
//! determinant of `K_u` ([`laplace_via_nystrom`]), the N x N finite-rank
//! reduction ([`laplace_via_finite_rank`]) and Monte Carlo.

mod decay;
mod finite_rank;
mod ku;
mod limiting;
mod nfold;
mod semidiscrete;
mod truncation;

pub use decay::{
    decay_diagnostics, DecayReport, LineIntegral, SegmentIntegral, DECAY_KAPPAS, SEGMENT_HEIGHTS, SEGMENT_TARGET,
};
pub use finite_rank::{
    cauchy_determinant_check, laplace_via_finite_rank, laplace_via_finite_rank_with, perturb_ties, residue_check,
    FiniteRankBasis, TiePerturbation, TIE_SPACING, TIE_TOLERANCE,
};
pub use ku::{eval_ku, laplace_via_nystrom, KuKernel};
pub use limiting::{limiting_kernel_eval, tw_cdf, tw_cdf_with, LimitingKernel, TwSettings};
pub use nfold::{laplace_via_nfold, nfold_integrand, NFOLD_MAX, NFOLD_TAIL_TOLERANCE};
pub use semidiscrete::{semi_discrete_laplace, SemiDiscreteKernel};
pub use truncation::Truncation;

use crate::contour::{discretize_graded, vertical_line, PanelGrading};
use crate::polymer::PolymerParams;
use crate::prelude::*;
use crate::quadrature::QuadratureGrid;
use crate::specfun::{is_finite, log_gamma};

/// Imaginary parts above `IMAG_TOLERANCE * max(1, |value|)` are reported as
/// convergence failures instead of being dropped.
pub const IMAG_TOLERANCE: f64 = 1e-6;

/// Cap on the inner line truncation height.
pub const DEFAULT_TRUNCATION_CAP: f64 = 60.0;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "kebab-case"))]
pub enum SymbolFamily {
    /// `F(w) = u^w Π Γ(α_m − w)`.
    LogGamma { alphas: Vec<f64> },
    /// `F(w) = u^w e^{w² t / 2}`.
    SemiDiscrete { t: f64 },
}

/// The symbol `F` entering both sides of the determinant identity.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SymbolF {
    pub u: f64,
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub family: SymbolFamily,
}

impl SymbolF {
    pub fn log_gamma(u: f64, alphas: Vec<f64>) -> Result<Self> {
        let s = Self { u, family: SymbolFamily::LogGamma { alphas } };
        s.validate()?;
        Ok(s)
    }

    pub fn semi_discrete(u: f64, t: f64) -> Result<Self> {
        let s = Self { u, family: SymbolFamily::SemiDiscrete { t } };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.u > 0.0) || !self.u.is_finite() {
            return Err(Error::domain(format!("u must be positive, got {}", self.u)));
        }
        match &self.family {
            SymbolFamily::LogGamma { alphas } => {
                if alphas.is_empty() || alphas.iter().any(|a| !a.is_finite()) {
                    return Err(Error::domain("alphas must be a non-empty list of finite values"));
                }
            }
            SymbolFamily::SemiDiscrete { t } => {
                if !(*t > 0.0) || !t.is_finite() {
                    return Err(Error::domain(format!("t must be positive, got {t}")));
                }
            }
        }
        Ok(())
    }

    /// Real parts of the poles of `F` are all `>= pole_floor()`.
    pub fn pole_floor(&self) -> f64 {
        match &self.family {
            SymbolFamily::LogGamma { alphas } => alphas.iter().copied().fold(f64::INFINITY, f64::min),
            SymbolFamily::SemiDiscrete { .. } => f64::INFINITY,
        }
    }

    /// `log F(w)` (some branch; only its exponential is used).
    pub fn ln_eval(&self, w: C64) -> Result<C64> {
        let lin = w * self.u.ln();
        match &self.family {
            SymbolFamily::LogGamma { alphas } => {
                let mut acc = lin;
                for &al in alphas {
                    acc += log_gamma(C64::new(al, 0.0) - w)?;
                }
                Ok(acc)
            }
            SymbolFamily::SemiDiscrete { t } => Ok(lin + w * w * (0.5 * t)),
        }
    }
}

/// `F(w)`, evaluated as `exp(w log u + Σ log Γ(α_m − w))`.
pub fn eval_symbol(symbol: &SymbolF, w: C64) -> Result<C64> {
    if !is_finite(w) {
        return Err(Error::domain(format!("w must be finite, got {w}")));
    }
    Ok(symbol.ln_eval(w)?.exp())
}

/// Contour parameters for `K_u`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelParams {
    pub delta1: f64,
    pub delta2: f64,
    pub a: Vec<f64>,
    /// Cap for the adaptive truncation height of `ℓ_{δ2}`.
    pub inner_truncation: f64,
    /// Gauss-Legendre nodes per panel on `ℓ_{δ2}`.
    pub inner_order: usize,
}

impl KernelParams {
    pub fn new(delta1: f64, delta2: f64, a: Vec<f64>) -> Result<Self> {
        let kp = Self { delta1, delta2, a, inner_truncation: DEFAULT_TRUNCATION_CAP, inner_order: 16 };
        kp.validate()?;
        Ok(kp)
    }

    /// `(δ1, δ2) = (0.2, 0.5)`.
    pub fn default_for(a: Vec<f64>) -> Result<Self> {
        Self::new(0.2, 0.5, a)
    }

    pub fn validate(&self) -> Result<()> {
        let (d1, d2) = (self.delta1, self.delta2);
        if !(d2 > 0.0 && d2 < 1.0) {
            return Err(Error::domain(format!("delta2 must be in (0, 1), got {d2}")));
        }
        if !(d1 > 0.0) {
            return Err(Error::domain(format!("delta1 must be > 0, got {d1}")));
        }
        if !(d1 < d2.min(1.0 - d2)) {
            return Err(Error::domain(format!(
                "delta1 must be < min(delta2, 1−delta2), got delta1 = {d1}, delta2 = {d2}"
            )));
        }
        if let Some(aj) = self.a.iter().find(|aj| !(aj.abs() < d1)) {
            return Err(Error::domain(format!("|a_j| must be < delta1 = {d1}, got a_j = {aj}")));
        }
        if !(self.inner_truncation > 0.0) || !self.inner_truncation.is_finite() {
            return Err(Error::domain("inner_truncation must be positive and finite"));
        }
        if self.inner_order < 2 {
            return Err(Error::domain("inner_order must be >= 2"));
        }
        Ok(())
    }

    pub fn with_inner(mut self, truncation: f64, order: usize) -> Result<Self> {
        self.inner_truncation = truncation;
        self.inner_order = order;
        self.validate()?;
        Ok(self)
    }

    /// Copy with `a` replaced by the polymer's column parameters.
    fn for_polymer(&self, params: &PolymerParams) -> Result<Self> {
        if !self.a.is_empty() && self.a != params.a {
            return Err(Error::domain("kernel parameter a differs from the polymer's a"));
        }
        let mut kp = self.clone();
        kp.a = params.a.clone();
        kp.validate()?;
        Ok(kp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum LaplaceMethod {
    MonteCarlo,
    Nfold,
    Nystrom,
    FiniteRank,
}

impl LaplaceMethod {
    pub fn name(self) -> &'static str {
        match self {
            LaplaceMethod::MonteCarlo => "monte-carlo",
            LaplaceMethod::Nfold => "nfold",
            LaplaceMethod::Nystrom => "nystrom",
            LaplaceMethod::FiniteRank => "finite-rank",
        }
    }
}

/// A value of `E[exp(-u Z)]` with the route that produced it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LaplaceEstimate {
    pub value: f64,
    pub method: LaplaceMethod,
    /// Standard error (Monte Carlo) or refinement change plus truncation tail.
    pub error_estimate: f64,
    /// Imaginary part dropped when projecting to the real line.
    pub imag_residual: f64,
    /// Quadrature order used (outer grid, or per-panel order for nfold).
    pub grid_order: Option<usize>,
    /// Truncation height chosen for the infinite contour.
    pub truncation: Option<f64>,
}

impl LaplaceEstimate {
    pub fn monte_carlo(mean: f64, standard_error: f64) -> Self {
        Self {
            value: mean,
            method: LaplaceMethod::MonteCarlo,
            error_estimate: standard_error,
            imag_residual: 0.0,
            grid_order: None,
            truncation: None,
        }
    }
}

/// Projects a determinant onto the reals, rejecting large imaginary parts.
pub(crate) fn project_real(z: C64, method: LaplaceMethod) -> Result<f64> {
    if !is_finite(z) {
        return Err(Error::Convergence(format!("{} produced a non-finite value {z}", method.name())));
    }
    if z.im.abs() > IMAG_TOLERANCE * z.re.abs().max(1.0) {
        return Err(Error::Convergence(format!(
            "{} value {z} has imaginary part above {IMAG_TOLERANCE:e} * max(1, |value|)",
            method.name()
        )));
    }
    Ok(z.re)
}

/// Preconditions of the log-gamma determinant identity.
pub(crate) fn check_log_gamma_hypotheses(params: &PolymerParams, kp: &KernelParams) -> Result<()> {
    params.validate()?;
    kp.validate()?;
    if let Some(al) = params.alphas.iter().find(|&&al| !(al > kp.delta2)) {
        return Err(Error::domain(format!("alpha_i must be > delta2 = {}, got {al}", kp.delta2)));
    }
    if let Some(aj) = params.a.iter().find(|&&aj| !(aj >= 0.0 && aj < kp.delta1)) {
        return Err(Error::domain(format!("a_j must be in [0, delta1 = {}), got {aj}", kp.delta1)));
    }
    Ok(())
}

/// Panel grading for a vertical line, refined when `u^w` oscillates fast.
pub(crate) fn line_grading(ln_u: f64) -> PanelGrading {
    let max = (8.0 / (ln_u.abs() + 2.0)).min(2.0);
    PanelGrading::geometric(max.min(0.5), 1.5, max)
}

/// Upward vertical line `Re w = delta`, `|Im w| <= height`, graded panels.
pub(crate) fn line_grid(delta: f64, height: f64, order: usize, ln_u: f64) -> Result<QuadratureGrid> {
    discretize_graded(&vertical_line(delta, height)?, order, &line_grading(ln_u))
}

/// `Σ ln Γ(z − a_m)` with an additive shift applied to every argument.
pub(crate) fn sum_log_gamma_shifted(z: C64, a: &[f64], shift: f64) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for &am in a {
        acc += log_gamma(z - am + shift)?;
    }
    Ok(acc)
}

use clap::Args;
use lgpoly_core::kernels::{
    laplace_via_finite_rank_with, laplace_via_nfold, laplace_via_nystrom, FiniteRankBasis, KernelParams,
    LaplaceEstimate, LaplaceMethod,
};
use lgpoly_core::polymer::{monte_carlo_laplace_many, PolymerParams};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{CommandConfig, Common, Format};
use crate::error::CliError;
use crate::output::{emit, Cell, Table};

pub const HEADER: &[&str] =
    &["u", "method", "value", "error_estimate", "imag_residual", "max_abs_deviation", "max_rel_deviation"];

const METHODS: [&str; 4] = ["mc", "nfold", "nystrom", "finite-rank"];

#[derive(Debug, Args, Serialize)]
pub struct LaplaceFlags {
    /// Columns of the lattice.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    /// Rows of the lattice (N <= n).
    #[arg(long = "N")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    big_n: Option<usize>,
    /// Homogeneous parameter, used when --alphas is absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    alphas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    u: Option<Vec<f64>>,
    /// Comma list from mc, nfold, nystrom, finite-rank, or `all`.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    methods: Option<Vec<String>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    delta1: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    delta2: Option<f64>,
    /// Monte Carlo sample count.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    nystrom_order: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    nfold_order: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    nfold_truncation: Option<f64>,
    #[arg(long, value_parser = ["newton", "residue"])]
    #[serde(skip_serializing_if = "Option::is_none")]
    finite_rank_basis: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    finite_rank_circle_order: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct LaplaceConfig {
    n: usize,
    #[serde(rename = "N")]
    big_n: usize,
    gamma: f64,
    alphas: Option<Vec<f64>>,
    a: Option<Vec<f64>>,
    u: Vec<f64>,
    methods: Vec<String>,
    delta1: f64,
    delta2: f64,
    samples: usize,
    nystrom_order: usize,
    nfold_order: usize,
    nfold_truncation: f64,
    finite_rank_basis: FiniteRankBasis,
    finite_rank_circle_order: usize,
}

impl Default for LaplaceConfig {
    fn default() -> Self {
        Self {
            n: 2,
            big_n: 2,
            gamma: 1.0,
            alphas: None,
            a: None,
            u: vec![1.0],
            methods: vec!["all".into()],
            delta1: 0.2,
            delta2: 0.5,
            samples: 1_000_000,
            nystrom_order: 64,
            nfold_order: 16,
            nfold_truncation: 15.0,
            finite_rank_basis: FiniteRankBasis::Newton,
            finite_rank_circle_order: 64,
        }
    }
}

impl LaplaceConfig {
    fn polymer(&self) -> Result<PolymerParams, CliError> {
        let alphas = self.alphas.clone().unwrap_or_else(|| vec![self.gamma; self.n]);
        let a = self.a.clone().unwrap_or_else(|| vec![0.0; self.big_n]);
        if alphas.len() != self.n {
            return Err(CliError::Config(format!("alphas must have n = {} entries, got {}", self.n, alphas.len())));
        }
        if a.len() != self.big_n {
            return Err(CliError::Config(format!("a must have N = {} entries, got {}", self.big_n, a.len())));
        }
        Ok(PolymerParams::new(alphas, a)?)
    }

    fn methods(&self) -> Vec<&'static str> {
        if self.methods.iter().any(|m| m == "all") {
            return METHODS.to_vec();
        }
        METHODS.into_iter().filter(|m| self.methods.iter().any(|x| x == m)).collect()
    }
}

impl CommandConfig for LaplaceConfig {
    const FORMAT: Format = Format::Csv;

    fn validate(&self) -> Result<(), CliError> {
        let p = self.polymer()?;
        KernelParams::new(self.delta1, self.delta2, p.a.clone())?;
        if let Some(m) = self.methods.iter().find(|m| *m != "all" && !METHODS.contains(&m.as_str())) {
            return Err(CliError::Config(format!("unknown method \"{m}\"; expected one of {METHODS:?} or all")));
        }
        if self.methods.is_empty() {
            return Err(CliError::Config("methods must not be empty".into()));
        }
        if self.u.is_empty() || self.u.iter().any(|u| !(*u > 0.0) || !u.is_finite()) {
            return Err(CliError::Config("u must be a non-empty list of positive finite values".into()));
        }
        if self.methods().contains(&"mc") && self.samples < 2 {
            return Err(CliError::Config("samples must be >= 2 for the Monte Carlo method".into()));
        }
        if self.nystrom_order < 2 || self.nfold_order < 2 || self.finite_rank_circle_order < 4 {
            return Err(CliError::Config("quadrature orders must be >= 2 (circle order >= 4)".into()));
        }
        if !(self.nfold_truncation > 0.0) || !self.nfold_truncation.is_finite() {
            return Err(CliError::Config("nfold_truncation must be positive and finite".into()));
        }
        Ok(())
    }
}

/// Agreement threshold between two estimates: 1e-6 relative, widened to
/// three standard errors when Monte Carlo is involved.
fn tolerance(x: &LaplaceEstimate, y: &LaplaceEstimate) -> f64 {
    let se = |e: &LaplaceEstimate| if e.method == LaplaceMethod::MonteCarlo { e.error_estimate } else { 0.0 };
    (1e-6 * x.value.abs().max(y.value.abs())).max(3.0 * (se(x) + se(y)))
}

pub fn run(common: &Common, cfg: &LaplaceConfig, config: &Value) -> Result<(), CliError> {
    let params = cfg.polymer()?;
    let kp = KernelParams::new(cfg.delta1, cfg.delta2, params.a.clone())?;
    let methods = cfg.methods();
    let mc = if methods.contains(&"mc") {
        Some(monte_carlo_laplace_many(&params, &cfg.u, cfg.samples, common.seed)?)
    } else {
        None
    };
    let mut table = Table::new(HEADER);
    let mut rows = Vec::new();
    let mut pairs = Vec::new();
    let mut worst_ok = true;
    for (k, &u) in cfg.u.iter().enumerate() {
        let mut est = Vec::new();
        for &m in &methods {
            let e = match m {
                "mc" => {
                    let (mean, se) = mc.as_ref().map(|v| v[k]).unwrap_or_default();
                    LaplaceEstimate::monte_carlo(mean, se)
                }
                "nfold" => laplace_via_nfold(&params, u, cfg.delta1, cfg.nfold_truncation, cfg.nfold_order)?,
                "nystrom" => laplace_via_nystrom(&params, u, &kp, cfg.nystrom_order)?,
                _ => {
                    laplace_via_finite_rank_with(&params, u, &kp, cfg.finite_rank_basis, cfg.finite_rank_circle_order)?
                        .0
                }
            };
            est.push(e);
        }
        for (i, x) in est.iter().enumerate() {
            let (mut abs, mut rel) = (0.0f64, 0.0f64);
            for (j, y) in est.iter().enumerate() {
                if i == j {
                    continue;
                }
                let d = (x.value - y.value).abs();
                abs = abs.max(d);
                rel = rel.max(d / x.value.abs().max(y.value.abs()));
                if i < j {
                    let tol = tolerance(x, y);
                    worst_ok &= d <= tol;
                    pairs.push(json!({
                        "u": u, "a": x.method.name(), "b": y.method.name(),
                        "abs_deviation": d, "tolerance": tol, "agrees": d <= tol,
                    }));
                }
            }
            table.push(vec![
                Cell::Float(u),
                Cell::Text(x.method.name().into()),
                Cell::Float(x.value),
                Cell::Float(x.error_estimate),
                Cell::Float(x.imag_residual),
                Cell::Float(abs),
                Cell::Float(rel),
            ]);
            rows.push(json!({
                "u": u, "method": x.method.name(), "value": x.value, "error_estimate": x.error_estimate,
                "imag_residual": x.imag_residual, "max_abs_deviation": abs, "max_rel_deviation": rel,
            }));
        }
    }
    eprintln!("laplace: {} estimates, all pairs within tolerance: {worst_ok}", rows.len());
    emit(common, config, &table, json!({ "rows": rows, "pairs": pairs, "all_agree": worst_ok }))
}

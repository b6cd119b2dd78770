use clap::Args;
use lgpoly_core::kernels::{semi_discrete_laplace, KernelParams};
use lgpoly_core::oracle::lognormal_laplace;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{CommandConfig, Common, Format};
use crate::error::CliError;
use crate::output::{emit, Cell, Table};

pub const HEADER: &[&str] = &["t", "u", "a", "value", "error_estimate", "oracle", "abs_deviation"];

#[derive(Debug, Args, Serialize)]
pub struct SemidiscreteFlags {
    /// Times of the one-row semi-discrete polymer.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    u: Option<Vec<f64>>,
    /// Drifts a_1, one run each.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    delta1: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    delta2: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SemidiscreteConfig {
    t: Vec<f64>,
    u: Vec<f64>,
    a: Vec<f64>,
    delta1: f64,
    delta2: f64,
}

impl Default for SemidiscreteConfig {
    fn default() -> Self {
        Self { t: vec![1.0, 2.0], u: vec![0.5, 1.0], a: vec![0.0, 0.05], delta1: 0.15, delta2: 0.5 }
    }
}

impl CommandConfig for SemidiscreteConfig {
    const FORMAT: Format = Format::Csv;

    fn validate(&self) -> Result<(), CliError> {
        let positive = |v: &[f64]| !v.is_empty() && v.iter().all(|x| *x > 0.0 && x.is_finite());
        if !positive(&self.t) || !positive(&self.u) {
            return Err(CliError::Config("t and u must be non-empty lists of positive values".into()));
        }
        if self.a.is_empty() {
            return Err(CliError::Config("a must not be empty".into()));
        }
        let kp = KernelParams::new(self.delta1, self.delta2, self.a.clone())?;
        if !(kp.delta1 < kp.delta2 / 2.0) {
            return Err(CliError::Config(format!(
                "delta1 must be < delta2 / 2, got delta1 = {}, delta2 = {}",
                kp.delta1, kp.delta2
            )));
        }
        Ok(())
    }
}

pub fn run(common: &Common, cfg: &SemidiscreteConfig, config: &Value) -> Result<(), CliError> {
    let kp = KernelParams::new(cfg.delta1, cfg.delta2, Vec::new())?;
    let mut table = Table::new(HEADER);
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for &t in &cfg.t {
        for &u in &cfg.u {
            for &a in &cfg.a {
                let est = semi_discrete_laplace(1, t, &[a], u, &kp)?;
                let oracle = lognormal_laplace(u, a, t);
                let d = (est.value - oracle).abs();
                worst = worst.max(d);
                table.push(vec![
                    Cell::Float(t),
                    Cell::Float(u),
                    Cell::Float(a),
                    Cell::Float(est.value),
                    Cell::Float(est.error_estimate),
                    Cell::Float(oracle),
                    Cell::Float(d),
                ]);
                rows.push(json!({
                    "t": t, "u": u, "a": a, "value": est.value, "error_estimate": est.error_estimate,
                    "oracle": oracle, "abs_deviation": d,
                }));
            }
        }
    }
    eprintln!("semidiscrete: {} runs, max |det - oracle| = {worst:.3e}", rows.len());
    emit(common, config, &table, json!({ "rows": rows, "max_abs_deviation": worst }))
}

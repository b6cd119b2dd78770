use clap::Args;
use lgpoly_core::kernels::{tw_cdf_with, TwSettings};
use lgpoly_core::oracle::airy_kernel_determinant;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{CommandConfig, Common, Format};
use crate::error::CliError;
use crate::output::{emit, Cell, Table};

pub const HEADER: &[&str] = &["r", "cdf"];
pub const HEADER_CROSSCHECK: &[&str] = &["r", "cdf", "airy_oracle", "abs_deviation"];

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Args, Serialize)]
pub struct TwdistFlags {
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    r_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    r_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    r_step: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    order: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation: Option<f64>,
    /// Horizontal offset of the contour vertices.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    shift: Option<f64>,
    /// Adds a column from the Airy-kernel determinant on [r, r + 16].
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    crosscheck: bool,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_order: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TwdistConfig {
    r_min: f64,
    r_max: f64,
    r_step: f64,
    order: usize,
    truncation: f64,
    shift: f64,
    crosscheck: bool,
    oracle_order: usize,
}

impl Default for TwdistConfig {
    fn default() -> Self {
        let tw = TwSettings::default();
        Self {
            r_min: -5.0,
            r_max: 3.0,
            r_step: 0.5,
            order: tw.order,
            truncation: tw.truncation,
            shift: tw.shift,
            crosscheck: false,
            oracle_order: 80,
        }
    }
}

impl TwdistConfig {
    fn grid(&self) -> Vec<f64> {
        if !(self.r_step > 0.0) || !(self.r_max >= self.r_min) || !self.r_min.is_finite() || !self.r_max.is_finite() {
            return Vec::new();
        }
        let count = ((self.r_max - self.r_min) / self.r_step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.r_min + self.r_step * i as f64).collect()
    }
}

impl CommandConfig for TwdistConfig {
    const FORMAT: Format = Format::Csv;

    fn validate(&self) -> Result<(), CliError> {
        if self.grid().is_empty() {
            return Err(CliError::Config("the r-grid is empty: need r_step > 0 and r_max >= r_min".into()));
        }
        if self.order < 2 || !(self.truncation > 0.0) || !(self.shift > 0.0) || self.oracle_order < 2 {
            return Err(CliError::Config("order and oracle_order must be >= 2, truncation and shift positive".into()));
        }
        Ok(())
    }
}

pub fn run(common: &Common, cfg: &TwdistConfig, config: &Value) -> Result<(), CliError> {
    let settings = TwSettings { order: cfg.order, truncation: cfg.truncation, shift: cfg.shift };
    let grid = cfg.grid();
    let mut table = Table::new(if cfg.crosscheck { HEADER_CROSSCHECK } else { HEADER });
    let mut rows = Vec::new();
    let mut values = Vec::new();
    let mut worst: Option<f64> = None;
    for &r in &grid {
        let f = tw_cdf_with(r, &settings)?;
        values.push(f);
        if cfg.crosscheck {
            let oracle = airy_kernel_determinant(r, cfg.oracle_order);
            let d = (f - oracle).abs();
            worst = Some(worst.unwrap_or(0.0).max(d));
            table.push(vec![Cell::Float(r), Cell::Float(f), Cell::Float(oracle), Cell::Float(d)]);
            rows.push(json!({ "r": r, "cdf": f, "airy_oracle": oracle, "abs_deviation": d }));
        } else {
            table.push(vec![Cell::Float(r), Cell::Float(f)]);
            rows.push(json!({ "r": r, "cdf": f }));
        }
    }
    let monotone = values.windows(2).all(|p| p[1] >= p[0]);
    match worst {
        Some(w) => eprintln!("twdist: {} points, monotone: {monotone}, max |cdf - oracle| = {w:.3e}", grid.len()),
        None => eprintln!("twdist: {} points, monotone: {monotone}", grid.len()),
    }
    let body = json!({ "rows": rows, "monotone": monotone, "max_abs_deviation": worst });
    emit(common, config, &table, body)
}

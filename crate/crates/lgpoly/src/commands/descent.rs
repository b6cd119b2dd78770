use clap::Args;
use lgpoly_core::asymptotics::{critical_constants, descent_check};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{CommandConfig, Common, Format};
use crate::error::CliError;
use crate::output::{emit, Cell, Table};

pub const HEADER: &[&str] = &["name", "value"];

#[derive(Debug, Args, Serialize)]
pub struct DescentFlags {
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    /// Lattice size setting the radius of the small ball.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    samples_per_segment: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DescentConfig {
    gamma: f64,
    n: u64,
    samples_per_segment: usize,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self { gamma: 0.2, n: 1_000_000, samples_per_segment: 200 }
    }
}

impl CommandConfig for DescentConfig {
    const FORMAT: Format = Format::Json;

    fn validate(&self) -> Result<(), CliError> {
        critical_constants(self.gamma)?;
        if self.n == 0 || self.samples_per_segment < 2 {
            return Err(CliError::Config("n must be >= 1 and samples_per_segment >= 2".into()));
        }
        Ok(())
    }
}

pub fn run(common: &Common, cfg: &DescentConfig, config: &Value) -> Result<(), CliError> {
    let report = descent_check(cfg.gamma, cfg.n, cfg.samples_per_segment)?;
    let mut table = Table::new(HEADER);
    let [v_segment, v_arc, v_ball, v_line] = report.violations;
    for (name, value) in [
        ("c1", report.c1),
        ("c2", report.c2),
        ("c_arc", report.c_arc),
        ("c_line", report.c_line),
        ("violation_segment", v_segment),
        ("violation_arc", v_arc),
        ("violation_ball", v_ball),
        ("violation_line", v_line),
    ] {
        table.push(vec![Cell::Text(name.into()), Cell::Float(value)]);
    }
    eprintln!(
        "descent: c1 = {:.4e}, c2 = {:.4e}, c_arc = {:.4e}, c_line = {:.4e}, all positive: {}",
        report.c1,
        report.c2,
        report.c_arc,
        report.c_line,
        report.constants_positive()
    );
    let body = json!({
        "constants_positive": report.constants_positive(),
        "all_hold": report.all_hold(),
        "report": report,
    });
    emit(common, config, &table, body)
}

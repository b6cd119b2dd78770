use clap::Args;
use lgpoly_core::asymptotics::{critical_constants, FluctuationRow, TwTable};
use lgpoly_core::kernels::TwSettings;
use lgpoly_core::polymer::ensemble_fluctuations;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{CommandConfig, Common, Format};
use crate::error::CliError;
use crate::output::{emit, float, sibling, write_text, Cell, Table};

pub const HEADER: &[&str] = &["n", "samples", "ks", "mean", "std_dev"];

#[derive(Debug, Args, Serialize)]
pub struct FluctFlags {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    /// Strictly ascending sizes n of the square n x n lattice.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
    /// Gauss-Legendre order per panel for the Tracy-Widom table.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    tw_order: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    tw_truncation: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct FluctConfig {
    gamma: f64,
    n: Vec<usize>,
    samples: usize,
    tw_order: usize,
    tw_truncation: f64,
}

impl Default for FluctConfig {
    fn default() -> Self {
        let tw = TwSettings::default();
        Self {
            gamma: 0.5,
            n: vec![32, 64, 128, 256],
            samples: 10_000,
            tw_order: tw.order,
            tw_truncation: tw.truncation,
        }
    }
}

impl CommandConfig for FluctConfig {
    const FORMAT: Format = Format::Csv;

    fn validate(&self) -> Result<(), CliError> {
        critical_constants(self.gamma)?;
        if self.samples < 2 {
            return Err(CliError::Config(format!("samples must be >= 2, got {}", self.samples)));
        }
        if self.n.is_empty() || self.n[0] == 0 || !self.n.windows(2).all(|p| p[1] > p[0]) {
            return Err(CliError::Config("n must be a non-empty, strictly ascending list of positive sizes".into()));
        }
        if self.tw_order < 2 || !(self.tw_truncation > 0.0) {
            return Err(CliError::Config("tw_order must be >= 2 and tw_truncation positive".into()));
        }
        Ok(())
    }
}

pub fn run(common: &Common, cfg: &FluctConfig, config: &Value) -> Result<(), CliError> {
    let k = critical_constants(cfg.gamma)?;
    let settings = TwSettings { order: cfg.tw_order, truncation: cfg.tw_truncation, ..TwSettings::default() };
    let table = TwTable::build(&settings)?;
    let mut out = Table::new(HEADER);
    let mut rows = Vec::new();
    let mut files = Vec::new();
    for &n in &cfg.n {
        let x = ensemble_fluctuations(cfg.gamma, n, cfg.samples, common.seed)?;
        let row = FluctuationRow::from_samples(k.g_bar, n, &x, &table)?;
        if let Some(path) = &common.out {
            let file = sibling(path, &format!("samples-n{n}.csv"));
            let mut text = format!("# config: {config}\nx\n");
            for v in &x {
                text.push_str(&float(*v));
                text.push('\n');
            }
            write_text(Some(&file), &text)?;
            files.push(file.display().to_string());
        }
        eprintln!("fluct: n = {n}, KS = {:.4}", row.ks);
        out.push(vec![
            Cell::Int(n as u64),
            Cell::Int(row.samples as u64),
            Cell::Float(row.ks),
            Cell::Float(row.mean),
            Cell::Float(row.std_dev),
        ]);
        rows.push(row);
    }
    let scale = (k.g_bar / 2.0).powf(-1.0 / 3.0);
    let body = json!({ "f_bar": k.f_bar, "g_bar": k.g_bar, "tw_scale": scale, "rows": rows, "sample_files": files });
    emit(common, config, &out, body)
}

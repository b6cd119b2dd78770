//! Monte Carlo for the log-Gamma polymer.
//!
//! Weights `d_{i,j}` are inverse-Gamma with parameter `θ_{i,j} = α_i − a_j`;
//! `Z(n, N)` sums the weight products over up/right lattice paths from
//! `(1, 1)` to `(n, N)` and is computed in log space.

use crate::asymptotics::critical_constants;
use crate::parallel::map_indexed;
use crate::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

/// Samples per random substream. Each batch draws from its own ChaCha stream
/// keyed by `(seed, batch index)`, so results never depend on scheduling.
pub const BATCH_SIZE: usize = 256;

/// Largest weight matrix side accepted by [`brute_force_partition`].
pub const BRUTE_FORCE_MAX: usize = 6;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PolymerParams {
    /// Columns; `alphas` has this length.
    pub n: usize,
    /// Rows; `a` has this length.
    #[cfg_attr(feature = "serde", serde(rename = "N"))]
    pub big_n: usize,
    pub alphas: Vec<f64>,
    pub a: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub gamma_label: Option<f64>,
}

impl PolymerParams {
    pub fn new(alphas: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        let p = Self { n: alphas.len(), big_n: a.len(), alphas, a, gamma_label: None };
        p.validate()?;
        Ok(p)
    }

    /// `α ≡ γ`, `a ≡ 0`.
    pub fn homogeneous(gamma: f64, n: usize, big_n: usize) -> Result<Self> {
        let mut p = Self::new(vec![gamma; n], vec![0.0; big_n])?;
        p.gamma_label = Some(gamma);
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.big_n == 0 {
            return Err(Error::domain("n and N must be positive"));
        }
        if self.alphas.len() != self.n || self.a.len() != self.big_n {
            return Err(Error::domain("alphas must have length n and a must have length N"));
        }
        if self.big_n > self.n {
            return Err(Error::domain(format!("N must be <= n, got N = {} and n = {}", self.big_n, self.n)));
        }
        if self.alphas.iter().chain(&self.a).any(|x| !x.is_finite()) {
            return Err(Error::domain("alphas and a must be finite"));
        }
        for (i, &al) in self.alphas.iter().enumerate() {
            for (j, &aj) in self.a.iter().enumerate() {
                if !(al - aj > 0.0) {
                    return Err(Error::domain(format!("theta[{i}][{j}] = alpha_i - a_j must be > 0, got {}", al - aj)));
                }
            }
        }
        if let Some(g) = self.gamma_label {
            if !(g > 0.0) {
                return Err(Error::domain("gamma must be positive"));
            }
        }
        Ok(())
    }

    /// `θ_{i,j} = α_i − a_j` (zero-based).
    pub fn theta(&self, i: usize, j: usize) -> f64 {
        self.alphas[i] - self.a[j]
    }
}

fn gamma_law(theta: f64) -> Result<Gamma<f64>> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::domain(format!("theta must be positive, got {theta}")));
    }
    Gamma::new(theta, 1.0).map_err(|e| Error::domain(format!("{e}")))
}

/// One draw of `X = 1/G`, `G ~ Gamma(θ, 1)`.
pub fn sample_inverse_gamma<R: Rng + ?Sized>(theta: f64, rng: &mut R) -> Result<f64> {
    Ok(1.0 / gamma_law(theta)?.sample(rng))
}

/// One draw of `log X = −log G`.
pub fn sample_log_inverse_gamma<R: Rng + ?Sized>(theta: f64, rng: &mut R) -> Result<f64> {
    Ok(-gamma_law(theta)?.sample(rng).ln())
}

fn logaddexp(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x > y { (x, y) } else { (y, x) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `log Z` for a fixed matrix of log-weights (any rectangular shape).
pub fn log_partition_from_log_weights(log_weights: &[Vec<f64>]) -> f64 {
    let Some(cols) = log_weights.first().map(Vec::len) else {
        return f64::NEG_INFINITY;
    };
    let mut row = vec![f64::NEG_INFINITY; cols];
    for (r, lw) in log_weights.iter().enumerate() {
        for c in 0..cols {
            let prev = if r == 0 && c == 0 {
                0.0
            } else if c == 0 {
                row[0]
            } else {
                logaddexp(row[c], row[c - 1])
            };
            row[c] = lw[c] + prev;
        }
    }
    row[cols - 1]
}

/// `log Z` for a fixed matrix of positive weights.
pub fn log_partition_from_weights(weights: &[Vec<f64>]) -> f64 {
    let lw: Vec<Vec<f64>> = weights.iter().map(|r| r.iter().map(|w| w.ln()).collect()).collect();
    log_partition_from_log_weights(&lw)
}

/// Per-cell samplers for `params`, rows indexed by `j` (the `a` index).
struct WeightLaws {
    laws: Vec<Vec<Gamma<f64>>>,
}

impl WeightLaws {
    fn new(params: &PolymerParams) -> Result<Self> {
        params.validate()?;
        let laws = (0..params.big_n)
            .map(|j| (0..params.n).map(|i| gamma_law(params.theta(i, j))).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { laws })
    }

    /// Samples weights on the fly, reusing one row buffer.
    fn log_partition<R: Rng + ?Sized>(&self, rng: &mut R, row: &mut [f64]) -> f64 {
        row.fill(f64::NEG_INFINITY);
        for (r, laws) in self.laws.iter().enumerate() {
            for (c, law) in laws.iter().enumerate() {
                let lw = -law.sample(rng).ln();
                let prev = if r == 0 && c == 0 {
                    0.0
                } else if c == 0 {
                    row[0]
                } else {
                    logaddexp(row[c], row[c - 1])
                };
                row[c] = lw + prev;
            }
        }
        row[row.len() - 1]
    }
}

/// One sample of `log Z(n, N)`.
pub fn log_partition<R: Rng + ?Sized>(params: &PolymerParams, rng: &mut R) -> Result<f64> {
    let laws = WeightLaws::new(params)?;
    let mut row = vec![0.0; params.n];
    Ok(laws.log_partition(rng, &mut row))
}

/// `log Σ_paths Π d` by explicit enumeration of all up/right paths.
pub fn brute_force_partition(weights: &[Vec<f64>]) -> Result<f64> {
    let (total, _) = enumerate_paths(weights)?;
    Ok(total.ln())
}

/// Sum over paths together with the number of paths visited.
pub fn enumerate_paths(weights: &[Vec<f64>]) -> Result<(f64, u64)> {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || weights.iter().any(|r| r.len() != cols) {
        return Err(Error::domain("weight matrix must be non-empty and rectangular"));
    }
    if rows > BRUTE_FORCE_MAX || cols > BRUTE_FORCE_MAX {
        return Err(Error::Size(format!(
            "brute force is limited to {BRUTE_FORCE_MAX}x{BRUTE_FORCE_MAX}, got {rows}x{cols}"
        )));
    }
    // A path is a word in {right, up} with exactly rows-1 ups; bit k set = up at step k.
    let steps = rows + cols - 2;
    let mut total = 0.0;
    let mut count = 0u64;
    for mask in 0u32..(1u32 << steps) {
        if mask.count_ones() as usize != rows - 1 {
            continue;
        }
        let (mut r, mut c) = (0, 0);
        let mut prod = weights[0][0];
        for k in 0..steps {
            if mask >> k & 1 == 1 {
                r += 1;
            } else {
                c += 1;
            }
            prod *= weights[r][c];
        }
        total += prod;
        count += 1;
    }
    Ok((total, count))
}

fn batch_rng(seed: u64, batch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch as u64);
    rng
}

/// `samples` independent draws of `log Z(n, N)`, reproducible from `seed`
/// regardless of the number of worker threads.
pub fn sample_log_partitions(params: &PolymerParams, samples: usize, seed: u64) -> Result<Vec<f64>> {
    let laws = WeightLaws::new(params)?;
    let batches = samples.div_ceil(BATCH_SIZE);
    let parts = map_indexed(batches, |b| {
        let mut rng = batch_rng(seed, b);
        let len = BATCH_SIZE.min(samples - b * BATCH_SIZE);
        let mut row = vec![0.0; params.n];
        (0..len).map(|_| laws.log_partition(&mut rng, &mut row)).collect::<Vec<f64>>()
    });
    Ok(parts.into_iter().flatten().collect())
}

/// Sample mean and standard error of `exp(−u Z)` for each `u`, all from one
/// sample set.
pub fn monte_carlo_laplace_many(
    params: &PolymerParams,
    us: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if samples < 2 {
        return Err(Error::domain(format!("Monte Carlo needs at least 2 samples, got {samples}")));
    }
    if let Some(u) = us.iter().find(|u| !(**u > 0.0) || !u.is_finite()) {
        return Err(Error::domain(format!("u must be positive, got {u}")));
    }
    let log_z = sample_log_partitions(params, samples, seed)?;
    Ok(us.iter().map(|&u| mean_and_standard_error(log_z.iter().map(|lz| (-(u.ln() + lz).exp()).exp()))).collect())
}

pub fn monte_carlo_laplace(params: &PolymerParams, u: f64, samples: usize, seed: u64) -> Result<(f64, f64)> {
    Ok(monte_carlo_laplace_many(params, &[u], samples, seed)?[0])
}

/// Mean and `sd / sqrt(len)` (Welford).
pub fn mean_and_standard_error(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut count, mut mean, mut m2) = (0.0, 0.0, 0.0);
    for x in values {
        count += 1.0;
        let d = x - mean;
        mean += d / count;
        m2 += d * (x - mean);
    }
    if count < 2.0 {
        return (mean, f64::NAN);
    }
    (mean, (m2 / (count - 1.0) / count).sqrt())
}

/// A reproducible sample set of `log Z`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Ensemble {
    pub params: PolymerParams,
    pub seed: u64,
    pub log_z: Vec<f64>,
}

impl Ensemble {
    pub fn generate(params: PolymerParams, samples: usize, seed: u64) -> Result<Self> {
        let log_z = sample_log_partitions(&params, samples, seed)?;
        Ok(Self { params, seed, log_z })
    }
}

/// `(log Z(n, n) − n f̄_γ) / n^{1/3}` for the homogeneous polymer.
pub fn ensemble_fluctuations(gamma: f64, n: usize, samples: usize, seed: u64) -> Result<Vec<f64>> {
    let consts = critical_constants(gamma)?;
    let params = PolymerParams::homogeneous(gamma, n, n)?;
    let nf = n as f64;
    let scale = nf.cbrt();
    Ok(sample_log_partitions(&params, samples, seed)?.into_iter().map(|lz| (lz - nf * consts.f_bar) / scale).collect())
}

//! The fluctuation experiment: empirical law of `(log Z(n,n) − n f̄_γ)/n^{1/3}`
//! against `F_GUE((ḡ_γ/2)^{−1/3} r)`.

use super::critical_constants;
use crate::kernels::{tw_cdf_with, TwSettings};
use crate::parallel::map_indexed;
use crate::polymer::ensemble_fluctuations;
use crate::prelude::*;

pub const TW_TABLE_MIN: f64 = -10.0;
pub const TW_TABLE_MAX: f64 = 6.0;
pub const TW_TABLE_STEP: f64 = 0.05;

/// `F_GUE` tabulated on `[TW_TABLE_MIN, TW_TABLE_MAX]` and interpolated with
/// monotone piecewise cubic Hermite polynomials (Fritsch-Carlson slopes).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TwTable {
    pub r: Vec<f64>,
    pub f: Vec<f64>,
    slopes: Vec<f64>,
}

impl TwTable {
    pub fn build(settings: &TwSettings) -> Result<Self> {
        let count = ((TW_TABLE_MAX - TW_TABLE_MIN) / TW_TABLE_STEP).round() as usize + 1;
        let r: Vec<f64> = (0..count).map(|i| TW_TABLE_MIN + TW_TABLE_STEP * i as f64).collect();
        let f = map_indexed(count, |i| tw_cdf_with(r[i], settings)).into_iter().collect::<Result<Vec<_>>>()?;
        Self::from_values(r, f)
    }

    /// Table from given nodes (ascending) and values.
    pub fn from_values(r: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if r.len() != f.len() || r.len() < 2 || !r.windows(2).all(|p| p[1] > p[0]) {
            return Err(Error::domain("table needs at least two ascending nodes with one value each"));
        }
        let slopes = pchip_slopes(&r, &f);
        Ok(Self { r, f, slopes })
    }

    /// Interpolated value; `0` left of the table and `1` right of it.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.r.len();
        if x <= self.r[0] {
            return if x < self.r[0] { 0.0 } else { self.f[0] };
        }
        if x >= self.r[n - 1] {
            return if x > self.r[n - 1] { 1.0 } else { self.f[n - 1] };
        }
        let i = self.r.partition_point(|&t| t <= x) - 1;
        let h = self.r[i + 1] - self.r[i];
        let s = (x - self.r[i]) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s),
            s * (1.0 - s) * (1.0 - s),
            s * s * (3.0 - 2.0 * s),
            s * s * (s - 1.0),
        );
        h00 * self.f[i] + h10 * h * self.slopes[i] + h01 * self.f[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|p| p[1] - p[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut m = vec![0.0; n];
    if n == 2 {
        m[0] = d[0];
        m[1] = d[0];
        return m;
    }
    for i in 1..n - 1 {
        if d[i - 1] * d[i] > 0.0 {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s * d0 <= 0.0 {
            0.0
        } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    m[0] = end(h[0], h[1], d[0], d[1]);
    m[n - 1] = end(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    m
}

/// Kolmogorov-Smirnov distance between the empirical law of `samples` and `cdf`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / m).max((i as f64 + 1.0) / m - f)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FluctuationRow {
    pub n: usize,
    pub samples: usize,
    pub ks: f64,
    pub mean: f64,
    pub std_dev: f64,
}

/// For each `n`, samples `(log Z(n,n) − n f̄)/n^{1/3}` and measures the KS
/// distance to `r ↦ F_GUE((ḡ/2)^{−1/3} r)` read from `table`.
pub fn fluctuation_experiment(
    gamma: f64,
    n_list: &[usize],
    samples: usize,
    seed: u64,
    table: &TwTable,
) -> Result<Vec<FluctuationRow>> {
    let k = critical_constants(gamma)?;
    if n_list.is_empty() || !n_list.windows(2).all(|p| p[1] > p[0]) {
        return Err(Error::domain("n_list must be non-empty and strictly ascending"));
    }
    if samples < 2 {
        return Err(Error::domain("the experiment needs at least two samples"));
    }
    n_list
        .iter()
        .map(|&n| FluctuationRow::from_samples(k.g_bar, n, &ensemble_fluctuations(gamma, n, samples, seed)?, table))
        .collect()
}

impl FluctuationRow {
    /// Summarizes one ensemble of scaled fluctuations `x` at size `n`;
    /// `g_bar` sets the Tracy-Widom scale.
    pub fn from_samples(g_bar: f64, n: usize, x: &[f64], table: &TwTable) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::domain("the experiment needs at least two samples"));
        }
        let scale = (g_bar / 2.0).powf(-1.0 / 3.0);
        let m = x.len() as f64;
        let mean = x.iter().sum::<f64>() / m;
        let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
        let ks = ks_distance(x, |r| table.eval(scale * r));
        Ok(FluctuationRow { n, samples: x.len(), ks, mean, std_dev: var.sqrt() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::airy_kernel_determinant;

    #[test]
    fn pchip_reproduces_monotone_data() {
        let r: Vec<f64> = (0..=20).map(|i| -3.0 + 0.3 * i as f64).collect();
        let f: Vec<f64> = r.iter().map(|x| 1.0 / (1.0 + (-2.0 * x).exp())).collect();
        let t = TwTable::from_values(r.clone(), f.clone()).unwrap();
        for (x, y) in r.iter().zip(&f) {
            assert_eq!(t.eval(*x), *y);
        }
        let mut prev = 0.0;
        for i in 0..=600 {
            let x = -3.0 + 0.01 * i as f64;
            let v = t.eval(x);
            assert!(v >= prev - 1e-15);
            prev = v;
            assert!((v - 1.0 / (1.0 + (-2.0 * x).exp())).abs() < 2e-3);
        }
        assert_eq!(t.eval(-5.0), 0.0);
        assert_eq!(t.eval(5.0), 1.0);
        // Flat stretches stay flat.
        let t = TwTable::from_values(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 0.5, 0.5, 1.0]).unwrap();
        assert!((t.eval(1.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ks_distance_basics() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!((ks_distance(&xs, |x| x.clamp(0.0, 1.0)) - 0.0005).abs() < 1e-12);
        assert!((ks_distance(&[0.0], |_| 0.3) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn coarse_table_tracks_the_oracle() {
        let r: Vec<f64> = (0..=16).map(|i| -4.0 + 0.5 * i as f64).collect();
        let s = TwSettings::default();
        let f = r.iter().map(|&x| tw_cdf_with(x, &s).unwrap()).collect();
        let t = TwTable::from_values(r, f).unwrap();
        for x in [-2.3, -0.8, 0.1, 1.7] {
            assert!((t.eval(x) - airy_kernel_determinant(x, 80)).abs() < 5e-3, "x = {x}");
        }
    }

    #[test]
    fn experiment_is_deterministic() {
        let t = TwTable::from_values(vec![-10.0, 0.0, 6.0], vec![0.0, 0.9, 1.0]).unwrap();
        let a = fluctuation_experiment(0.5, &[4, 8], 200, 3, &t).unwrap();
        let b = fluctuation_experiment(0.5, &[4, 8], 200, 3, &t).unwrap();
        assert_eq!(a, b);
        assert!(fluctuation_experiment(0.5, &[8, 4], 200, 3, &t).is_err());
    }
}

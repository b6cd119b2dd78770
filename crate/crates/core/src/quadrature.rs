//! Quadrature rules and grids over contours.
//!
//! A [`QuadratureGrid`] stores nodes `z_k` and complex weights `w_k` such that
//! `Σ w_k f(z_k) ≈ (1/2πi) ∫_γ f(z) dz`: the weights absorb the Jacobian
//! `dz/dt` and the `1/(2πi)` path-measure normalization.

use crate::prelude::*;
use crate::specfun::is_finite;
use core::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Nodes and weights approximating `(1/2πi) ∫ f(z) dz` along a path.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadratureGrid {
    nodes: Vec<C64>,
    weights: Vec<C64>,
}

impl QuadratureGrid {
    pub fn new(nodes: Vec<C64>, weights: Vec<C64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::domain("grid nodes and weights differ in length"));
        }
        if nodes.len() < 2 {
            return Err(Error::domain("a quadrature grid needs at least two nodes"));
        }
        if !nodes.iter().chain(weights.iter()).all(|&z| is_finite(z)) {
            return Err(Error::domain("grid nodes and weights must be finite"));
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[C64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[C64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Concatenates two grids (integration over the union of the paths).
    pub fn concat(&self, other: &QuadratureGrid) -> QuadratureGrid {
        let mut nodes = self.nodes.clone();
        nodes.extend_from_slice(&other.nodes);
        let mut weights = self.weights.clone();
        weights.extend_from_slice(&other.weights);
        QuadratureGrid { nodes, weights }
    }

    /// The same nodes traversed in the opposite direction.
    pub fn reversed(&self) -> QuadratureGrid {
        QuadratureGrid {
            nodes: self.nodes.iter().rev().copied().collect(),
            weights: self.weights.iter().rev().map(|w| -w).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (C64, C64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// `Σ w_k f(z_k)`; fails on the first non-finite integrand value.
pub fn integrate<F>(grid: &QuadratureGrid, mut f: F) -> Result<C64>
where
    F: FnMut(C64) -> C64,
{
    let mut acc = C64::new(0.0, 0.0);
    for (k, (z, w)) in grid.iter().enumerate() {
        let v = f(z);
        if !is_finite(v) {
            return Err(Error::Evaluation { index: k, detail: format!("f({z}) = {v}") });
        }
        acc += w * v;
    }
    Ok(acc)
}

/// Like [`integrate`] for integrands that can fail themselves.
pub fn try_integrate<F>(grid: &QuadratureGrid, mut f: F) -> Result<C64>
where
    F: FnMut(C64) -> Result<C64>,
{
    let mut acc = C64::new(0.0, 0.0);
    for (k, (z, w)) in grid.iter().enumerate() {
        let v = f(z)?;
        if !is_finite(v) {
            return Err(Error::Evaluation { index: k, detail: format!("f({z}) = {v}") });
        }
        acc += w * v;
    }
    Ok(acc)
}

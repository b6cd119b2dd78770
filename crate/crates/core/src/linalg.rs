//! Dense complex matrices and determinants by partially pivoted LU.

use crate::prelude::*;
use core::ops::{Index, IndexMut};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `I + self`.
    pub fn plus_identity(mut self) -> CMatrix {
        assert_eq!(self.rows, self.cols);
        for i in 0..self.rows {
            self[(i, i)] += 1.0;
        }
        self
    }

    pub fn det(&self) -> C64 {
        self.log_det().value()
    }

    pub fn log_det(&self) -> LogDet {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut ln_abs = 0.0;
        let mut phase = C64::new(1.0, 0.0);
        for k in 0..n {
            let (p, pivot_abs) =
                (k..n)
                    .map(|i| (i, a[i * n + k].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_abs == 0.0 {
                return LogDet { ln_abs: f64::NEG_INFINITY, phase: C64::new(0.0, 0.0) };
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                phase = -phase;
            }
            let pivot = a[k * n + k];
            ln_abs += pivot_abs.ln();
            phase *= pivot / pivot_abs;
            let inv = pivot.inv();
            for i in (k + 1)..n {
                let factor = a[i * n + k] * inv;
                if factor == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in (k + 1)..n {
                    let upper = a[k * n + j];
                    a[i * n + j] -= factor * upper;
                }
            }
        }
        LogDet { ln_abs, phase }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Determinant as `exp(ln_abs) * phase`, with `|phase| = 1` (or 0 if singular).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub ln_abs: f64,
    pub phase: C64,
}

impl LogDet {
    pub fn value(&self) -> C64 {
        self.phase * self.ln_abs.exp()
    }
}

/// Determinant of a small matrix given as nested rows.
pub fn det_small(rows: &[Vec<C64>]) -> C64 {
    let n = rows.len();
    CMatrix::from_fn(n, n, |i, j| rows[i][j]).det()
}

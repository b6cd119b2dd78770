//! Fredholm determinants on contour grids.
//!
//! A grid's weights already carry the `1/(2πi)` factor, so the Nyström matrix
//! of `K` is `δ_jk + w_k K(x_j, x_k)` and `det(I + K)` is its determinant.

use crate::contour::{discretize_graded, Contour, PanelGrading};
use crate::linalg::CMatrix;
use crate::parallel::map_indexed;
use crate::prelude::*;
use crate::quadrature::QuadratureGrid;
use crate::specfun::is_finite;

/// An integral kernel `K(v, v')`. Evaluation must be pure.
pub trait Kernel: Sync {
    fn evaluate(&self, v: C64, vp: C64) -> Result<C64>;

    /// `K(x_j, x_k)` on all node pairs. Kernels with cheaper structure
    /// (for example a factorization `K = A B`) override this.
    fn matrix(&self, nodes: &[C64]) -> Result<CMatrix> {
        let n = nodes.len();
        let rows = map_indexed(n, |j| {
            nodes
                .iter()
                .enumerate()
                .map(|(k, &x)| match self.evaluate(nodes[j], x) {
                    Ok(z) if is_finite(z) => Ok(z),
                    Ok(_) => Err(Error::Singularity { row: j, col: k }),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<C64>>>()
        });
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            data.extend(row?);
        }
        Ok(CMatrix::from_rows(n, n, data))
    }
}

impl<F> Kernel for F
where
    F: Fn(C64, C64) -> Result<C64> + Sync,
{
    fn evaluate(&self, v: C64, vp: C64) -> Result<C64> {
        self(v, vp)
    }
}

/// A kernel together with the contour its operator acts on.
pub struct KernelOperator<K> {
    pub kernel: K,
    pub domain: Contour,
    pub grading: PanelGrading,
}

impl<K: Kernel> KernelOperator<K> {
    pub fn new(kernel: K, domain: Contour) -> Self {
        Self { kernel, domain, grading: PanelGrading::SINGLE }
    }

    pub fn with_grading(mut self, grading: PanelGrading) -> Self {
        self.grading = grading;
        self
    }

    pub fn grid(&self, order: usize) -> Result<QuadratureGrid> {
        discretize_graded(&self.domain, order, &self.grading)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum DetMethod {
    Nystrom,
    Series,
    FiniteRank,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DetResult {
    pub value: C64,
    pub method: DetMethod,
    pub grid_order: usize,
    /// `|value - value on the coarser grid|` (Nyström) or the size of the
    /// last retained term (series).
    pub convergence_estimate: f64,
}

/// `det[δ_jk + w_k K_jk]` for a precomputed kernel matrix.
pub fn det_from_kernel_matrix(kernel: &CMatrix, grid: &QuadratureGrid) -> Result<C64> {
    let n = grid.len();
    if kernel.rows() != n || kernel.cols() != n {
        return Err(Error::Size(format!("kernel matrix is {}x{}, grid has {n} nodes", kernel.rows(), kernel.cols())));
    }
    let w = grid.weights();
    let m = CMatrix::from_fn(n, n, |j, k| {
        let delta = if j == k { 1.0 } else { 0.0 };
        w[k] * kernel[(j, k)] + delta
    });
    Ok(m.det())
}

/// `det(I + K)` on one fixed grid.
pub fn nystrom_on_grid<K: Kernel + ?Sized>(kernel: &K, grid: &QuadratureGrid) -> Result<C64> {
    let m = kernel.matrix(grid.nodes())?;
    det_from_kernel_matrix(&m, grid)
}

/// Nyström determinant at `order` nodes per panel, checked against `order / 2`.
pub fn nystrom_det<K: Kernel>(op: &KernelOperator<K>, order: usize) -> Result<DetResult> {
    let coarse_order = (order / 2).max(2);
    let fine = nystrom_on_grid(&op.kernel, &op.grid(order)?)?;
    let coarse = nystrom_on_grid(&op.kernel, &op.grid(coarse_order)?)?;
    Ok(DetResult {
        value: fine,
        method: DetMethod::Nystrom,
        grid_order: order,
        convergence_estimate: (fine - coarse).norm(),
    })
}

/// Calls `visit` with every strictly increasing index tuple of length `k`
/// drawn from `0..n`.
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let mut p = k;
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            if idx[p] < n - k + p {
                break;
            }
            if p == 0 {
                return;
            }
        }
        idx[p] += 1;
        for q in p + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Determinant of the `idx x idx` minor of `m` (sizes up to 4).
fn minor_det(m: &CMatrix, rows: &[usize], cols: &[usize]) -> C64 {
    let g = |a: usize, b: usize| m[(rows[a], cols[b])];
    match rows.len() {
        0 => C64::new(1.0, 0.0),
        1 => g(0, 0),
        2 => g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0),
        3 => {
            g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
        }
        k => CMatrix::from_fn(k, k, g).det(),
    }
}

/// Truncated Fredholm series `1 + Σ_{k ≤ max_order} (1/k!) Σ det[K(x_p, x_q)] Π w`.
///
/// Ordered tuples with a repeated node contribute zero and the remaining ones
/// come in `k!` equal permutations, so the inner sum runs over node subsets.
pub fn series_det<K: Kernel + ?Sized>(kernel: &K, grid: &QuadratureGrid, max_order: usize) -> Result<DetResult> {
    if !(1..=4).contains(&max_order) {
        return Err(Error::domain(format!("series order must be in 1..=4, got {max_order}")));
    }
    let n = grid.len();
    let kmat = kernel.matrix(grid.nodes())?;
    let w = grid.weights();
    let m = CMatrix::from_fn(n, n, |j, k| kmat[(j, k)] * w[k]);
    let mut total = C64::new(1.0, 0.0);
    let mut last = 0.0;
    for k in 1..=max_order {
        // Split by the first index so the work parallelizes deterministically.
        let parts = map_indexed(n, |first| {
            let mut acc = C64::new(0.0, 0.0);
            let rest = n - first - 1;
            let mut idx = vec![first; k];
            for_each_subset(rest, k - 1, |tail| {
                for (slot, &t) in idx[1..].iter_mut().zip(tail) {
                    *slot = first + 1 + t;
                }
                acc += minor_det(&m, &idx, &idx);
            });
            acc
        });
        let term: C64 = parts.into_iter().sum();
        total += term;
        last = term.norm();
    }
    Ok(DetResult { value: total, method: DetMethod::Series, grid_order: n, convergence_estimate: last })
}

fn check_samples(list: &[Vec<C64>], len: usize, what: &str) -> Result<()> {
    if list.iter().any(|f| f.len() != len) {
        return Err(Error::Size(format!("every {what} sample vector must have {len} entries")));
    }
    Ok(())
}

/// `det(I + AB)` on `L²(C₁)` and `det(I + BA)` on `L²(C₂)` for
/// `A(x, y) = Σ f_i(x) g_i(y)` and `B(y, x) = Σ g_i(y) f_{i+1}(x)` (indices
/// cyclic), with `f_i` sampled on `grid1` and `g_i` on `grid2`.
///
/// Both compositions are formed by quadrature and each determinant is a
/// separate Nyström computation on its own grid.
pub fn ab_ba_check(
    f_list: &[Vec<C64>],
    g_list: &[Vec<C64>],
    grid1: &QuadratureGrid,
    grid2: &QuadratureGrid,
) -> Result<(C64, C64)> {
    let r = f_list.len();
    if g_list.len() != r || r > 8 {
        return Err(Error::Size(format!("need equally many f and g (at most 8), got {r} and {}", g_list.len())));
    }
    if r == 0 {
        return Ok((C64::new(1.0, 0.0), C64::new(1.0, 0.0)));
    }
    check_samples(f_list, grid1.len(), "f")?;
    check_samples(g_list, grid2.len(), "g")?;
    let (n1, n2) = (grid1.len(), grid2.len());
    let a = CMatrix::from_fn(n1, n2, |x, y| (0..r).map(|i| f_list[i][x] * g_list[i][y]).sum());
    let b = CMatrix::from_fn(n2, n1, |y, x| (0..r).map(|i| g_list[i][y] * f_list[(i + 1) % r][x]).sum());
    let (w1, w2) = (grid1.weights(), grid2.weights());
    // (AB)(x, x') = ∫ A(x, y) B(y, x') dy on grid 2, then Nyström on grid 1.
    let a_w = CMatrix::from_fn(n1, n2, |x, y| a[(x, y)] * w2[y]);
    let ab = a_w.matmul(&b);
    let b_w = CMatrix::from_fn(n2, n1, |y, x| b[(y, x)] * w1[x]);
    let ba = b_w.matmul(&a);
    Ok((det_from_kernel_matrix(&ab, grid1)?, det_from_kernel_matrix(&ba, grid2)?))
}

/// Both sides of the Andréief identity
/// `(1/r!) ∫…∫ det[f_i(x_k)] det[g_j(x_k)] Π dx_k = det[∫ f_i g_j]`,
/// the left as an `r`-fold tensor quadrature on `grid`.
pub fn andreief_check(f_list: &[Vec<C64>], g_list: &[Vec<C64>], grid: &QuadratureGrid) -> Result<(C64, C64)> {
    let r = f_list.len();
    if g_list.len() != r || r == 0 || r > 4 {
        return Err(Error::Size(format!("need 1..=4 functions in each list, got {r} and {}", g_list.len())));
    }
    check_samples(f_list, grid.len(), "f")?;
    check_samples(g_list, grid.len(), "g")?;
    let n = grid.len();
    let w = grid.weights();
    let fm = CMatrix::from_fn(r, n, |i, k| f_list[i][k]);
    let gm = CMatrix::from_fn(r, n, |i, k| g_list[i][k]);
    let rows: Vec<usize> = (0..r).collect();
    // Distinct-node subsets; repeated nodes make both determinants vanish and
    // each subset appears r! times among ordered tuples.
    let mut lhs = C64::new(0.0, 0.0);
    for_each_subset(n, r, |idx| {
        let weight: C64 = idx.iter().map(|&k| w[k]).product();
        lhs += minor_det(&fm, &rows, idx) * minor_det(&gm, &rows, idx) * weight;
    });
    let pair = CMatrix::from_fn(r, r, |i, j| (0..n).map(|k| f_list[i][k] * g_list[j][k] * w[k]).sum());
    Ok((lhs, pair.det()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::{circle_contour, discretize, vertical_line};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn unit_circle() -> Contour {
        circle_contour(1.0, c(0.0, 0.0)).unwrap()
    }

    #[test]
    fn subsets_are_enumerated_once() {
        let mut count = 0;
        let mut prev: Option<Vec<usize>> = None;
        for_each_subset(7, 3, |s| {
            assert!(s.windows(2).all(|p| p[0] < p[1]));
            if let Some(p) = &prev {
                assert!(p.as_slice() < s);
            }
            prev = Some(s.to_vec());
            count += 1;
        });
        assert_eq!(count, 35);
        let mut empty = 0;
        for_each_subset(4, 0, |_| empty += 1);
        assert_eq!(empty, 1);
    }

    #[test]
    fn zero_kernel_has_unit_determinant() {
        let op = KernelOperator::new(|_: C64, _: C64| Ok(c(0.0, 0.0)), unit_circle());
        let d = nystrom_det(&op, 16).unwrap();
        assert_eq!(d.value, c(1.0, 0.0));
        let s = series_det(&op.kernel, &op.grid(16).unwrap(), 4).unwrap();
        assert_eq!(s.value, c(1.0, 0.0));
    }

    #[test]
    fn rank_one_kernel_on_the_unit_circle() {
        let op = KernelOperator::new(|_: C64, vp: C64| Ok(vp.inv()), unit_circle());
        let d = nystrom_det(&op, 32).unwrap();
        assert!((d.value - 2.0).norm() < 1e-10, "{}", d.value);
        assert!(d.convergence_estimate < 1e-10);
        let grid = op.grid(24).unwrap();
        for order in 1..=4 {
            let s = series_det(&op.kernel, &grid, order).unwrap();
            assert!((s.value - 2.0).norm() < 1e-10);
            if order >= 2 {
                assert!(s.convergence_estimate < 1e-10);
            }
        }
    }

    #[test]
    fn non_finite_kernel_is_a_singularity() {
        let op = KernelOperator::new(|v: C64, vp: C64| Ok((v - vp).inv()), unit_circle());
        assert!(matches!(nystrom_det(&op, 8), Err(Error::Singularity { row: 0, col: 0 })));
    }

    #[test]
    fn series_matches_nystrom_for_a_small_analytic_kernel() {
        // Rank-3 kernel with small coefficients: series through order 3 is exact.
        let k = |v: C64, vp: C64| Ok(0.3 * (v * vp).exp() * (vp - 3.0).inv() + 0.1 * v * v);
        let grid = discretize(&unit_circle(), 40).unwrap();
        let ny = nystrom_on_grid(&k, &grid).unwrap();
        let se = series_det(&k, &grid, 4).unwrap();
        assert!((ny - se.value).norm() < 1e-8, "{ny} vs {}", se.value);
    }

    #[test]
    fn refinement_stability_on_closed_contour() {
        let k = |v: C64, vp: C64| Ok(0.5 * (0.3 * v * vp).exp() / (2.5 - vp));
        let op = KernelOperator::new(k, unit_circle());
        let a = nystrom_det(&op, 32).unwrap();
        let b = nystrom_det(&op, 64).unwrap();
        assert!((a.value - b.value).norm() < 1e-8);
    }

    #[test]
    fn homotopic_circles_give_the_same_determinant() {
        // Analytic in |v| < 2.5, so every circle inside gives the same operator determinant.
        let k = |v: C64, vp: C64| Ok(0.5 * (0.3 * v * vp).exp() / (2.5 - vp) / vp);
        let a = nystrom_det(&KernelOperator::new(k, circle_contour(0.5, c(0.0, 0.0)).unwrap()), 64).unwrap();
        let b = nystrom_det(&KernelOperator::new(k, circle_contour(1.5, c(0.0, 0.0)).unwrap()), 64).unwrap();
        assert!((a.value - b.value).norm() < 1e-8, "{} vs {}", a.value, b.value);
    }

    #[test]
    fn ab_ba_edge_cases() {
        let g1 = discretize(&unit_circle(), 8).unwrap();
        let g2 = discretize(&vertical_line(0.3, 4.0).unwrap(), 8).unwrap();
        assert_eq!(ab_ba_check(&[], &[], &g1, &g2).unwrap(), (c(1.0, 0.0), c(1.0, 0.0)));
        let f = vec![g1.nodes().to_vec()];
        let g = vec![vec![c(0.0, 0.0); g2.len()]];
        let (l, r) = ab_ba_check(&f, &g, &g1, &g2).unwrap();
        assert_eq!((l, r), (c(1.0, 0.0), c(1.0, 0.0)));
    }

    #[test]
    fn ab_ba_rank_two_circle_and_line() {
        let g1 = discretize(&unit_circle(), 24).unwrap();
        let g2 = discretize(&vertical_line(0.3, 5.0).unwrap(), 24).unwrap();
        let f = vec![
            g1.nodes().iter().map(|z| z.exp() / z).collect(),
            g1.nodes().iter().map(|z| 1.0 / z + 1.0 / (z - 2.0)).collect(),
        ];
        let g = vec![
            g2.nodes().iter().map(|z| (z * z).exp()).collect(),
            g2.nodes().iter().map(|z| z / (z * z + 4.0)).collect(),
        ];
        let (l, r) = ab_ba_check(&f, &g, &g1, &g2).unwrap();
        assert!((l - r).norm() < 1e-9 * l.norm().max(1.0), "{l} vs {r}");
        assert!((l - 1.0).norm() > 1e-6, "nontrivial instance");
    }

    #[test]
    fn andreief_rank_one_is_the_pair_integral() {
        let grid = discretize(&unit_circle(), 16).unwrap();
        let f = vec![grid.nodes().iter().map(|z| z.inv()).collect::<Vec<_>>()];
        let g = vec![grid.nodes().iter().map(|z| z.exp()).collect::<Vec<_>>()];
        let (l, r) = andreief_check(&f, &g, &grid).unwrap();
        assert!((l - r).norm() < 1e-14);
        assert!((r - 1.0).norm() < 1e-12);
    }

    #[test]
    fn andreief_rank_two_on_a_circle() {
        let grid = discretize(&unit_circle(), 20).unwrap();
        let f: Vec<Vec<C64>> = vec![
            grid.nodes().iter().map(|z| z.exp() / z).collect(),
            grid.nodes().iter().map(|z| 1.0 / (z * z)).collect(),
        ];
        let g: Vec<Vec<C64>> = vec![
            grid.nodes().iter().map(|z| (2.0 * z).cos()).collect(),
            grid.nodes().iter().map(|z| z / (3.0 - z)).collect(),
        ];
        let (l, r) = andreief_check(&f, &g, &grid).unwrap();
        assert!((l - r).norm() < 1e-9 * r.norm().max(1.0), "{l} vs {r}");
    }

    #[test]
    fn andreief_zero_overlap() {
        // z^{-1-i} against z^{j}: pair integrals are δ_ij on the unit circle.
        let grid = discretize(&unit_circle(), 16).unwrap();
        let f: Vec<Vec<C64>> = (0..3).map(|i| grid.nodes().iter().map(|z| z.powi(-1 - i)).collect()).collect();
        let g: Vec<Vec<C64>> = (0..3).map(|i| grid.nodes().iter().map(|z| z.powi(i)).collect()).collect();
        let (l, r) = andreief_check(&f, &g, &grid).unwrap();
        assert!((r - 1.0).norm() < 1e-12);
        assert!((l - r).norm() < 1e-12);
    }
}

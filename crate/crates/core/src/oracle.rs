//! Independent reference computations used to validate the main pipelines.
//!
//! Nothing here shares code paths with the contour-integral evaluators beyond
//! elementary quadrature rules.

use crate::quadrature::gauss_legendre;
use crate::specfun::log_gamma_real;
use alloc::{vec, vec::Vec};
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Composite Gauss-Legendre `∫_a^b f`, panels no wider than `panel`.
pub fn composite_gl(a: f64, b: f64, panel: f64, order: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (x, w) = gauss_legendre(order);
    let panels = ((b - a) / panel).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        acc += 0.5 * h * x.iter().zip(&w).map(|(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>();
    }
    acc
}

const LOG_LEFT: f64 = -10.0;

/// Log-density of `log X` for `X ~ Γ^{-1}(θ)`: `−θ t − e^{−t} − ln Γ(θ)`.
fn log_density_in_log_x(theta: f64, t: f64, ln_gamma_theta: f64) -> f64 {
    -theta * t - (-t).exp() - ln_gamma_theta
}

/// `E[h(X)]` for inverse-Gamma `X`, by quadrature in `t = ln x` of the
/// density `Γ(θ)^{-1} x^{-θ-1} e^{-1/x}`. `growth` bounds `|h(x)| ≲ x^growth`
/// for large `x` and must be below `θ`.
pub fn inverse_gamma_expectation(theta: f64, growth: f64, mut h: impl FnMut(f64) -> f64) -> f64 {
    assert!(theta > growth, "E[h(X)] needs theta > growth");
    let lg = log_gamma_real(theta).expect("theta > 0");
    let right = 80.0 / (theta - growth) + 10.0;
    composite_gl(LOG_LEFT, right, 0.5, 20, |t| h(t.exp()) * log_density_in_log_x(theta, t, lg).exp())
}

/// `P(X ≤ x)` by quadrature of the density.
pub fn inverse_gamma_cdf(theta: f64, x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    let lg = log_gamma_real(theta).expect("theta > 0");
    composite_gl(LOG_LEFT, x.ln(), 0.5, 20, |t| log_density_in_log_x(theta, t, lg).exp()).min(1.0)
}

/// `E[exp(−u X)]` for `X ~ Γ^{-1}(θ)`.
pub fn inverse_gamma_laplace(theta: f64, u: f64) -> f64 {
    inverse_gamma_expectation(theta, 0.0, |x| (-u * x).exp())
}

const AI0: f64 = 0.355_028_053_887_817_2;
const AIP0: f64 = -0.258_819_403_792_806_8;

/// `(Ai(x), Ai'(x))`: Maclaurin series on `(−7, 6)`, asymptotic expansions
/// outside.
pub fn airy_ai(x: f64) -> (f64, f64) {
    if x >= 6.0 {
        airy_asymptotic_positive(x)
    } else if x <= -7.0 {
        airy_asymptotic_negative(-x)
    } else {
        airy_maclaurin(x)
    }
}

fn airy_maclaurin(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    // f = Σ a_k x^{3k}, g = Σ b_k x^{3k+1}
    let (mut f, mut fp, mut g, mut gp) = (0.0, 0.0, 0.0, 0.0);
    let (mut a, mut b) = (1.0, 1.0);
    let mut p = 1.0; // x^{3k}
    let mut q = x * x; // x^{3k-1}, k >= 1
    for k in 0..200 {
        let kf = k as f64;
        let tf = a * p;
        let tg = b * p * x;
        f += tf;
        g += tg;
        if k > 0 {
            fp += 3.0 * kf * a * q;
            q *= x3;
        }
        gp += (3.0 * kf + 1.0) * b * p;
        if k > 2 && tf.abs() < 1e-18 * f.abs().max(1e-300) && tg.abs() < 1e-18 * g.abs().max(1e-300) {
            break;
        }
        a /= (3.0 * kf + 2.0) * (3.0 * kf + 3.0);
        b /= (3.0 * kf + 3.0) * (3.0 * kf + 4.0);
        p *= x3;
    }
    (AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp)
}

/// Coefficients `u_k` and `v_k` of the large-argument Airy expansions.
fn airy_uv(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0];
    for k in 1..count {
        let kf = k as f64;
        let prev = u[k - 1];
        u.push(prev * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf));
    }
    let v = u
        .iter()
        .enumerate()
        .map(|(k, &uk)| if k == 0 { 1.0 } else { -(6.0 * k as f64 + 1.0) / (6.0 * k as f64 - 1.0) * uk })
        .collect();
    (u, v)
}

/// Sums `Σ_k s_k c_k / ζ^k` over `k ≡ parity (mod step)`, stopping at the smallest term.
fn asymptotic_sum(c: &[f64], zeta: f64, alternating: bool, start: usize, step: usize) -> f64 {
    let mut acc = 0.0;
    let mut last = f64::INFINITY;
    let mut sign = 1.0;
    for k in (start..c.len()).step_by(step) {
        let t = c[k] / zeta.powi(k as i32);
        if t.abs() > last {
            break;
        }
        acc += sign * t;
        last = t.abs();
        if alternating {
            sign = -sign;
        }
    }
    acc
}

fn airy_asymptotic_positive(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let (u, v) = airy_uv(40);
    let alt = |c: &[f64]| {
        let mut acc = 0.0;
        let mut last = f64::INFINITY;
        for (k, &ck) in c.iter().enumerate() {
            let t = ck / zeta.powi(k as i32);
            if t.abs() > last {
                break;
            }
            acc += if k % 2 == 0 { t } else { -t };
            last = t.abs();
        }
        acc
    };
    let e = (-zeta).exp() / (2.0 * core::f64::consts::PI.sqrt());
    (e / x.powf(0.25) * alt(&u), -e * x.powf(0.25) * alt(&v))
}

/// `(Ai(−z), Ai'(−z))` for large `z > 0`.
fn airy_asymptotic_negative(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let (u, v) = airy_uv(40);
    let (s, c) = (zeta - core::f64::consts::FRAC_PI_4).sin_cos();
    let sp = core::f64::consts::PI.sqrt();
    let ai =
        (c * asymptotic_sum(&u, zeta, true, 0, 2) + s * asymptotic_sum(&u, zeta, true, 1, 2)) / (sp * z.powf(0.25));
    let aip = z.powf(0.25) / sp * (s * asymptotic_sum(&v, zeta, true, 0, 2) - c * asymptotic_sum(&v, zeta, true, 1, 2));
    (ai, aip)
}

/// `det(I − K_Ai)` on `L²(r, ∞)`, truncated to `[r, r + 16]`, with `order`
/// Gauss-Legendre nodes.
pub fn airy_kernel_determinant(r: f64, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = 8.0;
    let xs: Vec<f64> = x.iter().map(|t| r + h * (t + 1.0)).collect();
    let ws: Vec<f64> = w.iter().map(|t| h * t).collect();
    let ai: Vec<(f64, f64)> = xs.iter().map(|&t| airy_ai(t)).collect();
    let n = xs.len();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let k = if i == j {
                ai[i].1 * ai[i].1 - xs[i] * ai[i].0 * ai[i].0
            } else {
                (ai[i].0 * ai[j].1 - ai[i].1 * ai[j].0) / (xs[i] - xs[j])
            };
            m[i * n + j] = if i == j { 1.0 } else { 0.0 } - ws[i].sqrt() * k * ws[j].sqrt();
        }
    }
    real_det(&mut m, n)
}

fn real_det(m: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&a, &b| m[a * n + c].abs().total_cmp(&m[b * n + c].abs())).unwrap_or(c);
        if m[p * n + c] == 0.0 {
            return 0.0;
        }
        if p != c {
            for j in 0..n {
                m.swap(p * n + j, c * n + j);
            }
            det = -det;
        }
        let piv = m[c * n + c];
        det *= piv;
        for i in (c + 1)..n {
            let f = m[i * n + c] / piv;
            for j in c..n {
                m[i * n + j] -= f * m[c * n + j];
            }
        }
    }
    det
}

/// Gauss-Hermite nodes and weights for `∫ e^{−x²} f(x) dx`, ascending, by
/// Newton iteration on the orthonormal recurrence.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..m {
        // Initial guesses from Numerical Recipes' gauher.
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let (p, d) = hermite_orthonormal(n, z);
            pp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = hermite_orthonormal(n, z);
        if d != 0.0 {
            pp = d;
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    x.reverse();
    w.reverse();
    (x, w)
}

/// Orthonormal Hermite `p_n(z)` and `p_n'(z)` (scaled as in gauher).
fn hermite_orthonormal(n: usize, z: f64) -> (f64, f64) {
    let pim4 = core::f64::consts::PI.powf(-0.25);
    let mut p1 = pim4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    let d = (2.0 * n as f64).sqrt() * p2;
    (p1, d)
}

/// `E[exp(−u e^{a t + √t ξ})]` for standard normal `ξ`.
pub fn lognormal_laplace(u: f64, drift: f64, t: f64) -> f64 {
    let (x, w) = gauss_hermite(120);
    let s = (2.0 * t).sqrt();
    let norm = core::f64::consts::PI.sqrt();
    x.iter().zip(&w).map(|(&x, &w)| w * (-u * (drift * t + s * x).exp()).exp()).sum::<f64>() / norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::digamma;

    #[test]
    fn inverse_gamma_density_is_normalized() {
        for theta in [0.3, 1.0, 1.5, 3.0, 8.0] {
            assert!((inverse_gamma_expectation(theta, 0.0, |_| 1.0) - 1.0).abs() < 1e-12, "theta {theta}");
            // Upper tail ~ x^{-θ} / (θ Γ(θ)).
            let tail = (1e6f64).powf(-theta) / (theta * log_gamma_real(theta).unwrap().exp());
            assert!((inverse_gamma_cdf(theta, 1e6) - (1.0 - tail)).abs() < 0.01 * tail + 1e-12, "theta {theta}");
        }
    }

    #[test]
    fn inverse_gamma_moments() {
        // E[X] = 1/(θ-1), E[log X] = -Ψ(θ).
        for theta in [1.5, 3.0, 6.0] {
            assert!((inverse_gamma_expectation(theta, 1.0, |x| x) - 1.0 / (theta - 1.0)).abs() < 1e-11);
            assert!((inverse_gamma_expectation(theta, 0.5, f64::ln) + digamma(theta).unwrap()).abs() < 1e-11);
        }
    }

    #[test]
    fn inverse_gamma_cdf_at_theta_one() {
        // θ = 1: P(X ≤ x) = P(G ≥ 1/x) = e^{-1/x}.
        for x in [0.1, 0.5, 1.0, 4.0] {
            assert!((inverse_gamma_cdf(1.0, x) - (-1.0 / x).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn laplace_at_theta_half() {
        // X = 1/G with G ~ Gamma(1/2): E[e^{-uX}] = e^{-2 sqrt(u)}.
        for u in [0.25, 1.0, 4.0] {
            assert!((inverse_gamma_laplace(0.5, u) - (-2.0 * u.sqrt()).exp()).abs() < 1e-12);
        }
    }
    #[test]
    fn airy_reference_values() {
        let (a, d) = airy_ai(0.0);
        assert_eq!((a, d), (AI0, AIP0));
        // Ai(1), Ai'(1), Ai(-1), Ai(2) from standard tables.
        assert!((airy_ai(1.0).0 - 0.135_292_416_312_881_4).abs() < 1e-14);
        assert!((airy_ai(1.0).1 + 0.159_147_441_296_793_2).abs() < 1e-14);
        assert!((airy_ai(-1.0).0 - 0.535_560_883_292_352_1).abs() < 1e-14);
        assert!((airy_ai(2.0).0 - 0.034_924_130_423_274_38).abs() < 1e-14);
    }

    #[test]
    fn airy_across_branches() {
        // Frozen from an arbitrary-precision reference.
        let table = [
            (6.0, 9.947_694_360_252_89e-6, -2.476_520_039_703_495e-5),
            (6.5, 2.795_882_343_204_914e-6, -7.231_931_466_601_793e-6),
            (-7.0, 0.184_280_835_250_505_6, -0.771_008_168_410_126_5),
            (-7.5, 0.321_775_716_380_647_9, 0.318_809_506_698_554_6),
            (-9.0, -0.022_133_721_547_341_4, -0.975_663_980_926_331_6),
        ];
        for (x, a, d) in table {
            let (ga, gd) = airy_ai(x);
            assert!((ga - a).abs() < 1e-10 * a.abs().max(1e-2), "Ai({x}) = {ga}");
            assert!((gd - d).abs() < 1e-10 * d.abs().max(1e-2), "Ai'({x}) = {gd}");
        }
        // y'' = x y by finite differences.
        for x in [-9.0, -3.0, 0.5, 4.0, 8.0] {
            let h = 1e-4;
            let ypp = (airy_ai(x + h).1 - airy_ai(x - h).1) / (2.0 * h);
            assert!((ypp - x * airy_ai(x).0).abs() < 1e-7, "x = {x}");
        }
    }

    #[test]
    fn airy_determinant_reference_values() {
        // Frozen from an independent dense-linear-algebra evaluation at 200 nodes.
        for (r, f) in [
            (-6.0, 1.062_254_674e-8),
            (-2.0, 0.413_224_142_505_143_6),
            (0.0, 0.969_372_828_355_266),
            (2.0, 0.999_887_553_698_309_5),
        ] {
            let got = airy_kernel_determinant(r, 80);
            assert!((got - f).abs() < 1e-12, "r = {r}: {got}");
        }
        assert!(airy_kernel_determinant(-8.0, 80).abs() < 1e-12);
        assert!(airy_kernel_determinant(6.0, 80) > 0.9999);
    }

    #[test]
    fn gauss_hermite_moments() {
        let (x, w) = gauss_hermite(40);
        let sp = core::f64::consts::PI.sqrt();
        assert!((w.iter().sum::<f64>() - sp).abs() < 1e-13);
        let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        assert!((m2 - sp / 2.0).abs() < 1e-13);
        // E[e^{√t ξ}] = e^{t/2} as a lognormal check.
        let (x, w) = gauss_hermite(120);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * (2f64.sqrt() * x).exp()).sum::<f64>() / sp;
        assert!((m - 0.5f64.exp()).abs() < 1e-12);
    }
}

//! Complex log-Gamma and friends, real digamma/polygamma.
//!
//! `log_gamma` is the principal branch: the analytic continuation of the real
//! `ln Γ(x)` from the positive axis to the plane cut along `(-inf, 0]`. It is
//! computed by shifting the argument with `ln Γ(z) = ln Γ(z + m) - Σ ln(z + k)`
//! until the Stirling series is accurate. Each `ln(z + k)` is analytic on the
//! cut plane, so the sum is the principal branch without any phase repair.

use crate::prelude::*;
use core::f64::consts::PI;

/// Distance to a non-positive integer below which an argument is a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// `B_{2k} / (2k (2k - 1))`, k = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// Even Bernoulli numbers `B_2 .. B_18`.
const BERNOULLI: [f64; 9] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
];

pub(crate) fn is_finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub(crate) fn check_finite(z: C64, what: &str) -> Result<()> {
    if is_finite(z) {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} must be finite, got {z}")))
    }
}

/// True when `z` lies within [`POLE_TOLERANCE`] of `0, -1, -2, ...`.
pub fn near_gamma_pole(z: C64) -> bool {
    if z.re > 0.5 {
        return false;
    }
    let k = z.re.round();
    k <= 0.0 && (z - k).norm() < POLE_TOLERANCE
}

fn stirling(z: C64) -> C64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = C64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_TWO_PI + series
}

fn log_gamma_upper(z: C64) -> C64 {
    let mut shift = C64::new(0.0, 0.0);
    let mut w = z;
    while w.re < 0.0 || w.norm() < 10.0 {
        shift += w.ln();
        w += 1.0;
    }
    stirling(w) - shift
}

/// Principal branch of `ln Γ(z)`.
pub fn log_gamma(z: C64) -> Result<C64> {
    check_finite(z, "log_gamma argument")?;
    if near_gamma_pole(z) {
        return Err(Error::Pole(format!("Γ has a pole at {z}")));
    }
    Ok(log_gamma_unchecked(z))
}

/// `ln Γ(z)` without the pole check; callers guarantee `z` is admissible.
pub(crate) fn log_gamma_unchecked(z: C64) -> C64 {
    // Evaluate in the closed upper half plane so that conjugate symmetry is exact.
    if z.im < 0.0 {
        log_gamma_upper(z.conj()).conj()
    } else {
        log_gamma_upper(z)
    }
}

pub fn gamma(z: C64) -> Result<C64> {
    log_gamma(z).map(|l| l.exp())
}

/// `1 / Γ(z)`, an entire function; exactly zero at the poles of `Γ`.
pub fn reciprocal_gamma(z: C64) -> C64 {
    if !is_finite(z) || near_gamma_pole(z) {
        return C64::new(0.0, 0.0);
    }
    (-log_gamma_unchecked(z)).exp()
}

pub fn log_gamma_real(x: f64) -> Result<f64> {
    log_gamma(C64::new(x, 0.0)).map(|l| l.re)
}

pub fn digamma(x: f64) -> Result<f64> {
    polygamma(0, x)
}

/// `ψ^{(k)}(x)` for `k ∈ {0, 1, 2, 3}` and `x > 0`.
pub fn polygamma(k: u32, x: f64) -> Result<f64> {
    if k > 3 {
        return Err(Error::domain(format!("polygamma order {k} not supported (0..=3)")));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("polygamma requires x > 0, got {x}")));
    }
    let fact = [1.0, 1.0, 2.0, 6.0][k as usize];
    // ψ^{(k)}(x) = ψ^{(k)}(x + 1) - (-1)^k k! / x^{k+1}
    let sign_k = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut shift = 0.0;
    let mut y = x;
    while y < 15.0 {
        shift -= sign_k * fact / y.powi(k as i32 + 1);
        y += 1.0;
    }
    Ok(shift + polygamma_asymptotic(k, y))
}

fn polygamma_asymptotic(k: u32, x: f64) -> f64 {
    let inv = 1.0 / x;
    if k == 0 {
        let inv2 = inv * inv;
        let mut sum = 0.0;
        let mut pow = inv2;
        for (j, b) in BERNOULLI.iter().enumerate() {
            sum += b / (2.0 * (j as f64 + 1.0)) * pow;
            pow *= inv2;
        }
        return x.ln() - 0.5 * inv - sum;
    }
    // (-1)^{k+1} [ (k-1)!/x^k + k!/(2 x^{k+1}) + Σ B_{2j} (2j+k-1)! / ((2j)! x^{2j+k}) ]
    let k_i = k as i32;
    let fact_km1 = [1.0, 1.0, 1.0, 2.0][k as usize];
    let fact_k = [1.0, 1.0, 2.0, 6.0][k as usize];
    let mut sum = fact_km1 * inv.powi(k_i) + 0.5 * fact_k * inv.powi(k_i + 1);
    for (j, b) in BERNOULLI.iter().enumerate() {
        let two_j = 2 * (j as i32 + 1);
        // (2j + k - 1)! / (2j)! = Π_{m=1}^{k-1} (2j + m)
        let mut ratio = 1.0;
        for m in 1..k_i {
            ratio *= (two_j + m) as f64;
        }
        sum += b * ratio * inv.powi(two_j + k_i);
    }
    if k % 2 == 1 {
        sum
    } else {
        -sum
    }
}

/// `sin(π z)` with the argument reduced modulo 2 on the real part, so that
/// zeros at integers are reproduced to rounding of the reduced argument.
pub fn sin_pi(z: C64) -> C64 {
    let r = z.re - 2.0 * (z.re / 2.0).round();
    (C64::new(r, z.im) * PI).sin()
}

/// `π / sin(π z)`, the product `Γ(z) Γ(1 - z)`.
pub fn pi_over_sin_pi(z: C64) -> C64 {
    C64::new(PI, 0.0) / sin_pi(z)
}

/// `ln |Γ(z)|` via the principal branch; continuous across the branch cut.
pub fn log_abs_gamma(z: C64) -> Result<f64> {
    log_gamma(z).map(|l| l.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// (re, im, Re ln Γ, Im ln Γ) from a 30-digit reference evaluation.
    const LOG_GAMMA_REFERENCE: [(f64, f64, f64, f64); 10] = [
        (0.5, 0.0, 0.57236494292470008707, 0.0),
        (3.0, 0.0, core::f64::consts::LN_2, 0.0),
        (1.0, 10.0, -13.637732188247270609, 13.802912974229900694),
        (-2.5, 0.3, -0.43208889261320192052, -9.0933454212897415073),
        (0.2, -7.0, -10.660245035487833116, -6.1496540620873310195),
        (-7.3, 4.1, -19.146838884439437866, -15.905387270574618437),
        (12.0, -30.0, -6.8216171094237581859, -87.948161277706036425),
        (-30.2, 1.5, -78.180304718363324168, -91.30991469511781818),
        (0.01, 0.02, 3.7944367207828294344, -1.1183633070517473198),
        (-0.5, 40.0, -65.601872111602248414, 105.97292419339480294),
    ];

    #[test]
    fn log_gamma_matches_reference_branch() {
        for (re, im, lre, lim) in LOG_GAMMA_REFERENCE {
            let got = log_gamma(c(re, im)).unwrap();
            let want = c(lre, lim);
            assert!((got - want).norm() <= 1e-13 * want.norm().max(1.0), "z = {re}+{im}i: {got} vs {want}");
            // relative error of Γ itself
            let rel = ((got - want).exp() - 1.0).norm();
            assert!(rel <= 1e-13, "Γ relative error {rel:e} at {re}+{im}i");
        }
    }

    #[test]
    fn trivial_values() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert_relative_eq!(log_gamma(c(3.0, 0.0)).unwrap().re, 2f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(gamma(c(4.0, 0.0)).unwrap().re, 6.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(c(0.5, 0.0)).unwrap().re, PI.sqrt(), max_relative = 1e-14);
        assert_eq!(reciprocal_gamma(c(0.0, 0.0)), c(0.0, 0.0));
        assert_eq!(reciprocal_gamma(c(-2.0, 0.0)), c(0.0, 0.0));
        assert_relative_eq!(reciprocal_gamma(c(1.0, 0.0)).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn half_is_log_sqrt_pi_by_reflection() {
        // Γ(-s)Γ(1+s) = π / sin(-πs) at s = -1/2 gives Γ(1/2)^2 = π.
        let want = 0.5 * PI.ln();
        assert_relative_eq!(log_gamma(c(0.5, 0.0)).unwrap().re, want, epsilon = 1e-14);
        assert!((want - 0.5723649429).abs() < 1e-10);
    }

    #[test]
    fn poles_are_rejected() {
        for k in 0..5 {
            let z = c(-(k as f64), 0.0);
            assert!(matches!(log_gamma(z), Err(Error::Pole(_))));
            assert!(matches!(gamma(z + 1e-13), Err(Error::Pole(_))));
        }
        assert!(gamma(c(-3.0, 1e-9)).is_ok());
        assert!(matches!(log_gamma(c(f64::NAN, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn stirling_magnitude_at_one_plus_ten_i() {
        let y: f64 = 10.0;
        let x: f64 = 1.0;
        let g = gamma(c(x, y)).unwrap().norm();
        let scaled = g * (PI * y / 2.0).exp() * y.powf(0.5 - x);
        assert!((scaled / (2.0 * PI).sqrt() - 1.0).abs() < 0.02);
    }

    #[test]
    fn decay_asymptotics_on_vertical_lines() {
        for &x in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            for &y in &[30.0, -45.0, 80.0] {
                let z = c(x, y);
                if near_gamma_pole(z) {
                    continue;
                }
                let ln_scaled = log_gamma(z).unwrap().re + PI * f64::abs(y) / 2.0 + (0.5 - x) * f64::abs(y).ln();
                let ratio = (ln_scaled - 0.5 * (2.0 * PI).ln()).exp();
                assert!((ratio - 1.0).abs() < 0.01, "x={x} y={y} ratio={ratio}");
            }
        }
    }

    #[test]
    fn conjugate_symmetry_is_exact() {
        for &(re, im) in &[(0.3, 2.0), (-4.7, 0.9), (11.0, 33.0), (-0.2, 0.001)] {
            let z = c(re, im);
            assert_eq!(gamma(z.conj()).unwrap(), gamma(z).unwrap().conj());
        }
    }

    #[test]
    fn digamma_polygamma_reference() {
        // (x, ψ, ψ', ψ'', ψ''') from a 30-digit reference evaluation.
        let table: [(f64, [f64; 4]); 5] = [
            (0.05, [-20.497844991299869257, 401.53235734211507489, -16002.108158021942769, 960005.38832231298212]),
            (0.25, [-4.2274535333762654081, 17.197329154507110739, -129.32773993753692033, 1538.782144009188396]),
            (1.0, [-0.57721566490153286061, 1.6449340668482264365, -2.4041138063191885708, 6.4939394022668291491]),
            (2.5, [0.70315664064524318723, 0.49035775610023486497, -0.236204051641727403, 0.22390584881725205126]),
            (7.3, [1.9178203356379860723, 0.14679576813142710199, -0.021510814441620252037, 0.0062931587131984897116]),
        ];
        for (x, vals) in table {
            for (k, want) in vals.iter().enumerate() {
                let got = polygamma(k as u32, x).unwrap();
                let tol = 1e-12 * want.abs().max(1.0);
                assert!((got - want).abs() <= tol, "ψ^({k})({x}) = {got}, want {want}");
            }
        }
    }

    #[test]
    fn digamma_examples() {
        assert!((digamma(1.0).unwrap() + 0.5772156649).abs() < 1e-10);
        assert!((digamma(2.0).unwrap() - digamma(1.0).unwrap() - 1.0).abs() < 1e-14);
        // Σ 1/k^2 summed directly with an integral tail correction.
        let n = 100_000;
        let partial: f64 = (1..=n).map(|k| 1.0 / (k as f64 * k as f64)).sum();
        let tail = 1.0 / n as f64 - 0.5 / (n as f64).powi(2);
        assert!((polygamma(1, 1.0).unwrap() - (partial + tail)).abs() < 1e-12);
        assert!(matches!(digamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(polygamma(2, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn sin_pi_exact_zeros() {
        for k in -5..6 {
            assert!(sin_pi(c(k as f64, 0.0)).norm() < 1e-15);
        }
    }
}

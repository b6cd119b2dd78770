//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use lgpoly_core::asymptotics::{
    critical_constants, fluctuation_experiment, g_derivative, small_gamma_residuals, TwTable,
};
use lgpoly_core::contour::{circle_contour, discretize, vertical_line};
use lgpoly_core::fredholm::{ab_ba_check, andreief_check};
use lgpoly_core::kernels::{
    cauchy_determinant_check, decay_diagnostics, laplace_via_finite_rank, laplace_via_nfold, laplace_via_nystrom,
    residue_check, semi_discrete_laplace, tw_cdf, KernelParams, SymbolF, TwSettings,
};
use lgpoly_core::oracle::{airy_kernel_determinant, inverse_gamma_laplace, lognormal_laplace};
use lgpoly_core::polymer::{monte_carlo_laplace_many, PolymerParams};
use lgpoly_core::{Complex64 as C64, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

const ZETA3: f64 = 1.202_056_903_159_594_3;
const MC_SAMPLES: usize = 1_000_000;
const SEED: u64 = 20_240_601;

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

fn deterministic(p: &PolymerParams, u: f64) -> Result<[f64; 3]> {
    let kp = KernelParams::default_for(vec![])?;
    Ok([
        laplace_via_nfold(p, u, kp.delta1, 15.0, 16)?.value,
        laplace_via_nystrom(p, u, &kp, 64)?.value,
        laplace_via_finite_rank(p, u, &kp)?.value,
    ])
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn criterion_1() -> Outcome {
    let us = [0.5, 1.0, 2.0];
    let mut cases: Vec<(String, PolymerParams)> = Vec::new();
    for (n, big_n) in [(1, 1), (2, 1), (2, 2), (3, 2)] {
        cases.push((format!("homogeneous n={n} N={big_n}"), PolymerParams::homogeneous(1.0, n, big_n)?));
    }
    cases.push(("alpha=(1.2,1.0,1.1) a=(0,0.05)".into(), PolymerParams::new(vec![1.2, 1.0, 1.1], vec![0.0, 0.05])?));
    let (mut worst_rel, mut worst_z) = (0.0f64, 0.0f64);
    for (k, (_, p)) in cases.iter().enumerate() {
        let mc = monte_carlo_laplace_many(p, &us, MC_SAMPLES, SEED + k as u64)?;
        for (&u, &(mean, se)) in us.iter().zip(&mc) {
            let d = deterministic(p, u)?;
            for i in 0..3 {
                for j in i + 1..3 {
                    worst_rel = worst_rel.max(rel(d[i], d[j]));
                }
                worst_z = worst_z.max((d[i] - mean).abs() / se);
            }
        }
    }
    Ok((
        worst_rel <= 1e-6 && worst_z <= 3.0,
        format!(
            "{} cases x 3 u: max pairwise rel. deviation {worst_rel:.2e}, max |MC − det|/SE {worst_z:.2}",
            cases.len()
        ),
    ))
}

fn criterion_2() -> Outcome {
    let p = PolymerParams::homogeneous(1.0, 1, 1)?;
    let us = [0.5, 1.0, 2.0];
    let mc = monte_carlo_laplace_many(&p, &us, MC_SAMPLES, SEED)?;
    let (mut worst, mut worst_z) = (0.0f64, 0.0f64);
    for (&u, &(mean, se)) in us.iter().zip(&mc) {
        let exact = inverse_gamma_laplace(1.0, u);
        for v in deterministic(&p, u)? {
            worst = worst.max((v - exact).abs());
        }
        worst_z = worst_z.max((mean - exact).abs() / se);
    }
    Ok((worst <= 1e-6 && worst_z <= 3.0, format!("max |det − oracle| {worst:.2e}, max |MC − oracle|/SE {worst_z:.2}")))
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    for p in [PolymerParams::homogeneous(1.0, 2, 2)?, PolymerParams::new(vec![1.2, 1.0, 1.1], vec![0.0, 0.05])?] {
        for u in [0.5, 2.0] {
            let a = laplace_via_nystrom(&p, u, &KernelParams::new(0.1, 0.5, vec![])?, 64)?.value;
            let b = laplace_via_nystrom(&p, u, &KernelParams::new(0.2, 0.5, vec![])?, 64)?.value;
            worst = worst.max((a - b).abs());
        }
    }
    Ok((worst <= 1e-7, format!("max |det(δ1=0.1) − det(δ1=0.2)| {worst:.2e}")))
}

fn criterion_4() -> Outcome {
    let (mut d12, mut d3) = (0.0f64, 0.0f64);
    for gamma in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let k = critical_constants(gamma)?;
        let t = C64::new(k.t_bar, 0.0);
        d12 = d12.max(g_derivative(1, t, gamma)?.norm()).max(g_derivative(2, t, gamma)?.norm());
        d3 = d3.max((-g_derivative(3, t, gamma)? - k.g_bar).norm());
    }
    // Residual ladder γ = 0.2, 0.1, 0.05, 0.025: f residual halves (O(γ)),
    // g residual converges to 4ζ(3) (O(1)) with an O(γ) error that halves.
    let ladder: Vec<(f64, f64)> =
        [0.2, 0.1, 0.05, 0.025].iter().map(|&g| small_gamma_residuals(g)).collect::<Result<_>>()?;
    let f_ratios: Vec<f64> = ladder.windows(2).map(|w| w[0].0 / w[1].0).collect();
    let g_ratios: Vec<f64> = ladder.windows(2).map(|w| (w[0].1 - 4.0 * ZETA3) / (w[1].1 - 4.0 * ZETA3)).collect();
    let halving = |r: &[f64]| r.iter().all(|x| (x - 2.0).abs() < 0.3);
    let ok = d12 <= 1e-10 && d3 <= 1e-8 && halving(&f_ratios) && halving(&g_ratios);
    Ok((
        ok,
        format!(
            "max |G'|,|G''| {d12:.1e}, max |−G''' − ḡ| {d3:.1e}, f̄ residual ratios {f_ratios:.3?}, ḡ residual ratios {g_ratios:.3?}"
        ),
    ))
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    for r in [-2.0, 0.0, 2.0] {
        worst = worst.max((tw_cdf(r, 16, 8.0)? - airy_kernel_determinant(r, 80)).abs());
    }
    let grid: Vec<f64> = (0..=40).map(|i| -6.0 + 0.25 * i as f64).map(|r| tw_cdf(r, 16, 8.0)).collect::<Result<_>>()?;
    let monotone = grid.windows(2).all(|p| p[1] >= p[0]);
    let (lo, hi) = (tw_cdf(-8.0, 16, 8.0)?, tw_cdf(6.0, 16, 8.0)?);
    Ok((
        worst <= 1e-6 && monotone && lo <= 1e-4 && hi >= 0.9999,
        format!("max |F − oracle| {worst:.2e}, monotone on [-6,4]: {monotone}, F(-8) = {lo:.2e}, F(6) = {hi:.12}"),
    ))
}

fn criterion_6() -> Outcome {
    let table = TwTable::build(&TwSettings::default())?;
    let rows = fluctuation_experiment(0.5, &[32, 64, 128, 256], 10_000, SEED, &table)?;
    let ks: Vec<f64> = rows.iter().map(|r| r.ks).collect();
    let decreasing = ks.windows(2).all(|p| p[1] <= p[0]);
    let last = *ks.last().unwrap_or(&1.0);
    Ok((last <= 0.05 && decreasing, format!("KS over n = 32, 64, 128, 256: {ks:.4?}")))
}

fn random_c(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let circle = discretize(&circle_contour(1.0, C64::new(0.0, 0.0))?, 16)?;
    let line = discretize(&vertical_line(0.5, 3.0)?, 8)?;
    let sample = |rng: &mut ChaCha8Rng, nodes: &[C64]| {
        let (a, b) = (random_c(rng), random_c(rng));
        nodes.iter().map(|&z| (a * z).exp() + b / (z - 2.5)).collect::<Vec<C64>>()
    };
    let (mut andreief, mut abba, mut cauchy, mut residue) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let r = rng.random_range(1..=3);
        let f: Vec<_> = (0..r).map(|_| sample(&mut rng, circle.nodes())).collect();
        let g: Vec<_> = (0..r).map(|_| sample(&mut rng, circle.nodes())).collect();
        let (l, rr) = andreief_check(&f, &g, &circle)?;
        andreief = andreief.max((l - rr).norm() / rr.norm().max(1.0));

        let r = rng.random_range(1..=4);
        let f: Vec<_> = (0..r).map(|_| sample(&mut rng, circle.nodes())).collect();
        let g: Vec<_> = (0..r).map(|_| sample(&mut rng, line.nodes())).collect();
        let (l, rr) = ab_ba_check(&f, &g, &circle, &line)?;
        abba = abba.max((l - rr).norm() / rr.norm().max(1.0));

        let size = rng.random_range(1..=6);
        let a: Vec<C64> = (0..size).map(|i| random_c(&mut rng) + 3.0 * i as f64).collect();
        let w: Vec<C64> = (0..size).map(|i| random_c(&mut rng) + 3.0 * i as f64 + 1.5).collect();
        let (d, closed) = cauchy_determinant_check(&a, &w)?;
        cauchy = cauchy.max((d - closed).norm() / closed.norm());

        let n = rng.random_range(1..=4);
        let big_n = rng.random_range(1..=n);
        let alphas: Vec<f64> = (0..n).map(|_| rng.random_range(0.6..2.0)).collect();
        let a: Vec<f64> = (0..big_n).map(|i| -0.18 + 0.12 * i as f64 + rng.random_range(0.0..0.02)).collect();
        let symbol = SymbolF::log_gamma(rng.random_range(0.2..5.0), alphas)?;
        let i = rng.random_range(0..big_n);
        residue = residue.max((residue_check(&symbol, &a, i)? + 1.0).norm());
    }
    let ok = andreief <= 1e-8 && abba <= 1e-8 && cauchy <= 1e-8 && residue <= 1e-8;
    Ok((
        ok,
        format!(
            "100 instances each: Andréief {andreief:.1e}, AB/BA {abba:.1e}, Cauchy {cauchy:.1e}, residue {residue:.1e}"
        ),
    ))
}

fn criterion_8() -> Outcome {
    let kp = KernelParams::new(0.15, 0.5, vec![])?;
    let mut worst = 0.0f64;
    for t in [1.0, 2.0] {
        for u in [0.5, 1.0] {
            for a in [0.0, 0.05] {
                let v = semi_discrete_laplace(1, t, &[a], u, &kp)?.value;
                worst = worst.max((v - lognormal_laplace(u, a, t)).abs());
            }
        }
    }
    Ok((worst <= 1e-5, format!("8 cases: max |det − Gauss-Hermite| {worst:.2e}")))
}

fn criterion_9() -> Outcome {
    let mut ok = true;
    let mut last = 0.0f64;
    for (n, big_n) in [(1, 1), (2, 1), (2, 2), (3, 2), (4, 4), (5, 3)] {
        let symbol = SymbolF::log_gamma(1.0, vec![1.0; n])?;
        let r = decay_diagnostics(&symbol, big_n, &KernelParams::default_for(vec![0.0; big_n])?, 60.0)?;
        ok &= r.passed();
        last = last.max(r.segments.iter().filter(|s| s.height == 40.0).map(|s| s.value).fold(0.0, f64::max));
    }
    Ok((
        ok,
        format!("6 (n, N) pairs: lines finite and segments decreasing; max segment integral at M = 40: {last:.1e}"),
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("identity across nfold / nystrom / finite-rank / Monte Carlo", criterion_1),
        ("n = N = 1 inverse-Gamma oracle", criterion_2),
        ("contour deformation invariance in delta1", criterion_3),
        ("critical-point identities and small-gamma residuals", criterion_4),
        ("Tracy-Widom evaluator vs Airy oracle", criterion_5),
        ("fluctuation experiment KS distance", criterion_6),
        ("Andreief, AB-BA, Cauchy and residue identities", criterion_7),
        ("semi-discrete N = 1 vs Gauss-Hermite", criterion_8),
        ("decay-condition diagnostics", criterion_9),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(x) => x,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {}: {} | {name} | {detail} | {:.1}s",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
}

//! The acceptance criteria as runnable checks.
//!
//! Each criterion draws its random fields from its own ChaCha stream of the
//! suite seed, so criteria can run alone or in any order with identical
//! results.

use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, PI};

use kslab::calculus::{
    bump, heaviside_delta_residual, mollify, sobolev_norm, weak_derivative_residual, ws_norm, DerivativeEngine,
};
use kslab::cubes::{pairing, unpair};
use kslab::expr::parse;
use kslab::hk::{hk_integral, ImproperSpec};
use kslab::ks::{ks_norm, ks_sup_norm};
use kslab::spectral::{bessel_potential, divergence, mean_operator, solve_divergence, ws_bessel_norm, DiscreteMeasure};
use kslab::{Error, GridBox, GridField, KsConfig};
use rand::Rng;

use crate::fields::{band_limited_2d, periodic_line, rng, smooth_line};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    pub fn line(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        format!("{status} [{:>2}] {}: {}", self.id, self.name, self.detail)
    }
}

pub const CRITERIA: u32 = 12;

pub fn name(id: u32) -> &'static str {
    match id {
        1 => "embedding inequality",
        2 => "weak to strong convergence",
        3 => "KS^inf dominance",
        4 => "mollifier contraction and convergence",
        5 => "integration-by-parts residuals",
        6 => "Sobolev-KS embedding",
        7 => "Bessel identities",
        8 => "Bessel-norm monotonicity",
        9 => "divergence solver",
        10 => "mean-operator decay",
        11 => "improper integration",
        12 => "structural properties",
        _ => panic!("no criterion {id}"),
    }
}

pub fn run(id: u32, seed: u64) -> Outcome {
    let result = match id {
        1 => embedding(seed),
        2 => weak_to_strong(),
        3 => sup_dominance(seed),
        4 => mollifier(),
        5 => integration_by_parts(),
        6 => sobolev_embedding(seed),
        7 => bessel_identities(seed),
        8 => bessel_monotonicity(seed),
        9 => divergence_solver(seed),
        10 => mean_operator_decay(),
        11 => improper(),
        12 => structural(seed),
        _ => panic!("no criterion {id}"),
    };
    let (pass, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    Outcome {
        id,
        name: name(id),
        pass,
        detail,
    }
}

pub fn run_all(seed: u64) -> Vec<Outcome> {
    (1..=CRITERIA).map(|id| run(id, seed)).collect()
}

type Check = kslab::Result<(bool, String)>;

fn line(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> kslab::Result<GridField> {
    GridField::from_fn(&GridBox::cube(a, b, 1)?, &[n], |x| f(x[0]))
}

fn ks1() -> KsConfig {
    KsConfig::with_dim(1)
}

fn embedding(seed: u64) -> Check {
    let ks = ks1();
    let mut rng = rng(seed, 1);
    let (mut violations, mut worst) = (0, f64::NEG_INFINITY);
    for _ in 0..50 {
        let f = smooth_line(&mut rng, -1.0, 1.0, 512);
        let excess = ks_norm(&f, 2.0, &ks).value - f.lp_norm(2.0);
        worst = worst.max(excess);
        if excess > 1e-9 {
            violations += 1;
        }
    }
    Ok((
        violations == 0,
        format!("{violations}/50 violations; max ks2 - l2 = {worst:.3e}"),
    ))
}

fn weak_to_strong() -> Check {
    let ks = ks1();
    let mut l2_err = 0.0f64;
    let mut norms = Vec::new();
    for n in [1.0, 2.0, 4.0, 8.0, 16.0] {
        let f = line(0.0, 1.0, 4096, |x| (2.0 * PI * n * x).sin())?;
        l2_err = l2_err.max((f.lp_norm(2.0) - 0.70710678).abs());
        norms.push(ks_norm(&f, 2.0, &ks).value);
    }
    let decreasing = norms.windows(2).all(|w| w[1] < w[0]);
    let ratio = norms[4] / norms[0];
    let pass = l2_err < 0.01 && decreasing && ratio < 0.2;
    let listed: Vec<String> = norms.iter().map(|v| format!("{v:.4e}")).collect();
    Ok((
        pass,
        format!(
            "max |l2 - 0.70710678| = {l2_err:.2e}; ks2 = [{}]; ratio n=16/n=1 = {ratio:.4}",
            listed.join(", ")
        ),
    ))
}

fn sup_dominance(seed: u64) -> Check {
    let ks = ks1();
    let mut rng = rng(seed, 3);
    let (mut violations, mut worst) = (0, f64::NEG_INFINITY);
    for _ in 0..50 {
        let f = smooth_line(&mut rng, -1.0, 1.0, 512);
        let sup = ks_sup_norm(&f, &ks).value;
        for p in [1.0, 2.0, 4.0] {
            let excess = ks_norm(&f, p, &ks).value - sup;
            worst = worst.max(excess);
            if excess > 1e-12 {
                violations += 1;
            }
        }
    }
    Ok((
        violations == 0,
        format!("{violations}/150 violations; max ksp - ksinf = {worst:.3e}"),
    ))
}

fn mollifier() -> Check {
    let ks = ks1();
    let f = line(-1.0, 1.0, 2048, f64::abs)?;
    let base = ks_norm(&f, 2.0, &ks).value;
    let mut contraction = true;
    let mut gaps = Vec::new();
    for eps in [0.4, 0.2, 0.1, 0.05] {
        let fe = mollify(&f, eps)?;
        contraction &= ks_norm(&fe, 2.0, &ks).value <= base * (1.0 + 1e-6);
        gaps.push(ks_norm(&fe.sub(&f)?, 2.0, &ks).value);
    }
    let monotone = gaps.windows(2).all(|w| w[1] <= w[0]);
    let listed: Vec<String> = gaps.iter().map(|v| format!("{v:.4e}")).collect();
    Ok((
        contraction && monotone,
        format!(
            "contraction {}; ks2(f_eps - f) over eps 0.4..0.05 = [{}]",
            if contraction { "holds" } else { "violated" },
            listed.join(", ")
        ),
    ))
}

/// `(x^2, 2x)` tested against an off-center bump.
fn square_residual(n: usize) -> kslab::Result<f64> {
    let ks = ks1();
    let f = line(-1.0, 1.0, n, |x| x * x)?;
    let g = line(-1.0, 1.0, n, |x| 2.0 * x)?;
    let phi = line(-1.0, 1.0, n, bump(0.2, 0.5))?;
    Ok(weak_derivative_residual(&f, &g, &[1.0], &phi, &ks)?.l2)
}

fn integration_by_parts() -> Check {
    let coarse = square_residual(512)?;
    let fine = square_residual(1024)?;
    let ratio = coarse / fine;
    let heaviside = heaviside_delta_residual(bump(0.0, 0.5), -1.0, 1.0, 1024)?;
    let small = coarse < 1e-4;
    let rate = (ratio - 4.0).abs() <= 0.3 * 4.0;
    let step = heaviside < 1e-3;
    Ok((
        small && rate && step,
        format!(
            "(x^2, 2x) residual {coarse:.3e} at N=512, {fine:.3e} at N=1024, ratio {ratio:.3} (want 4 +- 1.2); heaviside {heaviside:.3e}"
        ),
    ))
}

fn sobolev_embedding(seed: u64) -> Check {
    let ks = ks1();
    let mut rng = rng(seed, 6);
    let engine = DerivativeEngine::FiniteDifference;
    let (mut violations, mut checks, mut worst) = (0, 0, f64::NEG_INFINITY);
    for _ in 0..30 {
        let f = periodic_line(&mut rng, 512, 6);
        for k in 0..=2 {
            for p in [1.0, 2.0] {
                let excess = ws_norm(&f, k, p, &ks, engine)?.value - sobolev_norm(&f, k, p, engine)?;
                worst = worst.max(excess);
                checks += 1;
                if excess > 1e-6 {
                    violations += 1;
                }
            }
        }
    }
    Ok((
        violations == 0,
        format!("{violations}/{checks} violations; max ws - classical = {worst:.3e}"),
    ))
}

fn bessel_identities(seed: u64) -> Check {
    let mut rng = rng(seed, 7);
    let orders = [-1.0, 0.5, 2.0];
    let (mut identity, mut inverse, mut semigroup) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..5 {
        let f = band_limited_2d(&mut rng, 64, 6, false);
        identity = identity.max(bessel_potential(&f, 0.0)?.sub(&f)?.max_abs());
        for s in orders {
            let ps = bessel_potential(&f, s)?;
            inverse = inverse.max(bessel_potential(&ps, -s)?.sub(&f)?.max_abs());
            for t in orders {
                let composed = bessel_potential(&ps, t)?;
                semigroup = semigroup.max(composed.sub(&bessel_potential(&f, s + t)?)?.max_abs());
            }
        }
    }
    let worst = identity.max(inverse).max(semigroup);
    Ok((
        worst < 1e-10,
        format!("max errors: P^0 = id {identity:.2e}, P^-s P^s = id {inverse:.2e}, P^s P^t = P^(s+t) {semigroup:.2e}"),
    ))
}

fn bessel_monotonicity(seed: u64) -> Check {
    let ks = KsConfig::with_dim(2);
    let mut rng = rng(seed, 8);
    let (mut violating, mut worst) = (0, 0.0f64);
    for _ in 0..20 {
        let f = band_limited_2d(&mut rng, 64, 6, false);
        let values = [-2.0, -1.0, 0.0, 1.0, 2.0]
            .iter()
            .map(|&s| ws_bessel_norm(&f, s, &ks).map(|r| r.value))
            .collect::<kslab::Result<Vec<f64>>>()?;
        let drop = values.windows(2).fold(0.0f64, |m, w| m.max(w[0] - w[1]));
        worst = worst.max(drop);
        if drop > 1e-12 {
            violating += 1;
        }
    }
    Ok((
        violating == 0,
        format!("{violating}/20 fields non-monotone over s = -2..2; largest decrease {worst:.3e}"),
    ))
}

fn divergence_solver(seed: u64) -> Check {
    let mut rng = rng(seed, 9);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let f = band_limited_2d(&mut rng, 64, 10, true);
        let parts = solve_divergence(&f)?;
        worst = worst.max(divergence(&parts)?.sub(&f)?.lp_norm(2.0) / f.lp_norm(2.0));
    }
    let bbox = GridBox::cube(0.0, 1.0, 2)?;
    let shifted = GridField::from_fn(&bbox, &[64, 64], |x| 1.0 + (2.0 * PI * x[0]).sin())?.with_periodic(true);
    let rejected = matches!(solve_divergence(&shifted), Err(Error::NonzeroMean { .. }));
    Ok((
        worst < 1e-10 && rejected,
        format!(
            "max relative residual {worst:.3e} over 20 fields; nonzero mean {}",
            if rejected { "rejected" } else { "NOT rejected" }
        ),
    ))
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

fn mean_operator_decay() -> Check {
    let ks = ks1();
    let f = line(0.0, 1.0, 1000, |x| (2.0 * PI * x).sin())?.with_periodic(true);
    let mu = DiscreteMeasure::new(vec![vec![1.0], vec![-1.0]], vec![0.5, 0.5])?;
    let ts = [0.02, 0.01, 0.005];
    let norms = ts
        .iter()
        .map(|&t| Ok(ks_norm(&f.sub(&mean_operator(&f, &mu, t)?)?, 2.0, &ks).value))
        .collect::<kslab::Result<Vec<f64>>>()?;
    let slope = log_log_slope(&ts, &norms);
    let listed: Vec<String> = norms.iter().map(|v| format!("{v:.4e}")).collect();
    Ok((
        (slope - 1.0).abs() <= 0.2,
        format!("ks2 deviation at t = 0.02, 0.01, 0.005: [{}]; slope {slope:.3}", listed.join(", ")),
    ))
}

/// `Si(x)` by its Taylor series.
pub fn sine_integral(x: f64) -> f64 {
    let mut term = x;
    let mut sum = 0.0;
    for k in 0..30 {
        sum += term / (2 * k + 1) as f64;
        term *= -x * x / ((2 * k + 2) * (2 * k + 3)) as f64;
    }
    sum
}

fn improper() -> Check {
    let first = hk_integral(&ImproperSpec::new(
        parse("2*x1*sin(1/x1^2) - (2/x1)*cos(1/x1^2)", 1)?,
        0.0,
        1.0,
        1e-6,
    ))?;
    let second = hk_integral(&ImproperSpec::new(parse("sin(1/x1)/x1", 1)?, 0.0, 1.0, 1e-6))?;
    let e1 = (first.value - 1f64.sin()).abs();
    let exact = FRAC_PI_2 - sine_integral(1.0);
    let e2 = (second.value - exact).abs();
    Ok((
        e1 < 1e-6 && e2 < 1e-5,
        format!(
            "sin(1/x^2) derivative: error {e1:.2e} ({} levels, converged {}); sin(1/x)/x: error {e2:.2e} ({} levels, converged {})",
            first.levels, first.converged, second.levels, second.converged
        ),
    ))
}

type Formula = (&'static str, fn(f64, f64) -> f64);

/// Parser corpus with independent hand-coded evaluations.
pub const CORPUS: [Formula; 20] = [
    ("x1 + x2", |x, y| x + y),
    ("x1 - 2*x2", |x, y| x - 2.0 * y),
    ("3*x1*x2 - 1", |x, y| 3.0 * x * y - 1.0),
    ("x1/(1 + x2^2)", |x, y| x / (1.0 + y * y)),
    ("-x1^2", |x, _| -(x * x)),
    ("2^x1", |x, _| 2f64.powf(x)),
    ("x1^3 - x2^3", |x, y| x.powi(3) - y.powi(3)),
    ("sin(2*pi*x1)", |x, _| (2.0 * PI * x).sin()),
    ("cos(x1)*sin(x2)", |x, y| x.cos() * y.sin()),
    ("exp(-x1^2 - x2^2)", |x, y| (-(x * x) - y * y).exp()),
    ("abs(x1 - x2)", |x, y| (x - y).abs()),
    ("sign(x1)*x2", |x, y| if x == 0.0 { 0.0 } else { x.signum() } * y),
    ("sqrt(1 + x1^2)", |x, _| (1.0 + x * x).sqrt()),
    ("1/(2 + sin(x1))", |x, _| 1.0 / (2.0 + x.sin())),
    ("pi*x1 - x2/pi", |x, y| PI * x - y / PI),
    ("((x1))*((x2))", |x, y| x * y),
    ("x1 - x2 - 1 - 2", |x, y| x - y - 1.0 - 2.0),
    ("2^3^0.5*x1", |x, _| 2f64.powf(3f64.powf(0.5)) * x),
    ("1.5e-1*x1 + 2.5E+0", |x, _| 0.15 * x + 2.5),
    ("exp(sin(x1))*cos(3*x2) + abs(x1)^1.5", |x, y| x.sin().exp() * (3.0 * y).cos() + x.abs().powf(1.5)),
];

/// `(bitwise equal, mismatching case)` for a few parallel kernels run on 1
/// and 4 worker threads.
fn thread_invariance(seed: u64) -> kslab::Result<(bool, String)> {
    let f = smooth_line(&mut rng(seed, 121), -1.0, 1.0, 2048);
    let g = band_limited_2d(&mut rng(seed, 122), 64, 6, true);
    let hk_spec = ImproperSpec::new(parse("sin(1/x1)/x1", 1)?, 0.0, 1.0, 1e-6);
    let compute = || -> kslab::Result<Vec<u64>> {
        let ks = ks1();
        let values = [
            ks_norm(&f, 2.0, &ks).value,
            ks_norm(&mollify(&f, 0.1)?, 1.5, &ks).value,
            ws_norm(&g, 1, 2.0, &KsConfig::with_dim(2), DerivativeEngine::FiniteDifference)?.value,
            hk_integral(&hk_spec)?.value,
        ];
        Ok(values.iter().map(|v| v.to_bits()).collect())
    };
    let mut results = Vec::new();
    for threads in [1, 4] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        results.push(pool.install(compute)?);
    }
    let equal = results[0] == results[1];
    Ok((equal, if equal { "bitwise identical".into() } else { "DIFFER".into() }))
}

fn structural(seed: u64) -> Check {
    let mut seen = HashSet::new();
    let bijective = (1..=10_000u64).all(|r| {
        let (l, i) = unpair(r);
        pairing(l, i) == r && seen.insert((l, i))
    });

    let ks = ks1();
    let mut rng = rng(seed, 12);
    let mut certificate_failures = 0;
    for _ in 0..20 {
        let f = smooth_line(&mut rng, -1.0, 1.0, 512);
        let short = ks_norm(&f, 2.0, &ks);
        let long = ks_norm(&f, 2.0, &ks.with_depth(80));
        if (long.value - short.value).abs() > short.bound {
            certificate_failures += 1;
        }
    }

    let mut worst_rel = 0.0f64;
    for (src, formula) in CORPUS {
        let e = parse(src, 2)?;
        for _ in 0..100 {
            let (x, y) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let got = e.eval(&[x, y]).map_err(|source| Error::Eval {
                source,
                point: vec![x, y],
            })?;
            let want = formula(x, y);
            worst_rel = worst_rel.max((got - want).abs() / want.abs().max(f64::MIN_POSITIVE));
        }
    }

    let (deterministic, det_detail) = thread_invariance(seed)?;
    let pass = bijective && certificate_failures == 0 && worst_rel <= 1e-12 && deterministic;
    Ok((
        pass,
        format!(
            "pairing bijective to 1e4: {bijective}; tail certificate failures {certificate_failures}/20; parser max relative error {worst_rel:.2e}; 1 vs 4 threads: {det_detail}"
        ),
    ))
}

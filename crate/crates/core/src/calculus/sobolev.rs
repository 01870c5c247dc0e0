use super::{fd_partial, multi_indices, MultiIndex};
use crate::grid::GridField;
use crate::ks::{ks_inner, ks_report, weighted_p_sum, BoundKind, KsConfig, NormReport};
use crate::spectral::spectral_partial;
use crate::sum::pairwise_sum;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeEngine {
    #[default]
    FiniteDifference,
    /// Fourier multipliers; the field must be periodic.
    Spectral,
}

/// `D^alpha f` with the chosen engine.
pub fn partial(f: &GridField, alpha: &MultiIndex, engine: DerivativeEngine) -> Result<GridField> {
    match engine {
        DerivativeEngine::FiniteDifference => fd_partial(f, alpha),
        DerivativeEngine::Spectral => spectral_partial(f, alpha),
    }
}

fn derivatives(f: &GridField, k: u32, engine: DerivativeEngine) -> Result<Vec<(MultiIndex, GridField)>> {
    multi_indices(k, f.dim())
        .into_iter()
        .map(|alpha| partial(f, &alpha, engine).map(|d| (alpha, d)))
        .collect()
}

/// Per-multi-index `KS^p` reports `||D^alpha f||` for `|alpha| <= k`.
pub fn ws_terms(
    f: &GridField,
    k: u32,
    p: f64,
    ks: &KsConfig,
    engine: DerivativeEngine,
) -> Result<Vec<(MultiIndex, NormReport)>> {
    Ok(derivatives(f, k, engine)?
        .into_iter()
        .map(|(alpha, d)| {
            let report = ks_report(&d, p, ks);
            (alpha, report)
        })
        .collect())
}

/// `WS^{k,p}` norm: the `p`-sum of `||D^alpha f||_{KS^p}` over `|alpha| <= k`,
/// or their maximum for `p = inf`. Bounds are combined the same way.
pub fn ws_norm(f: &GridField, k: u32, p: f64, ks: &KsConfig, engine: DerivativeEngine) -> Result<NormReport> {
    let terms = ws_terms(f, k, p, ks, engine)?;
    Ok(combine(terms.iter().map(|(_, r)| r), p, ks.depth))
}

fn combine<'a>(reports: impl Iterator<Item = &'a NormReport>, p: f64, depth: usize) -> NormReport {
    let reports: Vec<&NormReport> = reports.collect();
    let bound_kind = if reports.iter().all(|r| r.bound_kind == BoundKind::Certified) {
        BoundKind::Certified
    } else {
        BoundKind::Heuristic
    };
    let (value, upper) = if p.is_infinite() {
        let value = reports.iter().fold(0.0f64, |m, r| m.max(r.value));
        let upper = reports.iter().fold(0.0f64, |m, r| m.max(r.value + r.bound));
        (value, upper)
    } else {
        let ones = vec![1.0; reports.len()];
        let sum = |f: &dyn Fn(&NormReport) -> f64| {
            let values: Vec<f64> = reports.iter().map(|r| f(r)).collect();
            weighted_p_sum(&ones, &values, p)
        };
        (sum(&|r| r.value), sum(&|r| r.value + r.bound))
    };
    NormReport {
        value,
        bound: (upper - value).max(0.0),
        bound_kind,
        depth,
        p,
    }
}

/// `WS^{1,inf}` in its `L^inf` form, `max(||f||_inf, ||D_1 f||_inf, .., ||D_n f||_inf)`.
pub fn ws1_sup_lebesgue(f: &GridField, engine: DerivativeEngine) -> Result<f64> {
    Ok(derivatives(f, 1, engine)?
        .iter()
        .fold(0.0f64, |m, (_, d)| m.max(d.max_abs())))
}

/// `WS^{k,2}` inner product `sum_{|alpha| <= k} <D^alpha f, D^alpha g>_{KS^2}`.
pub fn ws_inner(f: &GridField, g: &GridField, k: u32, ks: &KsConfig, engine: DerivativeEngine) -> Result<f64> {
    f.check_conformable(g)?;
    let df = derivatives(f, k, engine)?;
    let dg = derivatives(g, k, engine)?;
    let terms = df
        .iter()
        .zip(&dg)
        .map(|((_, a), (_, b))| ks_inner(a, b, ks))
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&terms))
}

/// Classical `W^{k,p}` norm `(sum_{|alpha| <= k} ||D^alpha f||_{L^p}^p)^{1/p}`
/// by midpoint quadrature.
pub fn sobolev_norm(f: &GridField, k: u32, p: f64, engine: DerivativeEngine) -> Result<f64> {
    let norms: Vec<f64> = derivatives(f, k, engine)?
        .iter()
        .map(|(_, d)| d.lp_norm(p))
        .collect();
    if p.is_infinite() {
        return Ok(norms.into_iter().fold(0.0, f64::max));
    }
    let powered: Vec<f64> = norms.iter().map(|v| v.powf(p)).collect();
    Ok(pairwise_sum(&powered).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridBox;
    use crate::ks::{ks_norm, ks_sup_norm};
    use crate::{CubeFamily, Error};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn line(n: usize, f: impl Fn(f64) -> f64) -> GridField {
        GridField::from_fn(&GridBox::cube(0.0, 1.0, 1).unwrap(), &[n], |x| f(x[0])).unwrap()
    }

    fn ks1() -> KsConfig {
        KsConfig::new(CubeFamily::new(1, 2), 40)
    }

    #[test]
    fn order_zero_is_ks_norm() {
        let f = line(200, |x| (5.0 * x).sin() + x);
        for p in [1.0, 2.0, 3.5] {
            let a = ws_norm(&f, 0, p, &ks1(), DerivativeEngine::FiniteDifference).unwrap();
            assert_eq!(a, ks_norm(&f, p, &ks1()));
        }
        let a = ws_norm(&f, 0, f64::INFINITY, &ks1(), DerivativeEngine::FiniteDifference).unwrap();
        assert_eq!(a.value, ks_sup_norm(&f, &ks1()).value);
    }

    #[test]
    fn constant_has_no_derivative_contribution() {
        let bbox = GridBox::cube(-1.0, 1.0, 2).unwrap();
        let f = GridField::from_fn(&bbox, &[40, 40], |_| 1.7).unwrap();
        let ks = KsConfig::new(CubeFamily::new(2, 2), 40);
        let w = ws_norm(&f, 1, 2.0, &ks, DerivativeEngine::FiniteDifference).unwrap();
        assert!((w.value - ks_norm(&f, 2.0, &ks).value).abs() < 1e-10);
    }

    #[test]
    fn sine_matches_analytic_oracle() {
        let n = 1024;
        let f = line(n, |x| (2.0 * PI * x).sin()).with_periodic(true);
        let df = line(n, |x| 2.0 * PI * (2.0 * PI * x).cos());
        let oracle = (ks_norm(&f, 2.0, &ks1()).value.powi(2) + ks_norm(&df, 2.0, &ks1()).value.powi(2)).sqrt();
        for engine in [DerivativeEngine::FiniteDifference, DerivativeEngine::Spectral] {
            let w = ws_norm(&f, 1, 2.0, &ks1(), engine).unwrap();
            assert!((w.value - oracle).abs() < 1e-3 * oracle, "{engine:?}: {} vs {oracle}", w.value);
        }
    }

    #[test]
    fn spectral_engine_needs_periodic_field() {
        let f = line(64, |x| x);
        assert!(matches!(
            ws_norm(&f, 1, 2.0, &ks1(), DerivativeEngine::Spectral),
            Err(Error::NotPeriodic(_))
        ));
    }

    #[test]
    fn lebesgue_variant() {
        let f = line(512, |x| (2.0 * PI * x).sin()).with_periodic(true);
        let v = ws1_sup_lebesgue(&f, DerivativeEngine::Spectral).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-3);
    }

    #[test]
    fn inner_product_matches_norm() {
        let bbox = GridBox::cube(0.0, 1.0, 2).unwrap();
        let f = GridField::from_fn(&bbox, &[32, 32], |x| (2.0 * PI * x[0]).sin() * (x[1] + 1.0)).unwrap();
        let g = GridField::from_fn(&bbox, &[32, 32], |x| x[0] * x[1]).unwrap();
        let ks = KsConfig::new(CubeFamily::new(2, 1), 40);
        for k in 0..=2 {
            let e = DerivativeEngine::FiniteDifference;
            let fg = ws_inner(&f, &g, k, &ks, e).unwrap();
            let gf = ws_inner(&g, &f, k, &ks, e).unwrap();
            assert!((fg - gf).abs() <= 1e-12 * fg.abs().max(1e-300));
            let ff = ws_inner(&f, &f, k, &ks, e).unwrap();
            let norm = ws_norm(&f, k, 2.0, &ks, e).unwrap().value;
            assert!((ff - norm * norm).abs() <= 1e-12 * ff);
        }
    }

    fn smooth(c: &[f64]) -> impl Fn(f64) -> f64 + '_ {
        move |x| {
            c.iter()
                .enumerate()
                .map(|(k, a)| a * (2.0 * PI * (k as f64 + 1.0) * x + k as f64).sin())
                .sum()
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn triangle_inequality(
            a in prop::collection::vec(-1.0f64..1.0, 3),
            b in prop::collection::vec(-1.0f64..1.0, 3),
            k in 0u32..=2,
            p in prop::sample::select(vec![1.0, 2.0, 3.0, f64::INFINITY]),
        ) {
            let f = line(128, smooth(&a));
            let g = line(128, smooth(&b));
            let e = DerivativeEngine::FiniteDifference;
            let ks = ks1();
            let sum = ws_norm(&f.add(&g).unwrap(), k, p, &ks, e).unwrap().value;
            let parts = ws_norm(&f, k, p, &ks, e).unwrap().value + ws_norm(&g, k, p, &ks, e).unwrap().value;
            prop_assert!(sum <= parts + 1e-12 * parts.max(1.0));
        }

        #[test]
        fn embedding_below_classical_norm(
            a in prop::collection::vec(-1.0f64..1.0, 3),
            k in 0u32..=2,
            p in prop::sample::select(vec![1.0, 2.0]),
        ) {
            let f = line(256, smooth(&a)).with_periodic(true);
            let e = DerivativeEngine::FiniteDifference;
            let ws = ws_norm(&f, k, p, &ks1(), e).unwrap().value;
            let w = sobolev_norm(&f, k, p, e).unwrap();
            prop_assert!(ws <= w + 1e-6, "{} > {}", ws, w);
        }
    }
}

use std::f64::consts::PI;
use std::io::BufReader;

use kslab::calculus::{mollify, strong_derivative, ws_norm, DerivativeEngine, MultiIndex};
use kslab::expr::parse;
use kslab::hk::{hk_integral, ImproperSpec};
use kslab::ks::{ks_norm, ks_sup_norm};
use kslab::spectral::{divergence, solve_divergence, spectral_partial};
use kslab::{GridBox, GridField, KsConfig};

fn sample(src: &str, bbox: &GridBox, counts: &[usize]) -> GridField {
    GridField::sample(&parse(src, bbox.dim()).unwrap(), bbox, counts).unwrap()
}

#[test]
fn csv_round_trip_preserves_norms() {
    let bbox = GridBox::new(vec![-1.0, 0.0], vec![1.0, 0.5]).unwrap();
    let f = sample("x1^2 - cos(3*x2) + 0.1", &bbox, &[40, 24]);
    let mut buf = Vec::new();
    f.write_csv(&mut buf).unwrap();
    let g = GridField::read_csv(BufReader::new(&buf[..])).unwrap();
    let ks = KsConfig::with_dim(2);
    assert_eq!(ks_norm(&f, 2.0, &ks).value, ks_norm(&g, 2.0, &ks).value);
    assert_eq!(f.lp_norm(1.5), g.lp_norm(1.5));
}

#[test]
fn mollified_abs_converges_in_ks() {
    let bbox = GridBox::cube(-1.0, 1.0, 1).unwrap();
    let f = sample("abs(x1)", &bbox, &[2048]);
    let ks = KsConfig::with_dim(1);
    let base = ks_norm(&f, 2.0, &ks).value;
    let mut prev = f64::INFINITY;
    for eps in [0.4, 0.2, 0.1, 0.05] {
        let fe = mollify(&f, eps).unwrap();
        assert!(ks_norm(&fe, 2.0, &ks).value <= base * (1.0 + 1e-6));
        let gap = ks_norm(&fe.sub(&f).unwrap(), 2.0, &ks).value;
        assert!(gap <= prev, "eps {eps}: {gap} > {prev}");
        prev = gap;
    }
}

#[test]
fn divergence_of_sampled_expression() {
    let bbox = GridBox::cube(0.0, 1.0, 2).unwrap();
    let f = sample("sin(2*pi*x1)*cos(4*pi*x2) + cos(6*pi*x2)", &bbox, &[64, 64]).with_periodic(true);
    let parts = solve_divergence(&f).unwrap();
    let residual = divergence(&parts).unwrap().sub(&f).unwrap().lp_norm(2.0) / f.lp_norm(2.0);
    assert!(residual < 1e-12, "{residual}");
}

#[test]
fn strong_derivative_agrees_with_spectral_derivative() {
    let bbox = GridBox::cube(0.0, 1.0, 1).unwrap();
    let f = sample("sin(2*pi*x1) + 0.3*cos(4*pi*x1)", &bbox, &[1024]).with_periodic(true);
    let ks = KsConfig::with_dim(1);
    let h = 1.0 / 1024.0;
    let sd = strong_derivative(&f, &[1.0], 2.0, &[8.0 * h, 4.0 * h, 2.0 * h, h], &ks).unwrap();
    let exact = spectral_partial(&f, &MultiIndex(vec![1])).unwrap();
    let gap = ks_norm(&sd.estimate.sub(&exact).unwrap(), 2.0, &ks).value;
    // Forward differences are first order: error ~ h f''/2.
    assert!(gap < 4.0 * PI * PI * h, "{gap}");
}

#[test]
fn both_derivative_engines_give_close_sobolev_norms() {
    let bbox = GridBox::cube(0.0, 1.0, 1).unwrap();
    let f = sample("cos(2*pi*x1) + 0.5*sin(6*pi*x1)", &bbox, &[512]).with_periodic(true);
    let ks = KsConfig::with_dim(1);
    for k in 0..=2 {
        let fd = ws_norm(&f, k, 2.0, &ks, DerivativeEngine::FiniteDifference).unwrap().value;
        let sp = ws_norm(&f, k, 2.0, &ks, DerivativeEngine::Spectral).unwrap().value;
        assert!((fd - sp).abs() < 1e-3 * sp, "k {k}: {fd} vs {sp}");
    }
}

#[test]
fn improper_integral_of_a_sampled_integrand_matches_grid_quadrature() {
    let src = "1/sqrt(x1)";
    let r = hk_integral(&ImproperSpec::new(parse(src, 1).unwrap(), 0.0, 1.0, 1e-10)).unwrap();
    assert!(r.converged);
    assert!((r.value - 2.0).abs() < 1e-9);
    // The midpoint rule misses the singular mass near 0 at rate sqrt(h).
    let grid = sample(src, &GridBox::cube(0.0, 1.0, 1).unwrap(), &[1 << 16]);
    assert!((grid.integrate() - r.value).abs() < 2.0 * (1.0f64 / 65536.0).sqrt());
}

#[test]
fn sup_norm_dominates_every_exponent() {
    let bbox = GridBox::cube(-1.0, 1.0, 1).unwrap();
    let f = sample("exp(-4*x1^2)*sin(5*x1) + 0.2", &bbox, &[512]);
    let ks = KsConfig::with_dim(1);
    let sup = ks_sup_norm(&f, &ks).value;
    for p in [1.0, 2.0, 4.0, 16.0] {
        assert!(ks_norm(&f, p, &ks).value <= sup + 1e-12);
    }
}

//! Truncated Kuelbs-Steadman norms.
//!
//! With weights `tau_r = 2^-r` and cube indicators `zeta_r`,
//!
//! ```text
//! ||f||_{KS^p}  = ( sum_r tau_r |∫ zeta_r f|^p )^(1/p)
//! ||f||_{KS^oo} = sup_r |∫ zeta_r f|
//! (f, g)_{KS^2} = sum_r tau_r (∫ zeta_r f)(∫ zeta_r g)
//! ```
//!
//! The series are cut at depth `R`. Every cube has volume at most 1, so
//! `|∫ zeta_r f| <= max|f|` and the discarded tail of the `p`-sum is at most
//! `max|f|^p 2^-R`; [`NormReport::bound`] turns that into a bound on the
//! error of the reported value.

use rayon::prelude::*;

use crate::cubes::{self, CubeFamily};
use crate::grid::GridField;
use crate::sum::pairwise_sum;
use crate::Result;

pub const DEFAULT_DEPTH: usize = 40;
pub const DEFAULT_WINDOW: u64 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct KsConfig {
    pub family: CubeFamily,
    pub depth: usize,
}

impl KsConfig {
    pub fn new(family: CubeFamily, depth: usize) -> Self {
        assert!(depth >= 1, "truncation depth must be at least 1");
        Self { family, depth }
    }

    /// Default depth 40 and center window 2 in dimension `dim`.
    pub fn with_dim(dim: usize) -> Self {
        Self::new(CubeFamily::new(dim, DEFAULT_WINDOW), DEFAULT_DEPTH)
    }

    pub fn with_depth(&self, depth: usize) -> Self {
        Self::new(self.family.clone(), depth)
    }

    /// `tau_r = 2^-r`.
    pub fn weight(r: usize) -> f64 {
        0.5f64.powi(r as i32)
    }

    /// `sum_{r > R} tau_r = 2^-R`.
    pub fn tail_weight(&self) -> f64 {
        0.5f64.powi(self.depth as i32)
    }

    /// `∫ zeta_r f` for `r = 1..=R`.
    pub fn cube_integrals(&self, f: &GridField) -> Vec<f64> {
        assert_eq!(
            f.dim(),
            self.family.dim(),
            "field and cube family dimensions differ"
        );
        self.warn_if_under_resolved(f);
        (1..=self.depth as u64)
            .into_par_iter()
            .map(|r| f.cube_integral(&self.family.cube(r)))
            .collect()
    }

    /// Smallest cube edge used at this depth.
    pub fn min_edge(&self) -> f64 {
        let max_level = (1..=self.depth as u64)
            .map(|r| cubes::unpair(r).0)
            .max()
            .unwrap_or(1);
        cubes::edge(max_level, self.family.dim())
    }

    /// True when some enumerated cube is narrower than two grid cells.
    pub fn is_under_resolved(&self, f: &GridField) -> bool {
        self.min_edge() < 2.0 * f.max_spacing()
    }

    fn warn_if_under_resolved(&self, f: &GridField) {
        if self.is_under_resolved(f) {
            log::warn!(
                "cube edge {:e} at depth {} is under-resolved by grid spacing {:e}",
                self.min_edge(),
                self.depth,
                f.max_spacing()
            );
        }
    }
}

/// Whether [`NormReport::bound`] is a proven bound or only an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Certified,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub value: f64,
    /// `|true norm - value| <= bound` when `bound_kind` is certified.
    pub bound: f64,
    pub bound_kind: BoundKind,
    pub depth: usize,
    /// Exponent; `f64::INFINITY` for sup norms.
    pub p: f64,
}

impl NormReport {
    pub const CSV_HEADER: &'static str = "value,bound,R,p";

    pub fn zero(depth: usize, p: f64) -> Self {
        Self {
            value: 0.0,
            bound: 0.0,
            bound_kind: BoundKind::Certified,
            depth,
            p,
        }
    }

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{}", self.value, self.bound, self.depth, fmt_p(self.p))
    }
}

pub(crate) fn fmt_p(p: f64) -> String {
    if p.is_infinite() {
        "inf".to_string()
    } else {
        p.to_string()
    }
}

/// `(sum_r w_r |c_r|^p)^(1/p)` evaluated as `m (sum_r w_r (|c_r|/m)^p)^(1/p)`
/// with `m = max |c_r|`, so scaling all `c_r` by a power of two scales the
/// result exactly.
pub(crate) fn weighted_p_sum(weights: &[f64], values: &[f64], p: f64) -> f64 {
    debug_assert_eq!(weights.len(), values.len());
    let m = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    let terms: Vec<f64> = weights
        .iter()
        .zip(values)
        .map(|(w, v)| {
            let t = v.abs() / m;
            w * if p == 2.0 { t * t } else { t.powf(p) }
        })
        .collect();
    let s = pairwise_sum(&terms);
    m * if p == 2.0 { s.sqrt() } else { s.powf(1.0 / p) }
}

fn weights(depth: usize) -> Vec<f64> {
    (1..=depth).map(KsConfig::weight).collect()
}

/// `KS^p` norm for `p` in `[1, inf)` with a certified truncation bound.
pub fn ks_norm(f: &GridField, p: f64, ks: &KsConfig) -> NormReport {
    assert!((1.0..f64::INFINITY).contains(&p), "ks_norm needs 1 <= p < inf, got {p}");
    let integrals = ks.cube_integrals(f);
    from_cube_integrals(&integrals, f.max_abs(), p, ks)
}

/// Builds a `KS^p` report from precomputed cube integrals and the uniform
/// bound `sup |f|`.
pub fn from_cube_integrals(integrals: &[f64], sup: f64, p: f64, ks: &KsConfig) -> NormReport {
    let value = weighted_p_sum(&weights(integrals.len()), integrals, p);
    let tail = sup.powf(p) * ks.tail_weight();
    let bound = if tail == 0.0 {
        0.0
    } else {
        (value.powf(p) + tail).powf(1.0 / p) - value
    };
    NormReport {
        value,
        bound: bound.max(0.0),
        bound_kind: BoundKind::Certified,
        depth: ks.depth,
        p,
    }
}

/// `KS^oo` seminorm `max_{r <= R} |∫ zeta_r f|`.
///
/// The bound is heuristic: unseen cubes are bounded by `max|f|` times the
/// largest cube volume still to come (capped by the box volume), which says
/// nothing about where the supremum is attained.
pub fn ks_sup_norm(f: &GridField, ks: &KsConfig) -> NormReport {
    let integrals = ks.cube_integrals(f);
    let value = integrals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // Every anti-diagonal of the pairing ends at level 1, so level-1 cubes
    // always remain in the tail.
    let tail_volume = cubes::edge(1, ks.family.dim())
        .powi(ks.family.dim() as i32)
        .min(f.bbox().volume());
    NormReport {
        value,
        bound: f.max_abs() * tail_volume,
        bound_kind: BoundKind::Heuristic,
        depth: ks.depth,
        p: f64::INFINITY,
    }
}

/// [`ks_norm`] for finite `p`, [`ks_sup_norm`] for `p = inf`.
pub fn ks_report(f: &GridField, p: f64, ks: &KsConfig) -> NormReport {
    if p.is_infinite() {
        ks_sup_norm(f, ks)
    } else {
        ks_norm(f, p, ks)
    }
}

/// `KS^2` inner product truncated at depth `R`.
pub fn ks_inner(f: &GridField, g: &GridField, ks: &KsConfig) -> Result<f64> {
    f.check_conformable(g)?;
    let cf = ks.cube_integrals(f);
    let cg = ks.cube_integrals(g);
    let terms: Vec<f64> = cf
        .iter()
        .zip(&cg)
        .enumerate()
        .map(|(k, (a, b))| KsConfig::weight(k + 1) * a * b)
        .collect();
    Ok(pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridBox;
    use crate::CubeSpec;
    use proptest::prelude::*;

    fn unit_family(window: u64) -> KsConfig {
        KsConfig::new(CubeFamily::new(1, window), 40)
    }

    fn field(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> GridField {
        GridField::from_fn(&GridBox::cube(a, b, 1).unwrap(), &[n], |x| f(x[0])).unwrap()
    }

    #[test]
    fn zero_field() {
        let z = field(-1.0, 1.0, 64, |_| 0.0);
        let ks = KsConfig::with_dim(1);
        let r = ks_norm(&z, 2.0, &ks);
        assert_eq!((r.value, r.bound), (0.0, 0.0));
        assert_eq!(ks_sup_norm(&z, &ks).value, 0.0);
        let g = field(-1.0, 1.0, 64, |x| x.sin());
        assert_eq!(ks_inner(&g, &z, &ks).unwrap(), 0.0);
    }

    #[test]
    fn homogeneity_under_power_of_two_scaling_is_exact() {
        let f = field(-1.0, 1.0, 128, |x| (3.0 * x).cos() + x);
        let ks = KsConfig::with_dim(1);
        for p in [1.0, 2.0, 3.5] {
            assert_eq!(
                ks_norm(&f.scale(2.0), p, &ks).value,
                2.0 * ks_norm(&f, p, &ks).value
            );
        }
    }

    #[test]
    fn indicator_against_fine_quadrature_oracle() {
        // Oracle: each cube integral of 1_[-1/2,1/2] on [-1,1] by a
        // 10^5-point composite midpoint rule over the cube itself.
        let family = CubeFamily::new(1, 1);
        let ks = KsConfig::new(family.clone(), 30);
        let indicator = |x: f64| if (-0.5..=0.5).contains(&x) { 1.0 } else { 0.0 };
        let mut oracle = 0.0;
        for r in 1..=30u64 {
            let c = family.cube(r);
            let (lo, hi) = c.axis_interval(0);
            let (lo, hi) = (lo.max(-1.0), hi.min(1.0));
            let mut integral = 0.0;
            if hi > lo {
                let m = 100_000;
                let h = (hi - lo) / m as f64;
                integral = (0..m).map(|k| indicator(lo + (k as f64 + 0.5) * h)).sum::<f64>() * h;
            }
            oracle += KsConfig::weight(r as usize) * integral * integral;
        }
        let oracle = oracle.sqrt();

        let f = field(-1.0, 1.0, 1024, indicator);
        let got = ks_norm(&f, 2.0, &ks).value;
        assert!((got - oracle).abs() < 1e-10, "{got} vs {oracle}");
    }

    #[test]
    fn sup_norm_examples() {
        let f = field(-2.0, 2.0, 64, |_| 1.0);
        let ks = unit_family(1);
        let r = ks_sup_norm(&f, &ks);
        assert_eq!(r.value, 1.0);
        assert_eq!(r.bound_kind, BoundKind::Heuristic);
        let g = field(-2.0, 2.0, 64, |x| x * x - 0.3);
        let first = g.cube_integral(&ks.family.cube(1)).abs();
        assert!(ks_sup_norm(&g, &ks).value >= first);
    }

    #[test]
    fn inner_product_identities() {
        let ks = KsConfig::with_dim(1);
        let f = field(-1.0, 1.0, 200, |x| (2.0 * x).sin() + 0.5);
        let g = field(-1.0, 1.0, 200, |x| x * x);
        let n2 = ks_norm(&f, 2.0, &ks).value;
        let ff = ks_inner(&f, &f, &ks).unwrap();
        assert!((ff - n2 * n2).abs() <= 1e-12 * ff);
        assert_eq!(ks_inner(&f, &g, &ks).unwrap(), ks_inner(&g, &f, &ks).unwrap());
        let h = field(-1.0, 1.0, 100, |x| x);
        assert!(ks_inner(&f, &h, &ks).is_err());
    }

    #[test]
    fn weak_to_strong_decay() {
        let ks = KsConfig::with_dim(1);
        let norms: Vec<f64> = [1.0, 16.0]
            .iter()
            .map(|&n| {
                let f = field(0.0, 1.0, 4096, |x| (2.0 * std::f64::consts::PI * n * x).sin());
                ks_norm(&f, 2.0, &ks).value
            })
            .collect();
        assert!(norms[1] / norms[0] < 0.2);
    }

    #[test]
    fn under_resolution_guard() {
        let ks = KsConfig::with_dim(1);
        assert!(ks.is_under_resolved(&field(-1.0, 1.0, 16, |x| x)));
        assert!(!ks.is_under_resolved(&field(-1.0, 1.0, 1024, |x| x)));
        // r = 37 is the first index at level 9: edge 2^-8.
        assert_eq!(ks.min_edge(), 2f64.powi(-8));
    }

    #[test]
    fn level_one_cubes_recur_after_any_depth() {
        for depth in 1..200u64 {
            assert!(((depth + 1)..(depth + 50)).any(|r| cubes::unpair(r).0 == 1));
        }
    }

    #[test]
    fn cube_integral_bounded_by_sup() {
        let f = field(-1.0, 1.0, 64, |x| 3.0 * x);
        let c = f.cube_integral(&CubeSpec::new(vec![0.5], 1.0));
        assert!(c.abs() <= f.max_abs());
    }

    fn arb_field() -> impl Strategy<Value = GridField> {
        prop::collection::vec(-5.0f64..5.0, 64).prop_map(|v| {
            GridField::from_samples(GridBox::cube(-1.0, 1.0, 1).unwrap(), vec![64], v).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn triangle_inequality(f in arb_field(), g in arb_field(), p in 1.0f64..4.0) {
            let ks = KsConfig::with_dim(1);
            let lhs = ks_norm(&f.add(&g).unwrap(), p, &ks).value;
            let rhs = ks_norm(&f, p, &ks).value + ks_norm(&g, p, &ks).value;
            prop_assert!(lhs <= rhs + 1e-12);
        }

        #[test]
        fn absolute_homogeneity(f in arb_field(), c in -10.0f64..10.0) {
            let ks = KsConfig::with_dim(1);
            let a = ks_norm(&f.scale(c), 2.0, &ks).value;
            let b = c.abs() * ks_norm(&f, 2.0, &ks).value;
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b));
        }

        #[test]
        fn dominated_by_sup_and_lebesgue_norms(f in arb_field(), p in 1.0f64..6.0) {
            let ks = KsConfig::with_dim(1);
            let v = ks_norm(&f, p, &ks).value;
            prop_assert!(v <= ks_sup_norm(&f, &ks).value + 1e-12);
            prop_assert!(v <= f.lp_norm(p) + 1e-9);
        }

        #[test]
        fn monotone_in_depth_and_certified(f in arb_field(), p in 1.0f64..4.0) {
            let ks = KsConfig::with_dim(1);
            let mut prev = 0.0;
            for depth in [1, 5, 10, 20, 40] {
                let v = ks_norm(&f, p, &ks.with_depth(depth));
                prop_assert!(v.value >= prev - 1e-14);
                let deep = ks_norm(&f, p, &ks.with_depth(depth + 40)).value;
                prop_assert!((deep - v.value).abs() <= v.bound + 1e-14);
                prev = v.value;
            }
        }
    }
}

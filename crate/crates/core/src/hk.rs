//! Improper integrals of conditionally convergent integrands on `(a, b]`.
//!
//! The interval is cut into geometric annuli shrinking toward the singular
//! endpoint. Partial sums over the annuli are accelerated with Aitken's
//! delta-squared process and the limit is accepted once two successive
//! accelerated values agree to the tolerance.

use rayon::prelude::*;

use crate::expr::FieldExpr;
use crate::ks::{weighted_p_sum, BoundKind, KsConfig, NormReport};
use crate::quad::adaptive_gk15;
use crate::sum::pairwise_sum;
use crate::{Error, Result};

/// Chunks per annulus, integrated independently.
const CHUNKS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImproperSpec {
    pub integrand: FieldExpr,
    pub a: f64,
    pub b: f64,
    pub singular: Endpoint,
    /// Annulus ratio in `(0, 1)`.
    pub rho: f64,
    pub tol: f64,
    pub max_levels: usize,
    /// When false the raw partial sums are tested for convergence.
    pub accelerate: bool,
    /// Quadrature panels allowed per annulus; an annulus that needs more
    /// ends the run unconverged.
    pub max_panels: usize,
}

impl ImproperSpec {
    /// Singular at `a`, `rho = 1/2`, at most 60 levels of at most `2^21`
    /// panels each.
    pub fn new(integrand: FieldExpr, a: f64, b: f64, tol: f64) -> Self {
        Self {
            integrand,
            a,
            b,
            singular: Endpoint::Lower,
            rho: 0.5,
            tol,
            max_levels: 60,
            accelerate: true,
            max_panels: 1 << 23,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a < self.b) || !self.a.is_finite() || !self.b.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "need finite a < b, got ({}, {}]",
                self.a, self.b
            )));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidArgument(format!("rho must lie in (0, 1), got {}", self.rho)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.max_levels < 4 {
            return Err(Error::InvalidArgument("at least 4 levels are needed".into()));
        }
        if self.integrand.max_variable() > 1 {
            return Err(Error::InvalidArgument("integrand must depend on x1 only".into()));
        }
        Ok(())
    }

    fn with_interval(&self, a: f64, b: f64) -> Self {
        Self { a, b, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImproperResult {
    pub value: f64,
    /// Annuli integrated.
    pub levels: usize,
    pub converged: bool,
    /// The last two values of the tested sequence.
    pub last: [f64; 2],
    /// Partial sums `S_1..S_levels`.
    pub partial_sums: Vec<f64>,
}

/// Aitken's delta-squared extrapolation of three consecutive terms.
pub fn aitken(s0: f64, s1: f64, s2: f64) -> f64 {
    let d1 = s1 - s0;
    let d2 = s2 - s1;
    let denom = d2 - d1;
    if denom == 0.0 || !denom.is_finite() {
        return s2;
    }
    let t = s2 - d2 * d2 / denom;
    if t.is_finite() {
        t
    } else {
        s2
    }
}

/// `(∫_lo^hi f, converged)`.
fn integrate_segment(f: &FieldExpr, lo: f64, hi: f64, tol: f64, max_panels: usize) -> Result<(f64, bool)> {
    let width = (hi - lo) / CHUNKS as f64;
    let f = f.compile();
    let eval = |x: f64| {
        f.eval(&[x]).map_err(|source| Error::Eval {
            source,
            point: vec![x],
        })
    };
    let parts = (0..CHUNKS)
        .into_par_iter()
        .map(|k| {
            let a = lo + k as f64 * width;
            let b = if k + 1 == CHUNKS { hi } else { a + width };
            adaptive_gk15(&eval, a, b, tol / CHUNKS as f64, (max_panels / CHUNKS).max(1))
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = parts.iter().map(|r| r.value).collect();
    Ok((pairwise_sum(&values), parts.iter().all(|r| r.converged)))
}

/// `∫_a^b f` as the limit of integrals over `[a + rho^m (b - a), b]` (or the
/// mirror image for an upper singular endpoint).
pub fn hk_integral(spec: &ImproperSpec) -> Result<ImproperResult> {
    spec.validate()?;
    let delta = spec.b - spec.a;
    // Annulus m covers distances [rho^{m+1}, rho^m] * delta from the singular end.
    let annulus = |m: usize| {
        let near = spec.rho.powi(m as i32 + 1) * delta;
        let far = spec.rho.powi(m as i32) * delta;
        match spec.singular {
            Endpoint::Lower => (spec.a + near, spec.a + far),
            Endpoint::Upper => (spec.b - far, spec.b - near),
        }
    };
    // Quadrature error budget: a tenth of the tolerance spread by width.
    let budget = |lo: f64, hi: f64| 0.1 * spec.tol * (hi - lo) / delta;

    let mut sums: Vec<f64> = Vec::new();
    let mut tested: Vec<f64> = Vec::new();
    let mut total = 0.0;
    for m in 0..spec.max_levels {
        let (lo, hi) = annulus(m);
        let (value, resolved) = integrate_segment(&spec.integrand, lo, hi, budget(lo, hi), spec.max_panels)?;
        if !resolved {
            log::warn!("annulus [{lo:e}, {hi:e}] exceeded the quadrature budget");
            break;
        }
        total += value;
        sums.push(total);
        let n = sums.len();
        if spec.accelerate {
            if n >= 3 {
                tested.push(aitken(sums[n - 3], sums[n - 2], sums[n - 1]));
            }
        } else {
            tested.push(total);
        }
        let k = tested.len();
        if k >= 2 && (tested[k - 1] - tested[k - 2]).abs() < spec.tol {
            return Ok(ImproperResult {
                value: tested[k - 1],
                levels: n,
                converged: true,
                last: [tested[k - 2], tested[k - 1]],
                partial_sums: sums,
            });
        }
    }
    let k = tested.len();
    let last = match k {
        0 => [f64::NAN, f64::NAN],
        1 => [f64::NAN, tested[0]],
        _ => [tested[k - 2], tested[k - 1]],
    };
    Ok(ImproperResult {
        value: last[1],
        levels: sums.len(),
        converged: false,
        last,
        partial_sums: sums,
    })
}

/// `KS^p` norm of an improper integrand over the 1-D cube family.
///
/// Cubes touching the singular endpoint are integrated with [`hk_integral`];
/// the rest use the adaptive rule directly. The bound is heuristic: unseen
/// cubes are assumed no larger than the largest computed cube integral.
pub fn ks_norm_of_improper(spec: &ImproperSpec, p: f64, ks: &KsConfig) -> Result<NormReport> {
    spec.validate()?;
    if ks.family.dim() != 1 {
        return Err(Error::InvalidArgument("improper integrands are one-dimensional".into()));
    }
    let integrals = improper_cube_integrals(spec, ks)?;
    let sup = integrals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let value = if p.is_infinite() {
        sup
    } else {
        let weights: Vec<f64> = (1..=integrals.len()).map(KsConfig::weight).collect();
        weighted_p_sum(&weights, &integrals, p)
    };
    let bound = if p.is_infinite() || sup == 0.0 {
        0.0
    } else {
        ((value.powf(p) + sup.powf(p) * ks.tail_weight()).powf(1.0 / p) - value).max(0.0)
    };
    Ok(NormReport {
        value,
        bound,
        bound_kind: BoundKind::Heuristic,
        depth: ks.depth,
        p,
    })
}

/// `∫_{B_r ∩ (a, b]} f` for `r = 1..=R`.
pub fn improper_cube_integrals(spec: &ImproperSpec, ks: &KsConfig) -> Result<Vec<f64>> {
    (1..=ks.depth)
        .map(|r| {
            let (lo, hi) = ks.family.cube(r as u64).axis_interval(0);
            let (lo, hi) = (lo.max(spec.a), hi.min(spec.b));
            if lo >= hi {
                return Ok(0.0);
            }
            let touches = match spec.singular {
                Endpoint::Lower => lo <= spec.a,
                Endpoint::Upper => hi >= spec.b,
            };
            if touches {
                let result = hk_integral(&spec.with_interval(lo, hi))?;
                if !result.converged {
                    return Err(Error::Diverged {
                        last: result.last,
                        cube: Some(r),
                    });
                }
                Ok(result.value)
            } else {
                let (value, resolved) = integrate_segment(&spec.integrand, lo, hi, 0.1 * spec.tol, spec.max_panels)?;
                if !resolved {
                    return Err(Error::Diverged {
                        last: [value, value],
                        cube: Some(r),
                    });
                }
                Ok(value)
            }
        })
        .collect()
}

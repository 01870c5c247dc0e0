use super::{fd_partial, MultiIndex};
use crate::grid::{GridBox, GridField};
use crate::ks::{ks_inner, KsConfig};
use crate::{Error, Result};

const MARGIN: usize = 3;

/// Integration-by-parts residual `|<f, D_v phi> + <g, phi>|` under two
/// pairings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakResidual {
    /// Plain midpoint-quadrature pairing.
    pub l2: f64,
    /// Truncated `KS^2` inner product.
    pub ks2: f64,
}

/// Checks that `g` is the weak derivative of `f` along `v` when tested
/// against `phi`.
///
/// `phi` must vanish identically on the outer three cells of every axis.
pub fn weak_derivative_residual(
    f: &GridField,
    g: &GridField,
    v: &[f64],
    phi: &GridField,
    ks: &KsConfig,
) -> Result<WeakResidual> {
    f.check_conformable(g)?;
    f.check_conformable(phi)?;
    if v.len() != f.dim() {
        return Err(Error::InvalidArgument(format!(
            "direction has {} components, field has dimension {}",
            v.len(),
            f.dim()
        )));
    }
    check_margin(phi)?;
    let dphi = directional(phi, v)?;
    let l2 = (f.mul(&dphi)?.integrate() + g.mul(phi)?.integrate()).abs();
    let ks2 = (ks_inner(f, &dphi, ks)? + ks_inner(g, phi, ks)?).abs();
    Ok(WeakResidual { l2, ks2 })
}

/// `sum_j v_j D_j phi` with central differences.
fn directional(phi: &GridField, v: &[f64]) -> Result<GridField> {
    let mut out = GridField::zeros_like(phi);
    for (axis, &c) in v.iter().enumerate() {
        if c != 0.0 {
            let d = fd_partial(phi, &MultiIndex::unit(phi.dim(), axis))?;
            out = out.add(&d.scale(c))?;
        }
    }
    Ok(out)
}

fn check_margin(phi: &GridField) -> Result<()> {
    let counts = phi.counts();
    for (flat, &value) in phi.samples().iter().enumerate() {
        if value == 0.0 {
            continue;
        }
        let index = phi.multi_index(flat);
        let near_edge = index
            .iter()
            .zip(counts)
            .any(|(&i, &n)| i < MARGIN || i + MARGIN >= n);
        if near_edge {
            return Err(Error::Support(format!(
                "value {value:e} at cell {index:?} within {MARGIN} cells of the boundary"
            )));
        }
    }
    Ok(())
}

/// `|∫ H phi' + phi(0)|` on `[a, b]` with `N` cells, where `H` is the
/// Heaviside step sampled as 1 at centers `>= 0`.
///
/// `phi` is sampled on the grid for the integral and evaluated directly at 0.
pub fn heaviside_delta_residual<F: Fn(f64) -> f64>(phi: F, a: f64, b: f64, n: usize) -> Result<f64> {
    if !(a < 0.0 && 0.0 < b) {
        return Err(Error::InvalidArgument(format!(
            "the origin must lie strictly inside [{a}, {b}]"
        )));
    }
    let bbox = GridBox::cube(a, b, 1)?;
    let sampled = GridField::from_fn(&bbox, &[n], |x| phi(x[0]))?;
    check_margin(&sampled)?;
    let dphi = fd_partial(&sampled, &MultiIndex(vec![1]))?;
    let step = GridField::from_fn(&bbox, &[n], |x| if x[0] >= 0.0 { 1.0 } else { 0.0 })?;
    Ok((step.mul(&dphi)?.integrate() + phi(0.0)).abs())
}

/// Unnormalized bump `exp(1 / ((x - c)^2 - w^2))` on `|x - c| < w`.
pub fn bump(center: f64, width: f64) -> impl Fn(f64) -> f64 {
    move |x| {
        let gap = (x - center).powi(2) - width * width;
        if gap < 0.0 {
            (1.0 / gap).exp()
        } else {
            0.0
        }
    }
}

use rayon::prelude::*;

use super::MultiIndex;
use crate::grid::GridField;
use crate::ks::{ks_report, KsConfig, NormReport};
use crate::{Error, Result};

/// Converts `h v` into whole-cell offsets, failing if it is off the lattice.
fn lattice_shift(f: &GridField, v: &[f64], h: f64) -> Result<Vec<isize>> {
    if v.len() != f.dim() {
        return Err(Error::InvalidArgument(format!(
            "direction has {} components, field has dimension {}",
            v.len(),
            f.dim()
        )));
    }
    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "direction must be a unit vector, |v| = {norm}"
        )));
    }
    if h == 0.0 || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("step must be finite and nonzero, got {h}")));
    }
    f.spacing()
        .iter()
        .zip(v)
        .enumerate()
        .map(|(axis, (&spacing, &c))| {
            let shift = h * c;
            let cells = shift / spacing;
            let rounded = cells.round();
            if (cells - rounded).abs() > 1e-9 * rounded.abs().max(1.0) {
                Err(Error::Alignment { axis, shift, spacing })
            } else {
                Ok(rounded as isize)
            }
        })
        .collect()
}

/// `(f(x + h v) - f(x)) / h`.
///
/// Values outside the box are zero, or wrapped for periodic fields.
pub fn diff_quotient(f: &GridField, v: &[f64], h: f64) -> Result<GridField> {
    let offset = lattice_shift(f, v, h)?;
    let wrap = f.is_periodic();
    let samples: Vec<f64> = (0..f.len())
        .into_par_iter()
        .map(|flat| {
            let index = f.multi_index(flat);
            (f.shifted_value(&index, &offset, wrap) - f.samples()[flat]) / h
        })
        .collect();
    GridField::from_samples(f.bbox().clone(), f.counts().to_vec(), samples)
        .map(|g| g.with_periodic(f.is_periodic()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CauchyRow {
    pub h_coarse: f64,
    pub h_fine: f64,
    /// `||dq(h_coarse) - dq(h_fine)||_{KS^p}`.
    pub report: NormReport,
}

#[derive(Debug, Clone)]
pub struct StrongDerivative {
    /// Difference quotient at the smallest step.
    pub estimate: GridField,
    pub rows: Vec<CauchyRow>,
}

/// Difference quotients along a decreasing step schedule, with the `KS^p`
/// distances between consecutive quotients.
pub fn strong_derivative(
    f: &GridField,
    v: &[f64],
    p: f64,
    schedule: &[f64],
    ks: &KsConfig,
) -> Result<StrongDerivative> {
    if schedule.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "step schedule needs at least 3 entries, got {}",
            schedule.len()
        )));
    }
    if schedule.iter().any(|h| !(*h > 0.0)) || schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(format!(
            "step schedule must be positive and strictly decreasing: {schedule:?}"
        )));
    }
    let quotients = schedule
        .iter()
        .map(|&h| diff_quotient(f, v, h))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(schedule.len() - 1);
    for k in 0..schedule.len() - 1 {
        let gap = quotients[k].sub(&quotients[k + 1])?;
        rows.push(CauchyRow {
            h_coarse: schedule[k],
            h_fine: schedule[k + 1],
            report: ks_report(&gap, p, ks),
        });
    }
    Ok(StrongDerivative {
        estimate: quotients.into_iter().last().expect("non-empty schedule"),
        rows,
    })
}

/// `D^alpha f` by composing second-order first-derivative stencils, `alpha_j`
/// times along axis `j`.
///
/// Interior points use central differences. Non-periodic fields use
/// one-sided second-order stencils at the two boundary points of each axis;
/// periodic fields wrap.
pub fn fd_partial(f: &GridField, alpha: &MultiIndex) -> Result<GridField> {
    if alpha.dim() != f.dim() {
        return Err(Error::InvalidArgument(format!(
            "multi-index {alpha} does not match dimension {}",
            f.dim()
        )));
    }
    for (axis, &a) in alpha.0.iter().enumerate() {
        let needed = (2 * a as usize + 1).max(3);
        if a > 0 && f.counts()[axis] < needed {
            return Err(Error::GridTooSmall {
                axis,
                points: f.counts()[axis],
                needed,
            });
        }
    }
    let mut out = f.clone();
    for (axis, &a) in alpha.0.iter().enumerate() {
        for _ in 0..a {
            out = first_derivative(&out, axis);
        }
    }
    Ok(out)
}

fn first_derivative(f: &GridField, axis: usize) -> GridField {
    let n = f.counts()[axis];
    let stride = f.strides()[axis];
    let h = f.spacing()[axis];
    let s = f.samples();
    let periodic = f.is_periodic();
    let samples: Vec<f64> = (0..f.len())
        .into_par_iter()
        .map(|flat| {
            let i = (flat / stride) % n;
            let at = |k: usize| s[flat - i * stride + k * stride];
            if periodic {
                (at((i + 1) % n) - at((i + n - 1) % n)) / (2.0 * h)
            } else if i == 0 {
                (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
            } else if i == n - 1 {
                (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h)
            } else {
                (at(i + 1) - at(i - 1)) / (2.0 * h)
            }
        })
        .collect();
    GridField::from_samples(f.bbox().clone(), f.counts().to_vec(), samples)
        .expect("derivative of a valid field")
        .with_periodic(periodic)
}

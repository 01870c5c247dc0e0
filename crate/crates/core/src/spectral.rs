//! Fourier multipliers on the periodic torus and the mean operator.
//!
//! Coefficients use the standard DFT layout and are normalized so that the
//! coefficient at frequency `k` of the sampled mode `exp(2 pi i k.x / L)` is
//! exactly 1, independent of where the cell-centered grid starts.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::calculus::MultiIndex;
use crate::grid::{increment, strides, GridBox, GridField};
use crate::ks::{ks_norm, KsConfig, NormReport};
use crate::{Error, Result};

/// Imaginary parts below this fraction of the amplitude are roundoff.
const REAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    bbox: GridBox,
    counts: Vec<usize>,
    coeffs: Vec<Complex64>,
}

/// Signed frequency of DFT index `j` on `n` points; the Nyquist index maps
/// to `-n/2`.
pub fn frequency(j: usize, n: usize) -> i64 {
    if 2 * j >= n {
        j as i64 - n as i64
    } else {
        j as i64
    }
}

fn is_nyquist(j: usize, n: usize) -> bool {
    n % 2 == 0 && 2 * j == n
}

impl SpectralField {
    pub fn bbox(&self) -> &GridBox {
        &self.bbox
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    /// Coefficient at signed frequency `k`.
    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        let flat: usize = k
            .iter()
            .zip(&self.counts)
            .zip(strides(&self.counts))
            .map(|((&k, &n), s)| k.rem_euclid(n as i64) as usize * s)
            .sum();
        self.coeffs[flat]
    }

    /// Physical frequency `xi_j = k_j / L_j` of every coefficient, plus a
    /// per-axis Nyquist flag.
    fn for_each_mode<F>(&self, f: F) -> Vec<Complex64>
    where
        F: Fn(&[f64], &[bool], Complex64) -> Complex64 + Sync,
    {
        let lengths = self.bbox.lengths();
        let strides = strides(&self.counts);
        (0..self.coeffs.len())
            .into_par_iter()
            .map(|flat| {
                let mut xi = Vec::with_capacity(self.dim());
                let mut nyquist = Vec::with_capacity(self.dim());
                for axis in 0..self.dim() {
                    let n = self.counts[axis];
                    let j = (flat / strides[axis]) % n;
                    xi.push(frequency(j, n) as f64 / lengths[axis]);
                    nyquist.push(is_nyquist(j, n));
                }
                f(&xi, &nyquist, self.coeffs[flat])
            })
            .collect()
    }

    /// Applies a multiplier `m(xi, nyquist)` coefficient-wise.
    pub fn apply<F>(&self, m: F) -> SpectralField
    where
        F: Fn(&[f64], &[bool]) -> Complex64 + Sync,
    {
        SpectralField {
            coeffs: self.for_each_mode(|xi, nyq, c| m(xi, nyq) * c),
            ..self.clone()
        }
    }

    /// `sum_k |c_k|^2`.
    pub fn energy(&self) -> f64 {
        let squares: Vec<f64> = self.coeffs.iter().map(|c| c.norm_sqr()).collect();
        crate::sum::pairwise_sum(&squares)
    }
}

/// `n`-dimensional DFT in place; `inverse` selects the positive exponent.
fn transform(data: &mut [Complex64], counts: &[usize], inverse: bool) {
    let mut planner = FftPlanner::new();
    let strides = strides(counts);
    for axis in 0..counts.len() {
        let n = counts[axis];
        let stride = strides[axis];
        let fft = if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        };
        // Enumerate line starts: every index with zero in this axis.
        let mut extents = counts.to_vec();
        extents[axis] = 1;
        let lines: usize = extents.iter().product();
        let mut index = vec![0usize; counts.len()];
        let mut buffer = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for _ in 0..lines {
            let start: usize = index.iter().zip(&strides).map(|(i, s)| i * s).sum();
            for (m, b) in buffer.iter_mut().enumerate() {
                *b = data[start + m * stride];
            }
            fft.process_with_scratch(&mut buffer, &mut scratch);
            for (m, b) in buffer.iter().enumerate() {
                data[start + m * stride] = *b;
            }
            increment(&mut index, &extents);
        }
    }
}

/// `exp(-2 pi i k.x0 / L)` with `x0` the first cell center.
fn phase(bbox: &GridBox, counts: &[usize], sign: f64) -> Vec<Complex64> {
    let lengths = bbox.lengths();
    let strides = strides(counts);
    (0..counts.iter().product())
        .map(|flat: usize| {
            let mut angle = 0.0;
            for axis in 0..counts.len() {
                let n = counts[axis];
                let j = (flat / strides[axis]) % n;
                let h = lengths[axis] / n as f64;
                let x0 = bbox.lower()[axis] + 0.5 * h;
                angle += frequency(j, n) as f64 * x0 / lengths[axis];
            }
            Complex64::from_polar(1.0, sign * 2.0 * PI * angle)
        })
        .collect()
}

fn require_periodic(f: &GridField, what: &'static str) -> Result<()> {
    if f.is_periodic() {
        Ok(())
    } else {
        Err(Error::NotPeriodic(what))
    }
}

/// `(X_j + conj(X_{-j})) / 2`: exact conjugate symmetry for the DFT of
/// real data.
fn conjugate_symmetrize(data: &[Complex64], counts: &[usize]) -> Vec<Complex64> {
    let strides = strides(counts);
    (0..data.len())
        .map(|flat| {
            let partner: usize = counts
                .iter()
                .zip(&strides)
                .map(|(&n, &s)| ((n - (flat / s) % n) % n) * s)
                .sum();
            0.5 * (data[flat] + data[partner].conj())
        })
        .collect()
}

/// Fourier coefficients of the trigonometric interpolant of `f`.
pub fn forward(f: &GridField) -> Result<SpectralField> {
    require_periodic(f, "the Fourier transform")?;
    let mut data: Vec<Complex64> = f.samples().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform(&mut data, f.counts(), false);
    let mut data = conjugate_symmetrize(&data, f.counts());
    let scale = 1.0 / f.len() as f64;
    let phase = phase(f.bbox(), f.counts(), -1.0);
    for (c, p) in data.iter_mut().zip(phase) {
        *c *= p * scale;
    }
    Ok(SpectralField {
        bbox: f.bbox().clone(),
        counts: f.counts().to_vec(),
        coeffs: data,
    })
}

/// Samples the trigonometric polynomial back on the grid. Fails if the
/// result is not real to roundoff.
pub fn inverse(spec: &SpectralField) -> Result<GridField> {
    let mut data = spec.coeffs.clone();
    let phase = phase(&spec.bbox, &spec.counts, 1.0);
    for (c, p) in data.iter_mut().zip(phase) {
        *c *= p;
    }
    transform(&mut data, &spec.counts, true);
    let amplitude = data.iter().fold(0.0f64, |m, c| m.max(c.re.abs()));
    let residue = data.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
    if residue > REAL_TOLERANCE * amplitude.max(f64::MIN_POSITIVE) && residue > 0.0 {
        return Err(Error::SymmetryViolation { residue, amplitude });
    }
    let samples = data.into_iter().map(|c| c.re).collect();
    Ok(GridField::from_samples(spec.bbox.clone(), spec.counts.clone(), samples)?.with_periodic(true))
}

/// Bessel potential `P^s f`, the multiplier `(1 + |xi|^2)^{s/2}`.
pub fn bessel_potential(f: &GridField, s: f64) -> Result<GridField> {
    let spec = forward(f)?;
    inverse(&spec.apply(|xi, _| {
        let r2: f64 = xi.iter().map(|x| x * x).sum();
        Complex64::new((1.0 + r2).powf(0.5 * s), 0.0)
    }))
}

/// `||P^s f||_{KS^2}`.
pub fn ws_bessel_norm(f: &GridField, s: f64, ks: &KsConfig) -> Result<NormReport> {
    Ok(ks_norm(&bessel_potential(f, s)?, 2.0, ks))
}

/// `D^alpha f` through the multiplier `prod_j (2 pi i xi_j)^{alpha_j}`.
///
/// The Nyquist coefficient along an axis with odd `alpha_j` is dropped.
pub fn spectral_partial(f: &GridField, alpha: &MultiIndex) -> Result<GridField> {
    require_periodic(f, "spectral derivatives")?;
    if alpha.dim() != f.dim() {
        return Err(Error::InvalidArgument(format!(
            "multi-index {alpha} does not match dimension {}",
            f.dim()
        )));
    }
    if alpha.is_zero() {
        return Ok(f.clone());
    }
    let spec = forward(f)?;
    inverse(&spec.apply(|xi, nyquist| {
        let mut m = Complex64::new(1.0, 0.0);
        for (axis, &a) in alpha.0.iter().enumerate() {
            if a % 2 == 1 && nyquist[axis] {
                return Complex64::new(0.0, 0.0);
            }
            m *= Complex64::new(0.0, 2.0 * PI * xi[axis]).powu(a);
        }
        m
    }))
}

/// Gradient-form solution `F` of `div F = f` on the torus:
/// `F_j^ = xi_j f^ / (2 pi i |xi|^2)`, zero at `xi = 0` and at the Nyquist
/// index of axis `j`.
pub fn solve_divergence(f: &GridField) -> Result<Vec<GridField>> {
    let spec = forward(f)?;
    let mean = spec.coeffs[0].re;
    if spec.coeffs[0].norm() > 1e-10 * f.lp_norm(2.0) {
        return Err(Error::NonzeroMean { mean });
    }
    (0..f.dim())
        .map(|j| {
            inverse(&spec.apply(|xi, nyquist| {
                let r2: f64 = xi.iter().map(|x| x * x).sum();
                if r2 == 0.0 || nyquist[j] {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(xi[j], 0.0) / Complex64::new(0.0, 2.0 * PI * r2)
                }
            }))
        })
        .collect()
}

/// `div F` with spectral derivatives.
pub fn divergence(components: &[GridField]) -> Result<GridField> {
    let first = components
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty vector field".into()))?;
    if components.len() != first.dim() {
        return Err(Error::InvalidArgument(format!(
            "{} components for dimension {}",
            components.len(),
            first.dim()
        )));
    }
    let mut out = GridField::zeros_like(first);
    for (j, c) in components.iter().enumerate() {
        out = out.add(&spectral_partial(c, &MultiIndex::unit(first.dim(), j))?)?;
    }
    Ok(out)
}

/// Finitely many weighted atoms `sum_j w_j delta_{y_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} atoms with {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        let dim = atoms[0].len();
        if dim == 0 || atoms.iter().any(|a| a.len() != dim) {
            return Err(Error::InvalidArgument("atoms must share a positive dimension".into()));
        }
        if atoms.iter().flatten().chain(&weights).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("atoms and weights must be finite".into()));
        }
        Ok(Self { atoms, weights })
    }

    pub fn dirac(point: Vec<f64>) -> Self {
        Self::new(vec![point], vec![1.0]).expect("finite point")
    }

    pub fn atoms(&self) -> &[Vec<f64>] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].len()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// `M^t f(x) = sum_j w_j f(x - t y_j)` with shifts rounded to the nearest
/// lattice offset. Periodic fields wrap; others are zero outside the box.
pub fn mean_operator(f: &GridField, mu: &DiscreteMeasure, t: f64) -> Result<GridField> {
    if mu.dim() != f.dim() {
        return Err(Error::InvalidArgument(format!(
            "measure dimension {} does not match field dimension {}",
            mu.dim(),
            f.dim()
        )));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("t must be finite and non-negative, got {t}")));
    }
    let spacing = f.spacing();
    let offsets: Vec<Vec<isize>> = mu
        .atoms
        .iter()
        .map(|y| {
            y.iter()
                .zip(&spacing)
                .map(|(yj, h)| (-t * yj / h).round() as isize)
                .collect()
        })
        .collect();
    let wrap = f.is_periodic();
    let samples: Vec<f64> = (0..f.len())
        .into_par_iter()
        .map(|flat| {
            let index = f.multi_index(flat);
            offsets
                .iter()
                .zip(&mu.weights)
                .map(|(o, w)| w * f.shifted_value(&index, o, wrap))
                .sum()
        })
        .collect();
    Ok(GridField::from_samples(f.bbox().clone(), f.counts().to_vec(), samples)?.with_periodic(wrap))
}

use rayon::prelude::*;

use crate::grid::{increment, GridField};
use crate::quad::{adaptive_gk15, composite_gk15};
use crate::{Error, Result};

/// The bump `C_eps exp(1 / (|x|^2 - eps^2))` on the ball `|x| < eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct MollifierSpec {
    eps: f64,
    dim: usize,
    log_norm: f64,
}

impl MollifierSpec {
    pub fn new(eps: f64, dim: usize) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "mollifier radius must be positive, got {eps}"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        Ok(Self {
            eps,
            dim,
            log_norm: log_normalization(eps, dim),
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `C_eps`. Underflows to zero only for `eps` where the kernel itself is
    /// unrepresentable; [`MollifierSpec::kernel`] works in log space.
    pub fn normalization(&self) -> f64 {
        self.log_norm.exp()
    }

    pub fn log_normalization(&self) -> f64 {
        self.log_norm
    }

    /// `exp(1 / (|x|^2 - eps^2))` inside the ball, zero outside.
    pub fn unnormalized(&self, x: &[f64]) -> f64 {
        match self.exponent(x) {
            Some(e) => e.exp(),
            None => 0.0,
        }
    }

    /// Normalized kernel `phi_eps(x)` with unit mass.
    pub fn kernel(&self, x: &[f64]) -> f64 {
        match self.exponent(x) {
            Some(e) => (self.log_norm + e).exp(),
            None => 0.0,
        }
    }

    fn exponent(&self, x: &[f64]) -> Option<f64> {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let gap = r2 - self.eps * self.eps;
        (gap < 0.0).then(|| 1.0 / gap)
    }
}

/// `ln C_eps = 1/eps^2 - ln(S_{n-1} eps^n J)` with
/// `J = ∫_0^1 t^{n-1} exp(-t^2 / (eps^2 (1 - t^2))) dt`.
fn log_normalization(eps: f64, dim: usize) -> f64 {
    let e2 = eps * eps;
    let integrand = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let t2 = t * t;
        t.powi(dim as i32 - 1) * (-t2 / (e2 * (1.0 - t2))).exp()
    };
    let scale = composite_gk15(integrand, 0.0, 1.0, 64);
    let j = adaptive_gk15(&|t| Ok::<f64, ()>(integrand(t)), 0.0, 1.0, 1e-15 * scale, 1 << 16)
        .expect("infallible")
        .value;
    1.0 / e2 - (sphere_area(dim).ln() + dim as f64 * eps.ln() + j.ln())
}

/// Surface area of the unit sphere in `R^n`, `2 pi^{n/2} / Gamma(n/2)`.
fn sphere_area(dim: usize) -> f64 {
    let pi = std::f64::consts::PI;
    2.0 * pi.powf(dim as f64 / 2.0) / gamma_half(dim)
}

/// `Gamma(m / 2)` for positive integers `m`.
fn gamma_half(m: usize) -> f64 {
    let (mut x, mut g) = if m % 2 == 0 {
        (1.0, 1.0)
    } else {
        (0.5, std::f64::consts::PI.sqrt())
    };
    while 2.0 * x < m as f64 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Discrete convolution `f_eps(x_j) = sum_k f(x_j - y_k) w_k` with `f`
/// extended by zero outside its box.
///
/// The weights `w_k` are the kernel sampled at lattice offsets `y_k` and
/// rescaled to sum to one.
pub fn mollify(f: &GridField, eps: f64) -> Result<GridField> {
    let spacing = f.spacing();
    let h_max = f.max_spacing();
    if !(eps >= h_max) {
        return Err(Error::UnderResolvedKernel { eps, spacing: h_max });
    }
    let spec = MollifierSpec::new(eps, f.dim())?;
    let (offsets, weights) = kernel_stencil(&spec, &spacing);
    let counts = f.counts();
    let samples: Vec<f64> = (0..f.len())
        .into_par_iter()
        .map(|flat| {
            let index = f.multi_index(flat);
            offsets
                .iter()
                .zip(&weights)
                .map(|(offset, w)| w * f.shifted_value(&index, offset, false))
                .sum()
        })
        .collect();
    GridField::from_samples(f.bbox().clone(), counts.to_vec(), samples)
        .map(|g| g.with_periodic(f.is_periodic()))
}

/// Lattice offsets inside the open ball of radius `eps` and their
/// normalized weights.
fn kernel_stencil(spec: &MollifierSpec, spacing: &[f64]) -> (Vec<Vec<isize>>, Vec<f64>) {
    let reach: Vec<usize> = spacing
        .iter()
        .map(|h| (spec.eps() / h).floor() as usize)
        .collect();
    let extents: Vec<usize> = reach.iter().map(|r| 2 * r + 1).collect();
    let total: usize = extents.iter().product();
    let mut offsets = Vec::new();
    let mut raw = Vec::new();
    let mut index = vec![0usize; spacing.len()];
    let mut y = vec![0.0; spacing.len()];
    for _ in 0..total {
        let offset: Vec<isize> = index
            .iter()
            .zip(&reach)
            .map(|(&i, &r)| i as isize - r as isize)
            .collect();
        for (axis, o) in offset.iter().enumerate() {
            y[axis] = *o as f64 * spacing[axis];
        }
        let w = spec.kernel(&y);
        if w > 0.0 {
            offsets.push(offset);
            raw.push(w);
        }
        increment(&mut index, &extents);
    }
    let mass: f64 = crate::sum::pairwise_sum(&raw);
    let weights = raw.iter().map(|w| w / mass).collect();
    (offsets, weights)
}

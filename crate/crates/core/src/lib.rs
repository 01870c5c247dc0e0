//! Numerical laboratory for Kuelbs-Steadman (`KS^p`) and Sobolev-Kuelbs-Steadman
//! (`WS^{k,p}`) norms of sampled fields on boxes in `R^n`.
//!
//! The building blocks are:
//!
//! - [`expr`]: a small expression language for test fields (`sin(2*pi*x1)`).
//! - [`grid`]: cell-centered samples on uniform grids with midpoint quadrature.
//! - [`cubes`]: the enumerated family of dyadic-centered cubes `r -> B_r`.
//! - [`ks`]: truncated `KS^p` series with tail certificates.
//! - [`calculus`]: mollifiers, difference quotients, weak-derivative residuals
//!   and `WS^{k,p}` norms.
//! - [`spectral`]: Fourier multipliers on the torus (Bessel potentials,
//!   spectral derivatives, the divergence solver) and the mean operator.
//! - [`hk`]: an improper-integral engine for conditionally convergent
//!   oscillatory integrands.

pub mod calculus;
pub mod cubes;
mod error;
pub mod expr;
pub mod grid;
pub mod hk;
pub mod ks;
pub mod quad;
pub mod spectral;
pub mod sum;

pub use cubes::{CubeFamily, CubeSpec};
pub use error::{Error, Result};
pub use expr::{CompiledExpr, FieldExpr};
pub use grid::{GridBox, GridField};
pub use ks::{BoundKind, KsConfig, NormReport};

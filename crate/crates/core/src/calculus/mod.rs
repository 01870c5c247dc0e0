//! Mollification, difference quotients, weak-derivative checks and
//! `WS^{k,p}` norms.

mod difference;
mod mollifier;
mod multi_index;
mod sobolev;
mod weak;

pub use difference::{diff_quotient, fd_partial, strong_derivative, CauchyRow, StrongDerivative};
pub use mollifier::{mollify, MollifierSpec};
pub use multi_index::{multi_indices, MultiIndex};
pub use sobolev::{
    partial, sobolev_norm, ws1_sup_lebesgue, ws_inner, ws_norm, ws_terms, DerivativeEngine,
};
pub use weak::{bump, heaviside_delta_residual, weak_derivative_residual, WeakResidual};

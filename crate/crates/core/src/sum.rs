//! Deterministic reductions.
//!
//! Every sum over cells or cube indices in this crate goes through
//! [`pairwise_sum`], whose association order depends only on the slice
//! length. Parallel stages collect their terms into a `Vec` first, so results
//! are bit-identical for any worker count.

const LEAF: usize = 8;

/// Pairwise (cascade) summation with a fixed split at `len / 2`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().fold(0.0, |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise sum of `f(v)` over `values`.
pub fn pairwise_sum_by<F: Fn(f64) -> f64>(values: &[f64], f: F) -> f64 {
    let mapped: Vec<f64> = values.iter().map(|&v| f(v)).collect();
    pairwise_sum(&mapped)
}

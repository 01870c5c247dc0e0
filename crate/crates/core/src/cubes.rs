//! The enumerated cube family `r -> B_r`.
//!
//! Cubes are indexed by a level `l` (edge `2^(1-l) / sqrt(n)`) and a center
//! index `i` into an enumeration of dyadic rationals in `[-M, M]^n`. The pair
//! `(l, i)` is folded into a single index `r` by Cantor's anti-diagonal
//! pairing. Cubes are computed on demand; the family is never materialized.

/// Closed axis-aligned cube `prod_j [c_j - e/2, c_j + e/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeSpec {
    center: Vec<f64>,
    edge: f64,
}

impl CubeSpec {
    pub fn new(center: Vec<f64>, edge: f64) -> Self {
        assert!(edge > 0.0, "cube edge must be positive, got {edge}");
        Self { center, edge }
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn edge(&self) -> f64 {
        self.edge
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn volume(&self) -> f64 {
        self.edge.powi(self.dim() as i32)
    }

    pub fn axis_interval(&self, axis: usize) -> (f64, f64) {
        let half = 0.5 * self.edge;
        (self.center[axis] - half, self.center[axis] + half)
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        (0..self.dim()).all(|axis| {
            let (lo, hi) = self.axis_interval(axis);
            (lo..=hi).contains(&point[axis])
        })
    }
}

/// Cantor pairing `(l, i) -> (l+i-1)(l+i-2)/2 + i`, a bijection `N x N -> N`
/// on 1-based indices.
pub fn pairing(l: u64, i: u64) -> u64 {
    assert!(l >= 1 && i >= 1, "pairing is defined on positive integers");
    let d = l + i - 1;
    d * (d - 1) / 2 + i
}

/// Inverse of [`pairing`].
pub fn unpair(r: u64) -> (u64, u64) {
    assert!(r >= 1, "cube indices start at 1");
    // Largest d with d(d-1)/2 < r.
    let mut d = ((((8 * r) as f64).sqrt() + 1.0) / 2.0) as u64;
    while d * (d - 1) / 2 >= r {
        d -= 1;
    }
    while (d + 1) * d / 2 < r {
        d += 1;
    }
    let i = r - d * (d - 1) / 2;
    (d + 1 - i, i)
}

/// Edge of a level-`l` cube in dimension `n`: `2^(1-l) / sqrt(n)`.
pub fn edge(l: u64, n: usize) -> f64 {
    assert!(l >= 1, "levels start at 1");
    2f64.powi(1 - l as i32) / (n as f64).sqrt()
}

/// `j`-th (1-based) point of the one-dimensional dyadic enumeration of
/// `[-M, M]`: the integers `-M..=M`, then for each `m >= 1` the odd multiples
/// of `2^-m` in ascending order.
pub fn dyadic_point(j: u64, window: u64) -> f64 {
    assert!(j >= 1, "center indices start at 1");
    let mut k = j - 1;
    let integers = 2 * window + 1;
    if k < integers {
        return k as f64 - window as f64;
    }
    k -= integers;
    let mut level = 1;
    loop {
        // Odd numerators in [-M 2^m, M 2^m]: there are M 2^m of them.
        let count = window << level;
        if k < count {
            let numerator = -((count as i64) - 1) + 2 * k as i64;
            return numerator as f64 / (1u64 << level) as f64;
        }
        k -= count;
        level += 1;
    }
}

/// `j`-th (1-based) tuple of positive integers of length `n`, in order of
/// increasing sum with ties broken lexicographically.
pub fn graded_tuple(j: u64, n: usize) -> Vec<u64> {
    assert!(j >= 1 && n >= 1);
    if n == 1 {
        return vec![j];
    }
    let mut rank = j;
    let mut sum = n as u64;
    loop {
        let c = compositions(sum, n);
        if rank <= c {
            break;
        }
        rank -= c;
        sum += 1;
    }
    let mut tuple = Vec::with_capacity(n);
    let mut remaining = sum;
    for slots in (2..=n).rev() {
        let mut v = 1;
        loop {
            let c = compositions(remaining - v, slots - 1);
            if rank <= c {
                break;
            }
            rank -= c;
            v += 1;
        }
        tuple.push(v);
        remaining -= v;
    }
    tuple.push(remaining);
    tuple
}

/// Number of ways to write `sum` as an ordered sum of `parts` positive
/// integers, `C(sum-1, parts-1)`.
fn compositions(sum: u64, parts: usize) -> u64 {
    let parts = parts as u64;
    if sum < parts {
        return 0;
    }
    binomial(sum - 1, parts - 1)
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, t| acc * (n - t) / (t + 1))
}

/// Cube family over centers in `[-M, M]^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeFamily {
    dim: usize,
    window: u64,
}

impl CubeFamily {
    pub fn new(dim: usize, window: u64) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        assert!(window >= 1, "center window must be at least 1");
        Self { dim, window }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    /// `j`-th center: the 1-D enumeration lifted through [`graded_tuple`].
    pub fn center(&self, j: u64) -> Vec<f64> {
        graded_tuple(j, self.dim)
            .into_iter()
            .map(|k| dyadic_point(k, self.window))
            .collect()
    }

    pub fn cube(&self, r: u64) -> CubeSpec {
        let (l, i) = unpair(r);
        CubeSpec::new(self.center(i), edge(l, self.dim))
    }

    /// Cubes `B_1..B_depth`.
    pub fn cubes(&self, depth: usize) -> impl Iterator<Item = CubeSpec> + '_ {
        (1..=depth as u64).map(move |r| self.cube(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn pairing_examples() {
        assert_eq!(pairing(1, 1), 1);
        assert_eq!(pairing(2, 1), 2);
        assert_eq!(pairing(1, 2), 3);
        for l in 1..=100 {
            for i in 1..=100 {
                assert_eq!(unpair(pairing(l, i)), (l, i));
            }
        }
    }

    #[test]
    fn pairing_is_bijective_up_to_ten_thousand() {
        let mut seen = HashSet::new();
        for r in 1..=10_000 {
            let (l, i) = unpair(r);
            assert_eq!(pairing(l, i), r);
            assert!(seen.insert((l, i)));
        }
    }

    #[test]
    fn unpair_handles_large_indices() {
        for r in [1u64 << 40, (1 << 40) + 12345, u32::MAX as u64] {
            let (l, i) = unpair(r);
            assert_eq!(pairing(l, i), r);
        }
    }

    #[test]
    fn edges() {
        assert_eq!(edge(1, 1), 1.0);
        assert_eq!(edge(2, 4), 0.25);
        assert_eq!(edge(3, 1), 0.25);
        for n in 1..=6 {
            for l in 1..=20 {
                assert!(edge(l, n).powi(n as i32) <= 1.0);
            }
        }
    }

    #[test]
    fn one_dimensional_centers() {
        let fam = CubeFamily::new(1, 1);
        let got: Vec<f64> = (1..=6).map(|j| fam.center(j)[0]).collect();
        assert_eq!(got, vec![-1.0, 0.0, 1.0, -0.5, 0.5, -0.75]);
        let fam = CubeFamily::new(1, 2);
        let got: Vec<f64> = (1..=9).map(|j| fam.center(j)[0]).collect();
        assert_eq!(got, vec![-2.0, -1.0, 0.0, 1.0, 2.0, -1.5, -0.5, 0.5, 1.5]);
    }

    #[test]
    fn lifted_centers() {
        let fam = CubeFamily::new(2, 1);
        assert_eq!(fam.center(1), vec![-1.0, -1.0]);
        // Sum-3 tuples (1,2), (2,1).
        assert_eq!(fam.center(2), vec![-1.0, 0.0]);
        assert_eq!(fam.center(3), vec![0.0, -1.0]);
        assert_eq!(graded_tuple(4, 2), vec![1, 3]);
        assert_eq!(graded_tuple(1, 3), vec![1, 1, 1]);
        assert_eq!(graded_tuple(2, 3), vec![1, 1, 2]);
        assert_eq!(graded_tuple(4, 3), vec![2, 1, 1]);
    }

    #[test]
    fn graded_tuples_are_distinct_and_ordered() {
        for n in 1..=4 {
            let tuples: Vec<Vec<u64>> = (1..=500).map(|j| graded_tuple(j, n)).collect();
            let unique: HashSet<_> = tuples.iter().collect();
            assert_eq!(unique.len(), tuples.len());
            for w in tuples.windows(2) {
                let (s0, s1): (u64, u64) = (w[0].iter().sum(), w[1].iter().sum());
                assert!(s0 < s1 || (s0 == s1 && w[0] < w[1]), "{:?} then {:?}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn cube_composition() {
        let fam = CubeFamily::new(1, 1);
        assert_eq!(fam.cube(1), CubeSpec::new(vec![-1.0], 1.0));
        assert_eq!(fam.cube(2), CubeSpec::new(vec![-1.0], 0.5));
        assert_eq!(fam.cube(3), CubeSpec::new(vec![0.0], 1.0));
    }

    #[test]
    fn low_levels_cover_the_window() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let fam = CubeFamily::new(1, 2);
        let cubes: Vec<(u64, CubeSpec)> = (1..=5000).map(|r| (unpair(r).0, fam.cube(r))).collect();
        for _ in 0..100 {
            let x = [rng.random_range(-2.0..=2.0)];
            for level in 1..=3 {
                assert!(
                    cubes.iter().any(|(l, c)| *l == level && c.contains(&x)),
                    "no level-{level} cube contains {x:?}"
                );
            }
        }
    }
}

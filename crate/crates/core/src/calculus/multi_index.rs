use std::fmt;

/// Multi-index `alpha = (alpha_1, .., alpha_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    /// `e_axis`.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut alpha = vec![0; dim];
        alpha[axis] = 1;
        Self(alpha)
    }

    /// `|alpha|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All `alpha` with `|alpha| <= k` in graded lexicographic order.
pub fn multi_indices(k: u32, dim: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for order in 0..=k {
        let mut current = vec![0; dim];
        with_order(order, 0, &mut current, &mut out);
    }
    out
}

fn with_order(remaining: u32, axis: usize, current: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if axis + 1 == current.len() {
        current[axis] = remaining;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for a in 0..=remaining {
        current[axis] = a;
        with_order(remaining - a, axis + 1, current, out);
    }
    current[axis] = 0;
}

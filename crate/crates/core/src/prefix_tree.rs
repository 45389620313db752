//! Segment tree over a sequence of reals answering "largest non-empty prefix
//! sum" after point updates, both in `O(log n)`.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub struct MaxPrefixTree {
    leaves: usize,
    sum: Vec<f64>,
    best: Vec<f64>,
}

impl MaxPrefixTree {
    pub fn new(values: &[f64]) -> Self {
        let leaves = values.len().max(1).next_power_of_two();
        let mut sum = vec![0.0; 2 * leaves];
        // Padding leaves carry no prefix of their own.
        let mut best = vec![f64::NEG_INFINITY; 2 * leaves];
        for (i, &v) in values.iter().enumerate() {
            sum[leaves + i] = v;
            best[leaves + i] = v;
        }
        let mut tree = Self { leaves, sum, best };
        for node in (1..leaves).rev() {
            tree.pull(node);
        }
        tree
    }

    #[inline]
    fn pull(&mut self, node: usize) {
        let (l, r) = (2 * node, 2 * node + 1);
        self.sum[node] = self.sum[l] + self.sum[r];
        self.best[node] = self.best[l].max(self.sum[l] + self.best[r]);
    }

    /// Sets element `i` to `v`.
    #[inline]
    pub fn update(&mut self, i: usize, v: f64) {
        let mut node = self.leaves + i;
        self.sum[node] = v;
        self.best[node] = v;
        node /= 2;
        while node >= 1 {
            self.pull(node);
            node /= 2;
        }
    }

    /// `max_{1 ≤ k ≤ len} (x_1 + … + x_k)`; `-inf` for an empty sequence.
    #[inline]
    pub fn max_prefix(&self) -> f64 {
        self.best[1]
    }

    /// Sum of all elements.
    #[inline]
    pub fn total(&self) -> f64 {
        self.sum[1]
    }
}

/// Linear-scan reference for [`MaxPrefixTree::max_prefix`].
pub fn max_prefix_linear(values: &[f64]) -> f64 {
    let mut acc = 0.0;
    let mut best = f64::NEG_INFINITY;
    for &v in values {
        acc += v;
        best = best.max(acc);
    }
    best
}

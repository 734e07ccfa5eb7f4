//! Dynamic weighted sampling over a fixed index range.
//!
//! Binary indexed sum tree: set/update and draw are O(log n). Parents are
//! recomputed from children on every update, so sums stay internally
//! consistent and rounding error does not accumulate over long runs.

#[derive(Debug, Clone)]
pub(crate) struct WeightTree {
    leaves: usize,
    tree: Vec<f64>,
}

impl WeightTree {
    pub fn new(n: usize) -> Self {
        let leaves = n.next_power_of_two().max(1);
        WeightTree {
            leaves,
            tree: vec![0.0; 2 * leaves],
        }
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.tree[1]
    }

    #[cfg(test)]
    pub fn get(&self, i: usize) -> f64 {
        self.tree[self.leaves + i]
    }

    pub fn set(&mut self, i: usize, w: f64) {
        debug_assert!(w >= 0.0);
        let mut node = self.leaves + i;
        self.tree[node] = w;
        while node > 1 {
            node /= 2;
            self.tree[node] = self.tree[2 * node] + self.tree[2 * node + 1];
        }
    }

    /// Picks an index with probability proportional to its weight, from one
    /// uniform `u` in [0, 1). Total weight must be positive.
    pub fn sample(&self, u: f64) -> usize {
        debug_assert!(self.total() > 0.0);
        let mut target = u * self.total();
        let mut node = 1;
        while node < self.leaves {
            let left = self.tree[2 * node];
            if target < left {
                node = 2 * node;
            } else {
                target -= left;
                node = 2 * node + 1;
            }
        }
        let mut idx = node - self.leaves;
        // Roundoff can land the descent on a zero-weight leaf at a boundary;
        // step to the nearest positive weight.
        if self.tree[node] <= 0.0 {
            let mut lo = idx;
            let mut hi = idx;
            loop {
                if hi + 1 < self.leaves {
                    hi += 1;
                    if self.tree[self.leaves + hi] > 0.0 {
                        idx = hi;
                        break;
                    }
                }
                if lo > 0 {
                    lo -= 1;
                    if self.tree[self.leaves + lo] > 0.0 {
                        idx = lo;
                        break;
                    }
                }
                assert!(hi + 1 < self.leaves || lo > 0, "sample from empty tree");
            }
        }
        idx
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{unit_f64, SplitMix64};
    use rand::RngCore;

    #[test]
    fn totals_and_updates() {
        let mut t = WeightTree::new(5);
        t.set(0, 1.0);
        t.set(3, 2.5);
        assert_eq!(t.total(), 3.5);
        assert_eq!(t.get(3), 2.5);
        t.set(3, 0.0);
        assert_eq!(t.total(), 1.0);
    }

    #[test]
    fn sampling_matches_weights() {
        let mut t = WeightTree::new(6);
        let w = [0.0, 2.0, 1.0, 0.0, 4.0, 1.0];
        for (i, &wi) in w.iter().enumerate() {
            t.set(i, wi);
        }
        let mut counts = [0usize; 6];
        let mut rng = SplitMix64::new(17);
        let n = 400_000;
        for _ in 0..n {
            counts[t.sample(unit_f64(rng.next_u64()))] += 1;
        }
        assert_eq!(counts[0], 0);
        assert_eq!(counts[3], 0);
        let total: f64 = w.iter().sum();
        for (i, &wi) in w.iter().enumerate() {
            if wi > 0.0 {
                let expect = wi / total;
                let got = counts[i] as f64 / n as f64;
                assert!((got - expect).abs() < 0.005, "slot {i}: {got} vs {expect}");
            }
        }
    }

    #[test]
    fn single_slot() {
        let mut t = WeightTree::new(1);
        t.set(0, 7.0);
        assert_eq!(t.sample(0.9999), 0);
    }
}

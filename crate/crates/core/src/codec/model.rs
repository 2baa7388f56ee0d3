use alloc::vec;
use alloc::vec::Vec;

/// Lower bound on the total count at which the model halves its counts.
pub const RESCALE_THRESHOLD: u32 = 1 << 16;
/// Count added to a symbol each time it is coded.
pub const COUNT_INCREMENT: u32 = 24;

/// Order-0 adaptive frequency model over `levels + 1` symbols.
///
/// Index `levels` is the end-of-stream sentinel. Cumulative frequencies live
/// in a Fenwick tree, so lookups and updates cost `O(log L)` even at 65,536
/// levels.
#[derive(Debug, Clone)]
pub struct AdaptiveModel {
    levels: u32,
    counts: Vec<u32>,
    tree: Vec<u32>,
    total: u32,
    threshold: u32,
}

impl AdaptiveModel {
    pub fn new(levels: u32) -> Self {
        let symbols = levels as usize + 1;
        // Halving floors every count at 1, so the threshold has to leave room
        // for one unit per symbol.
        let threshold = RESCALE_THRESHOLD.max((symbols as u32 * 4).next_power_of_two());
        let mut model = Self {
            levels,
            counts: vec![1; symbols],
            tree: vec![0; symbols + 1],
            total: 0,
            threshold,
        };
        model.rebuild();
        model
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn sentinel(&self) -> u32 {
        self.levels
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn threshold(&self) -> u32 {
        self.threshold
    }

    pub fn count(&self, symbol: u32) -> u32 {
        self.counts[symbol as usize]
    }

    fn rebuild(&mut self) {
        let n = self.counts.len();
        self.tree.iter_mut().for_each(|t| *t = 0);
        for i in 0..n {
            let idx = i + 1;
            self.tree[idx] += self.counts[i];
            let parent = idx + (idx & idx.wrapping_neg());
            if parent <= n {
                self.tree[parent] += self.tree[idx];
            }
        }
        self.total = self.counts.iter().sum();
    }

    /// Sum of counts of all symbols below `symbol`.
    fn cumulative(&self, symbol: u32) -> u32 {
        let mut idx = symbol as usize;
        let mut sum = 0;
        while idx > 0 {
            sum += self.tree[idx];
            idx &= idx - 1;
        }
        sum
    }

    /// `(cumulative low, frequency)` of a symbol.
    pub fn range_of(&self, symbol: u32) -> (u32, u32) {
        (self.cumulative(symbol), self.counts[symbol as usize])
    }

    /// Symbol whose cumulative interval contains `target < total`.
    pub fn find(&self, target: u32) -> (u32, u32, u32) {
        let n = self.counts.len();
        let mut pos = 0usize;
        let mut remaining = target;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= remaining {
                pos = next;
                remaining -= self.tree[next];
            }
            step >>= 1;
        }
        let low = target - remaining;
        (pos as u32, low, self.counts[pos])
    }

    pub fn update(&mut self, symbol: u32) {
        let n = self.counts.len();
        self.counts[symbol as usize] += COUNT_INCREMENT;
        self.total += COUNT_INCREMENT;
        let mut idx = symbol as usize + 1;
        while idx <= n {
            self.tree[idx] += COUNT_INCREMENT;
            idx += idx & idx.wrapping_neg();
        }
        if self.total > self.threshold {
            for c in self.counts.iter_mut() {
                *c = (*c + 1) / 2;
            }
            self.rebuild();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starts_flat() {
        let m = AdaptiveModel::new(4);
        assert_eq!(m.total(), 5);
        assert_eq!(m.range_of(0), (0, 1));
        assert_eq!(m.range_of(4), (4, 1));
        assert_eq!(m.find(3), (3, 3, 1));
    }

    #[test]
    fn find_agrees_with_linear_scan() {
        let mut m = AdaptiveModel::new(37);
        let mut x = 12345u32;
        for _ in 0..5000 {
            x = x.wrapping_mul(1_103_515_245).wrapping_add(12345);
            m.update((x >> 16) % 37);
        }
        let mut low = 0;
        for s in 0..=37u32 {
            let (l, f) = m.range_of(s);
            assert_eq!(l, low);
            for t in [low, low + f - 1] {
                assert_eq!(m.find(t), (s, low, f));
            }
            low += f;
        }
        assert_eq!(low, m.total());
    }

    #[test]
    fn rescale_keeps_total_bounded_and_counts_positive() {
        for levels in [2u32, 256, 65_536] {
            let mut m = AdaptiveModel::new(levels);
            for i in 0..200_000u32 {
                m.update(i % 3);
                assert!(m.total() <= m.threshold());
            }
            assert!((0..=levels).all(|s| m.count(s) >= 1));
            let sum: u32 = (0..=levels).map(|s| m.count(s)).sum();
            assert_eq!(sum, m.total());
        }
    }
}

//! Exact minimum-distortion codebook for small instances.
//!
//! Optimal 1-D k-means clusters are contiguous runs of the sorted data, so the
//! global optimum is found by dynamic programming over prefix sums. The DP
//! runs over distinct values weighted by multiplicity, which keeps duplicates
//! inside one cluster. Each layer is filled by divide and conquer on the
//! monotone split point, `O(levels · m log m)` for `m` distinct values.

use alloc::vec;
use alloc::vec::Vec;

use super::{check_levels, round_f32, sorted_values, transform_distortion, FitMode, TransformCodebook};
use crate::error::{Error, Result};
use crate::tensor::FeatureTensor;

pub const MAX_DP_ELEMENTS: usize = 4096;
pub const MAX_DP_LEVELS: u32 = 64;

struct Prefix {
    w: Vec<f64>,
    s1: Vec<f64>,
    s2: Vec<f64>,
}

impl Prefix {
    /// Within-cluster squared error of distinct values `[i, j)`.
    fn cost(&self, i: usize, j: usize) -> f64 {
        let w = self.w[j] - self.w[i];
        let s1 = self.s1[j] - self.s1[i];
        let s2 = self.s2[j] - self.s2[i];
        (s2 - s1 * s1 / w).max(0.0)
    }
}

pub fn fit_optimal_dp(data: &FeatureTensor, levels: u32) -> Result<(TransformCodebook, f64)> {
    check_levels(levels)?;
    if data.len() > MAX_DP_ELEMENTS || levels > MAX_DP_LEVELS {
        return Err(Error::Size(alloc::format!(
            "exact fit limited to {MAX_DP_ELEMENTS} elements and {MAX_DP_LEVELS} levels"
        )));
    }
    let sorted = sorted_values(data);
    let mut values: Vec<f64> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for &x in &sorted {
        if values.last() == Some(&(x as f64)) {
            *weights.last_mut().expect("paired with values") += 1.0;
        } else {
            values.push(x as f64);
            weights.push(1.0);
        }
    }
    let m = values.len();
    let k = levels as usize;
    if m < k {
        return Err(Error::degenerate(alloc::format!("{m} distinct values cannot fill {k} levels")));
    }

    // Centering keeps the prefix-sum cost numerically tame.
    let mean = sorted.iter().map(|&x| x as f64).sum::<f64>() / sorted.len() as f64;
    let mut prefix = Prefix { w: vec![0.0; m + 1], s1: vec![0.0; m + 1], s2: vec![0.0; m + 1] };
    for i in 0..m {
        let y = values[i] - mean;
        prefix.w[i + 1] = prefix.w[i] + weights[i];
        prefix.s1[i + 1] = prefix.s1[i] + weights[i] * y;
        prefix.s2[i + 1] = prefix.s2[i] + weights[i] * y * y;
    }

    // cost[j] = best error of the first j distinct values in `layer` clusters.
    let mut prev: Vec<f64> = (0..=m).map(|j| if j == 0 { 0.0 } else { prefix.cost(0, j) }).collect();
    let mut splits: Vec<Vec<usize>> = vec![vec![0; m + 1]];
    for layer in 2..=k {
        let mut cur = vec![f64::INFINITY; m + 1];
        let mut arg = vec![0usize; m + 1];
        fill_layer(&prefix, &prev, &mut cur, &mut arg, layer, m, layer - 1, m - 1);
        splits.push(arg);
        prev = cur;
    }

    let mut ends = vec![m];
    let mut j = m;
    for layer in (1..k).rev() {
        j = splits[layer][j];
        ends.push(j);
    }
    ends.push(0);
    ends.reverse();
    let centers: Vec<f64> = ends
        .windows(2)
        .map(|w| {
            let (i, j) = (w[0], w[1]);
            let tw: f64 = weights[i..j].iter().sum();
            let s: f64 = values[i..j].iter().zip(&weights[i..j]).map(|(v, w)| v * w).sum();
            round_f32(s / tw)
        })
        .collect();
    let cb = TransformCodebook::new(centers, FitMode::LloydMax, 0, data.source_tag())?;
    let distortion = transform_distortion(data, &cb);
    Ok((cb, distortion))
}

/// Fills `cur[j]` for `j` in `[lo, hi]` given the split point lies in
/// `[opt_lo, opt_hi]`.
#[allow(clippy::too_many_arguments)]
fn fill_layer(
    prefix: &Prefix,
    prev: &[f64],
    cur: &mut [f64],
    arg: &mut [usize],
    lo: usize,
    hi: usize,
    opt_lo: usize,
    opt_hi: usize,
) {
    if lo > hi {
        return;
    }
    let mid = lo + (hi - lo) / 2;
    let mut best = f64::INFINITY;
    let mut best_i = opt_lo;
    for i in opt_lo..=opt_hi.min(mid - 1) {
        let c = prev[i] + prefix.cost(i, mid);
        if c < best {
            best = c;
            best_i = i;
        }
    }
    cur[mid] = best;
    arg[mid] = best_i;
    if mid > lo {
        fill_layer(prefix, prev, cur, arg, lo, mid - 1, opt_lo, best_i);
    }
    fill_layer(prefix, prev, cur, arg, mid + 1, hi, best_i, opt_hi);
}

use alloc::vec::Vec;

use super::{check_levels, distinct_count, quantile_sorted, round_f32, sorted_values, FitMode, TransformCodebook};
use crate::error::{Error, Result};
use crate::tensor::FeatureTensor;

/// Histogram-equalising fit: region edges sit at the empirical `j/L`
/// quantiles and each center is its region's mean.
pub fn fit_equal_frequency(data: &FeatureTensor, levels: u32) -> Result<TransformCodebook> {
    fit_equal_frequency_regions(data, levels).map(|(cb, _)| cb)
}

/// Like [`fit_equal_frequency`], also returning the sample count of each
/// quantile region used during the fit.
///
/// These are the fit-time regions. The codebook itself re-derives boundaries
/// as midpoints between centers, so symbol counts after
/// [`forward_transform`](super::forward_transform) can be less even in the
/// tails.
pub fn fit_equal_frequency_regions(data: &FeatureTensor, levels: u32) -> Result<(TransformCodebook, Vec<usize>)> {
    check_levels(levels)?;
    let sorted = sorted_values(data);
    if distinct_count(&sorted) < levels as usize {
        return Err(Error::degenerate(alloc::format!(
            "need at least {levels} distinct values for equal-frequency fit"
        )));
    }
    let (centers, counts) = quantile_partition(&sorted, levels as usize)?;
    let cb = TransformCodebook::new(centers, FitMode::EqualFreq, 0, data.source_tag())?;
    Ok((cb, counts))
}

/// Centers for sorted input, shared with the Lloyd-Max initialiser.
pub(super) fn equal_freq_centers(sorted: &[f32], levels: usize) -> Result<Vec<f64>> {
    quantile_partition(sorted, levels).map(|(centers, _)| centers)
}

fn quantile_partition(sorted: &[f32], levels: usize) -> Result<(Vec<f64>, Vec<usize>)> {
    let n = sorted.len();
    // Region j holds values in (q_j, q_{j+1}] with q_0 = -inf, q_L = +inf.
    let mut starts = Vec::with_capacity(levels + 1);
    starts.push(0usize);
    for j in 1..levels {
        let q = quantile_sorted(sorted, j as f64 / levels as f64);
        starts.push(sorted.partition_point(|&x| (x as f64) <= q));
    }
    starts.push(n);

    let mut centers: Vec<f64> = Vec::with_capacity(levels);
    for j in 0..levels {
        let region = &sorted[starts[j]..starts[j + 1]];
        if region.is_empty() {
            return Err(Error::degenerate(alloc::format!("quantile region {j} is empty")));
        }
        let mean = region.iter().map(|&x| x as f64).sum::<f64>() / region.len() as f64;
        let mut c = round_f32(mean);
        if let Some(&prev) = centers.last() {
            if c <= prev {
                c = region[region.len() / 2] as f64;
                if c <= prev {
                    return Err(Error::degenerate(alloc::format!(
                        "quantile regions {} and {j} collapse to the same center",
                        j - 1
                    )));
                }
            }
        }
        centers.push(c);
    }
    let counts = starts.windows(2).map(|w| w[1] - w[0]).collect();
    Ok((centers, counts))
}

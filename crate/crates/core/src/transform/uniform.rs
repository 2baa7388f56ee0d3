use alloc::vec::Vec;

use super::{check_levels, quantile_sorted, round_f32, sorted_values, FitMode, TransformCodebook};
use crate::error::{Error, Result};
use crate::tensor::FeatureTensor;

/// Uniform grid over the `[truncate_pct, 1 − truncate_pct]` quantile range.
///
/// Values outside the range fall into the two edge regions.
pub fn fit_uniform(data: &FeatureTensor, levels: u32, truncate_pct: f64) -> Result<TransformCodebook> {
    check_levels(levels)?;
    if !(0.0..0.5).contains(&truncate_pct) {
        return Err(Error::param("truncate_pct must lie in [0, 0.5)"));
    }
    let sorted = sorted_values(data);
    let lo = quantile_sorted(&sorted, truncate_pct);
    let hi = quantile_sorted(&sorted, 1.0 - truncate_pct);
    if lo >= hi {
        return Err(Error::degenerate(alloc::format!("uniform range collapses to {lo}")));
    }
    let step = (hi - lo) / levels as f64;
    let centers: Vec<f64> = (0..levels).map(|i| round_f32(lo + (i as f64 + 0.5) * step)).collect();
    if centers.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::degenerate("uniform grid is finer than f32 resolution"));
    }
    TransformCodebook::new(centers, FitMode::Uniform, 0, data.source_tag())
}

//! Non-uniform scalar transform from real feature values onto a fixed
//! symbol alphabet `{0, …, L−1}`, and back.
//!
//! A [`TransformCodebook`] stores `L` strictly increasing reconstruction
//! values. Region boundaries are the midpoints between neighbouring centers,
//! so the forward map is plain nearest-center assignment and the inverse map
//! is a table lookup. Every fit routine rounds its centers to `f32`, which
//! makes the inverse transform exact in the tensor's native precision.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::tensor::{FeatureTensor, SymbolPlane};

mod equal_freq;
mod lloyd;
mod optimal;
mod serial;
mod uniform;

pub use equal_freq::{fit_equal_frequency, fit_equal_frequency_regions};
pub use lloyd::{fit_lloyd_max, FitReport, LloydParams};
pub use optimal::{fit_optimal_dp, MAX_DP_ELEMENTS, MAX_DP_LEVELS};
pub use serial::{deserialize_codebook, serialize_codebook, CODEBOOK_MAGIC, CODEBOOK_VERSION};
pub use uniform::fit_uniform;

pub const MIN_LEVELS: u32 = 2;
pub const MAX_LEVELS: u32 = 65_536;
pub const DEFAULT_LEVELS: u32 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitMode {
    LloydMax,
    EqualFreq,
    Uniform,
}

impl FitMode {
    pub const ALL: [FitMode; 3] = [FitMode::LloydMax, FitMode::EqualFreq, FitMode::Uniform];

    pub fn name(self) -> &'static str {
        match self {
            FitMode::LloydMax => "lloyd-max",
            FitMode::EqualFreq => "equal-freq",
            FitMode::Uniform => "uniform",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "lloyd-max" => Ok(FitMode::LloydMax),
            "equal-freq" => Ok(FitMode::EqualFreq),
            "uniform" => Ok(FitMode::Uniform),
            other => Err(Error::param(alloc::format!("unknown fit mode '{other}'"))),
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            FitMode::LloydMax => 0,
            FitMode::EqualFreq => 1,
            FitMode::Uniform => 2,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(FitMode::LloydMax),
            1 => Some(FitMode::EqualFreq),
            2 => Some(FitMode::Uniform),
            _ => None,
        }
    }
}

impl fmt::Display for FitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sorted reconstruction values plus the derived midpoint boundaries.
///
/// `source_tag` is descriptive only: it is not serialized and does not take
/// part in equality.
#[derive(Debug, Clone)]
pub struct TransformCodebook {
    centers: Vec<f64>,
    boundaries: Vec<f64>,
    mode: FitMode,
    fit_seed: u64,
    source_tag: String,
}

impl TransformCodebook {
    pub fn new(centers: Vec<f64>, mode: FitMode, fit_seed: u64, source_tag: impl Into<String>) -> Result<Self> {
        let levels = centers.len();
        if levels < MIN_LEVELS as usize || levels > MAX_LEVELS as usize {
            return Err(Error::param(alloc::format!(
                "levels must be in [{MIN_LEVELS}, {MAX_LEVELS}], got {levels}"
            )));
        }
        if centers.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("codebook centers must be finite"));
        }
        if centers.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("codebook centers must be strictly increasing"));
        }
        let boundaries = centers.windows(2).map(|w| midpoint(w[0], w[1])).collect();
        Ok(Self { centers, boundaries, mode, fit_seed, source_tag: source_tag.into() })
    }

    pub fn levels(&self) -> u32 {
        self.centers.len() as u32
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    /// Interior boundaries `b_0 … b_{L−2}`; the outer regions are unbounded.
    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn mode(&self) -> FitMode {
        self.mode
    }

    pub fn fit_seed(&self) -> u64 {
        self.fit_seed
    }

    pub fn source_tag(&self) -> &str {
        &self.source_tag
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.source_tag = tag.into();
        self
    }

    /// Nearest center index for `value`; a value exactly on a boundary goes to
    /// the lower index.
    pub fn symbol_of(&self, value: f32) -> u32 {
        let x = value as f64;
        self.boundaries.partition_point(|&b| b < x) as u32
    }

    pub fn center(&self, symbol: u32) -> f64 {
        self.centers[symbol as usize]
    }
}

impl PartialEq for TransformCodebook {
    fn eq(&self, other: &Self) -> bool {
        self.mode == other.mode
            && self.fit_seed == other.fit_seed
            && self.centers.len() == other.centers.len()
            && self.centers.iter().zip(&other.centers).all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

pub fn forward_transform(data: &FeatureTensor, cb: &TransformCodebook) -> SymbolPlane {
    let symbols = data.values().iter().map(|&v| cb.symbol_of(v)).collect();
    SymbolPlane::from_parts_unchecked(data.shape().to_vec(), symbols, cb.levels())
}

pub fn inverse_transform(plane: &SymbolPlane, cb: &TransformCodebook) -> Result<FeatureTensor> {
    if plane.levels() != cb.levels() {
        return Err(Error::LevelMismatch { expected: cb.levels(), found: plane.levels() });
    }
    if plane.is_empty() {
        return Err(Error::param("cannot reconstruct a tensor from an empty symbol plane"));
    }
    let values = plane.symbols().iter().map(|&s| cb.center(s) as f32).collect();
    FeatureTensor::new(plane.shape().to_vec(), values, "reconstructed")
}

/// Mean squared transformation distortion, normalised per element.
pub fn transform_distortion(data: &FeatureTensor, cb: &TransformCodebook) -> f64 {
    let sum: f64 = data
        .values()
        .iter()
        .map(|&v| {
            let d = v as f64 - cb.center(cb.symbol_of(v));
            d * d
        })
        .sum();
    sum / data.len() as f64
}

/// Mean squared error between two tensors of identical shape.
pub fn mse(original: &FeatureTensor, reconstructed: &FeatureTensor) -> Result<f64> {
    if original.shape() != reconstructed.shape() {
        return Err(Error::param("mse requires tensors of identical shape"));
    }
    let sum: f64 = original
        .values()
        .iter()
        .zip(reconstructed.values())
        .map(|(&a, &b)| {
            let d = a as f64 - b as f64;
            d * d
        })
        .sum();
    Ok(sum / original.len() as f64)
}

pub(crate) fn check_levels(levels: u32) -> Result<()> {
    if !(MIN_LEVELS..=MAX_LEVELS).contains(&levels) {
        return Err(Error::param(alloc::format!(
            "levels must be in [{MIN_LEVELS}, {MAX_LEVELS}], got {levels}"
        )));
    }
    Ok(())
}

pub(crate) fn sorted_values(data: &FeatureTensor) -> Vec<f32> {
    let mut xs = data.values().to_vec();
    xs.sort_unstable_by(f32::total_cmp);
    xs
}

pub(crate) fn distinct_count(sorted: &[f32]) -> usize {
    if sorted.is_empty() {
        return 0;
    }
    1 + sorted.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Empirical quantile by linear interpolation between order statistics,
/// placing the i-th order statistic at probability `(i + 0.5) / n`.
pub(crate) fn quantile_sorted(sorted: &[f32], p: f64) -> f64 {
    let n = sorted.len();
    let pos = (p * n as f64 - 0.5).clamp(0.0, (n - 1) as f64);
    let i = pos as usize;
    let frac = pos - i as f64;
    let lo = sorted[i] as f64;
    if i + 1 >= n || frac == 0.0 {
        lo
    } else {
        lo + frac * (sorted[i + 1] as f64 - lo)
    }
}

/// Region boundary between two neighbouring centers. For `f32`-valued
/// centers the sum is exact in `f64`, so comparing an `f32` sample against it
/// is an exact nearest-center test.
pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    (lo + hi) * 0.5
}

pub(crate) fn round_f32(x: f64) -> f64 {
    x as f32 as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn cb(centers: &[f64]) -> TransformCodebook {
        TransformCodebook::new(centers.to_vec(), FitMode::LloydMax, 0, "t").unwrap()
    }

    #[test]
    fn nearest_center_with_lower_tie() {
        let c = cb(&[0.0, 10.0]);
        assert_eq!(c.symbol_of(4.0), 0);
        assert_eq!(c.symbol_of(6.0), 1);
        assert_eq!(c.symbol_of(5.0), 0);
        assert_eq!(c.symbol_of(-1e30), 0);
        assert_eq!(c.symbol_of(1e30), 1);
    }

    #[test]
    fn inverse_is_table_lookup() {
        let c = cb(&[2.5, 7.0]);
        let plane = SymbolPlane::new(vec![3], vec![0, 1, 1], 2).unwrap();
        let t = inverse_transform(&plane, &c).unwrap();
        assert_eq!(t.values(), &[2.5, 7.0, 7.0]);
        let other = SymbolPlane::new(vec![1], vec![0], 3).unwrap();
        assert_eq!(inverse_transform(&other, &c).unwrap_err().kind(), "level-mismatch");
    }

    #[test]
    fn centers_are_fixed_points() {
        let c = cb(&[-3.0, -0.5, 0.25, 8.0]);
        let data = FeatureTensor::from_vec(vec![-3.0, -0.5, 0.25, 8.0], "d").unwrap();
        let back = inverse_transform(&forward_transform(&data, &c), &c).unwrap();
        assert_eq!(back.values(), data.values());
        assert_eq!(transform_distortion(&data, &c), 0.0);
    }

    #[test]
    fn hand_computed_distortion() {
        let data = FeatureTensor::from_vec(vec![1.0, 2.0, 3.0, 4.0], "d").unwrap();
        assert_eq!(transform_distortion(&data, &cb(&[1.5, 3.5])), 0.25);
    }

    #[test]
    fn construction_rejects_bad_centers() {
        assert!(TransformCodebook::new(vec![1.0, 1.0], FitMode::Uniform, 0, "").is_err());
        assert!(TransformCodebook::new(vec![2.0, 1.0], FitMode::Uniform, 0, "").is_err());
        assert!(TransformCodebook::new(vec![1.0], FitMode::Uniform, 0, "").is_err());
        assert!(TransformCodebook::new(vec![0.0, f64::NAN], FitMode::Uniform, 0, "").is_err());
    }

    #[test]
    fn hazen_quantiles() {
        let xs = [-100.0f32, 0.0, 0.0, 0.0, 0.0, 100.0];
        assert!((quantile_sorted(&xs, 0.2) - -30.0).abs() < 1e-12);
        assert!((quantile_sorted(&xs, 0.8) - 30.0).abs() < 1e-12);
        assert_eq!(quantile_sorted(&xs, 0.0), -100.0);
        assert_eq!(quantile_sorted(&xs, 1.0), 100.0);
    }
}

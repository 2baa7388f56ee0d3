//! Distribution diagnostics: histograms, empirical CDFs, entropy, KL
//! divergence, codebook interval widths and cross-source alignment.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tensor::{FeatureTensor, SymbolPlane};
use crate::transform::TransformCodebook;

/// Default additive smoothing for [`kl_divergence`], in count units.
pub const DEFAULT_KL_EPSILON: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    edges: Vec<f64>,
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    pub fn from_counts(edges: Vec<f64>, counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() || edges.len() != counts.len() + 1 {
            return Err(Error::param("histogram needs B >= 1 counts and B + 1 edges"));
        }
        if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("histogram edges must be finite and strictly increasing"));
        }
        let total = counts.iter().sum();
        Ok(Self { edges, counts, total })
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// Bin index for `x`, or `None` outside `[edges[0], edges[B]]`.
    pub fn bin_of(&self, x: f64) -> Option<usize> {
        let (lo, hi) = (self.edges[0], self.edges[self.bins()]);
        if !(lo..=hi).contains(&x) {
            return None;
        }
        let b = self.bins();
        let mut idx = (((x - lo) / (hi - lo)) * b as f64) as usize;
        idx = idx.min(b - 1);
        while idx > 0 && x < self.edges[idx] {
            idx -= 1;
        }
        while idx + 1 < b && x >= self.edges[idx + 1] {
            idx += 1;
        }
        Some(idx)
    }
}

fn uniform_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let mut edges: Vec<f64> = (0..=bins).map(|i| lo + (hi - lo) * (i as f64 / bins as f64)).collect();
    edges[bins] = hi;
    edges
}

/// Equal-width histogram. Bins are half-open except the last, which is
/// closed on the right; values outside an explicit range are not counted.
pub fn histogram(data: &FeatureTensor, bins: usize, range: Option<(f64, f64)>) -> Result<Histogram> {
    if bins < 2 {
        return Err(Error::param("histogram needs at least 2 bins"));
    }
    let (lo, hi) = match range {
        Some((lo, hi)) => {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::param("histogram range requires finite lo < hi"));
            }
            (lo, hi)
        }
        None => {
            let (min, max) = min_max(data.values());
            if min == max {
                return Err(Error::degenerate("all values are equal; give an explicit range"));
            }
            let pad = (max - min) * 1e-9;
            (min - pad, max + pad)
        }
    };
    let mut hist = Histogram::from_counts(uniform_edges(lo, hi, bins), vec![0; bins])?;
    for &v in data.values() {
        if let Some(b) = hist.bin_of(v as f64) {
            hist.counts[b] += 1;
        }
    }
    hist.total = hist.counts.iter().sum();
    Ok(hist)
}

/// Histogram of symbols with one unit-width bin per level, centered on the
/// integers `0..levels`.
pub fn symbol_histogram(plane: &SymbolPlane) -> Histogram {
    let levels = plane.levels() as usize;
    let edges = (0..=levels).map(|i| i as f64 - 0.5).collect();
    let mut counts = vec![0u64; levels];
    for &s in plane.symbols() {
        counts[s as usize] += 1;
    }
    let total = counts.iter().sum();
    Histogram { edges, counts, total }
}

pub(crate) fn min_max(values: &[f32]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v as f64), hi.max(v as f64))
    })
}

pub fn empirical_cdf(hist: &Histogram) -> Result<Vec<f64>> {
    if hist.total == 0 {
        return Err(Error::EmptyHistogram);
    }
    let total = hist.total as f64;
    let mut acc = 0u64;
    Ok(hist
        .counts
        .iter()
        .map(|&c| {
            acc += c;
            acc as f64 / total
        })
        .collect())
}

/// Shannon entropy of the bin distribution, in bits.
pub fn shannon_entropy(hist: &Histogram) -> Result<f64> {
    if hist.total == 0 {
        return Err(Error::EmptyHistogram);
    }
    let total = hist.total as f64;
    let h: f64 = hist
        .counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * libm::log2(p)
        })
        .sum();
    Ok(h.max(0.0))
}

/// `D(p‖q)` in nats after adding `epsilon` to every bin of both histograms
/// and renormalising.
pub fn kl_divergence(p: &Histogram, q: &Histogram, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::param("epsilon must be positive"));
    }
    if p.edges.len() != q.edges.len() || p.edges.iter().zip(&q.edges).any(|(a, b)| a.to_bits() != b.to_bits()) {
        return Err(Error::EdgeMismatch);
    }
    if p.total == 0 || q.total == 0 {
        return Err(Error::EmptyHistogram);
    }
    let bins = p.bins() as f64;
    let pz = p.total as f64 + bins * epsilon;
    let qz = q.total as f64 + bins * epsilon;
    let d: f64 = p
        .counts
        .iter()
        .zip(&q.counts)
        .map(|(&pc, &qc)| {
            let ph = (pc as f64 + epsilon) / pz;
            let qh = (qc as f64 + epsilon) / qz;
            ph * libm::log(ph / qh)
        })
        .sum();
    Ok(d.max(0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalWidth {
    pub region: u32,
    pub width: f64,
    pub log10_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalWidthReport {
    pub widths: Vec<IntervalWidth>,
    pub mean_width: f64,
}

/// Widths of the bounded interior regions `1..=L−2` of a codebook.
pub fn interval_width_report(cb: &TransformCodebook) -> Result<IntervalWidthReport> {
    let levels = cb.levels();
    if levels < 3 {
        return Err(Error::TooFewLevels(levels));
    }
    let b = cb.boundaries();
    let widths: Vec<IntervalWidth> = (1..levels as usize - 1)
        .map(|k| {
            let width = b[k] - b[k - 1];
            IntervalWidth { region: k as u32, width, log10_width: libm::log10(width) }
        })
        .collect();
    let mean_width = widths.iter().map(|w| w.width).sum::<f64>() / widths.len() as f64;
    Ok(IntervalWidthReport { widths, mean_width })
}

/// Square matrix of pairwise KL divergences; `kl[i][j] = D(source_i ‖ source_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentMatrix {
    pub labels: Vec<String>,
    pub kl: Vec<Vec<f64>>,
}

pub fn alignment_matrix(sources: &[(String, Histogram)], epsilon: f64) -> Result<AlignmentMatrix> {
    if sources.len() < 2 {
        return Err(Error::param("alignment matrix needs at least 2 sources"));
    }
    let n = sources.len();
    let mut kl = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                kl[i][j] = kl_divergence(&sources[i].1, &sources[j].1, epsilon)?;
            }
        }
    }
    Ok(AlignmentMatrix { labels: sources.iter().map(|(t, _)| t.clone()).collect(), kl })
}

/// Union of the per-source `[min, max]` ranges, for shared-support histograms.
pub fn shared_range(tensors: &[&FeatureTensor]) -> Result<(f64, f64)> {
    let (lo, hi) = tensors.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
        let (a, b) = min_max(t.values());
        (lo.min(a), hi.max(b))
    });
    if !(lo < hi) {
        return Err(Error::degenerate("sources span a single value"));
    }
    let pad = (hi - lo) * 1e-9;
    Ok((lo - pad, hi + pad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::FitMode;

    fn hist_from(counts: &[u64]) -> Histogram {
        let edges = (0..=counts.len()).map(|i| i as f64).collect();
        Histogram::from_counts(edges, counts.to_vec()).unwrap()
    }

    #[test]
    fn last_bin_is_right_closed() {
        let data = FeatureTensor::from_vec(vec![0.0, 0.5, 1.0], "d").unwrap();
        let h = histogram(&data, 2, Some((0.0, 1.0))).unwrap();
        assert_eq!(h.counts(), &[1, 2]);
        assert_eq!(h.total(), 3);
    }

    #[test]
    fn constant_data_needs_range() {
        let data = FeatureTensor::from_vec(vec![3.0; 3], "d").unwrap();
        assert_eq!(histogram(&data, 4, None).unwrap_err().kind(), "degenerate-input");
        assert_eq!(histogram(&data, 4, Some((0.0, 4.0))).unwrap().counts(), &[0, 0, 0, 3]);
        assert!(histogram(&data, 1, Some((0.0, 4.0))).is_err());
    }

    #[test]
    fn cdf_of_small_histogram() {
        assert_eq!(empirical_cdf(&hist_from(&[1, 2, 1])).unwrap(), vec![0.25, 0.75, 1.0]);
        assert_eq!(empirical_cdf(&hist_from(&[0, 0])).unwrap_err(), Error::EmptyHistogram);
    }

    #[test]
    fn entropy_values() {
        assert_eq!(shannon_entropy(&hist_from(&[0, 9, 0])).unwrap(), 0.0);
        assert!((shannon_entropy(&hist_from(&[5; 256])).unwrap() - 8.0).abs() < 1e-12);
        let h = shannon_entropy(&hist_from(&[3, 1])).unwrap();
        // -(3/4 log2 3/4 + 1/4 log2 1/4)
        assert!((h - 0.811_278_124_459_132_8).abs() < 1e-12);
        assert!(shannon_entropy(&hist_from(&[0, 0])).is_err());
    }

    #[test]
    fn kl_values() {
        let p = hist_from(&[3, 1]);
        let q = hist_from(&[1, 3]);
        assert_eq!(kl_divergence(&p, &p, DEFAULT_KL_EPSILON).unwrap(), 0.0);
        let d = kl_divergence(&p, &q, DEFAULT_KL_EPSILON).unwrap();
        assert!((d - 0.5 * libm::log(3.0)).abs() < 1e-3);

        let eps = 1e-10;
        let a = hist_from(&[1, 0]);
        let b = hist_from(&[0, 1]);
        let z: f64 = 1.0 + 2.0 * eps;
        let (big, small) = ((1.0 + eps) / z, eps / z);
        let expected = big * libm::log(big / small) + small * libm::log(small / big);
        let d = kl_divergence(&a, &b, eps).unwrap();
        assert!(d.is_finite() && d > 20.0);
        assert!((d - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn kl_errors() {
        let p = hist_from(&[1, 1]);
        let shifted = Histogram::from_counts(vec![0.0, 1.0, 2.5], vec![1, 1]).unwrap();
        assert_eq!(kl_divergence(&p, &shifted, 1e-10).unwrap_err(), Error::EdgeMismatch);
        assert_eq!(kl_divergence(&p, &hist_from(&[0, 0]), 1e-10).unwrap_err(), Error::EmptyHistogram);
        assert!(kl_divergence(&p, &p, 0.0).is_err());
    }

    #[test]
    fn interval_widths_of_uniform_grid() {
        let cb = TransformCodebook::new(vec![0.0, 1.0, 2.0, 3.0], FitMode::Uniform, 0, "").unwrap();
        let r = interval_width_report(&cb).unwrap();
        assert_eq!(r.widths.len(), 2);
        assert_eq!(r.widths[0], IntervalWidth { region: 1, width: 1.0, log10_width: 0.0 });
        assert_eq!(r.widths[1].region, 2);
        assert_eq!(r.mean_width, 1.0);
        let two = TransformCodebook::new(vec![0.0, 1.0], FitMode::Uniform, 0, "").unwrap();
        assert_eq!(interval_width_report(&two).unwrap_err(), Error::TooFewLevels(2));
    }

    #[test]
    fn identical_sources_align_perfectly() {
        let h = hist_from(&[4, 2, 7]);
        let m = alignment_matrix(&[("a".into(), h.clone()), ("b".into(), h)], DEFAULT_KL_EPSILON).unwrap();
        assert_eq!(m.kl, vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
        assert!(alignment_matrix(&[("a".into(), hist_from(&[1]))], 1e-10).is_err());
    }
}

//! End-to-end experiments: fit a codebook, transform, entropy-code, decode,
//! reconstruct, and score rate (bits per feature point) against MSE.

use alloc::string::String;
use alloc::vec::Vec;

use crate::codec::{bpfp, decode, encode};
use crate::error::{Error, Result};
use crate::synth::sample_fit_indices;
use crate::tensor::FeatureTensor;
use crate::transform::{
    fit_equal_frequency, fit_lloyd_max, fit_uniform, forward_transform, inverse_transform, mse, FitMode,
    FitReport, LloydParams, TransformCodebook,
};

/// Quantile clipped from each tail by the uniform baseline unless overridden.
pub const DEFAULT_TRUNCATE_PCT: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub restarts: u32,
    pub tol: f64,
    pub max_iters: u32,
    pub truncate_pct: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        let lloyd = LloydParams::default();
        Self {
            restarts: lloyd.restarts,
            tol: lloyd.tol,
            max_iters: lloyd.max_iters,
            truncate_pct: DEFAULT_TRUNCATE_PCT,
        }
    }
}

/// Fits a codebook in any mode; the report is only produced by Lloyd-Max.
pub fn fit_codebook(
    data: &FeatureTensor,
    mode: FitMode,
    levels: u32,
    seed: u64,
    opts: &FitOptions,
) -> Result<(TransformCodebook, Option<FitReport>)> {
    match mode {
        FitMode::LloydMax => {
            let params = LloydParams {
                levels,
                seed,
                restarts: opts.restarts,
                tol: opts.tol,
                max_iters: opts.max_iters,
            };
            let (cb, report) = fit_lloyd_max(data, &params)?;
            Ok((cb, Some(report)))
        }
        FitMode::EqualFreq => Ok((fit_equal_frequency(data, levels)?, None)),
        FitMode::Uniform => Ok((fit_uniform(data, levels, opts.truncate_pct)?, None)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RDPoint {
    pub mode: FitMode,
    pub levels: u32,
    pub bpfp: f64,
    pub mse: f64,
    pub source_tag: String,
    pub eval_tag: String,
    /// Fraction of the stream taken by framing and the embedded codebook.
    pub header_bits_share: f64,
}

/// Runs the coding pipeline on `eval` with an already fitted codebook.
pub fn evaluate_codebook(cb: &TransformCodebook, eval: &FeatureTensor) -> Result<RDPoint> {
    let plane = forward_transform(eval, cb);
    let stream = encode(&plane, cb)?;
    let (decoded, decoded_cb) = decode(&stream)?;
    if decoded != plane || decoded_cb != *cb {
        return Err(Error::corrupt("decoded stream differs from the encoded symbols"));
    }
    let recon = inverse_transform(&decoded, &decoded_cb)?;
    let mse = mse(eval, &recon)?;
    let rate = bpfp(&stream, eval.len())?;
    let header_bits_share = stream.header_bits()? as f64 / stream.total_bits() as f64;
    Ok(RDPoint {
        mode: cb.mode(),
        levels: cb.levels(),
        bpfp: rate,
        mse,
        source_tag: String::from(cb.source_tag()),
        eval_tag: String::from(eval.source_tag()),
        header_bits_share,
    })
}

pub fn run_point(
    fit_data: &FeatureTensor,
    eval_data: &FeatureTensor,
    mode: FitMode,
    levels: u32,
    seed: u64,
    opts: &FitOptions,
) -> Result<RDPoint> {
    let (cb, _) = fit_codebook(fit_data, mode, levels, seed, opts)?;
    evaluate_codebook(&cb, eval_data)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub levels_list: Vec<u32>,
    pub fit_mode: FitMode,
    pub fit_source: FeatureTensor,
    pub eval_source: FeatureTensor,
    pub seed: u64,
    pub options: FitOptions,
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<RDPoint>> {
    if spec.levels_list.is_empty() {
        return Err(Error::param("sweep needs at least one level count"));
    }
    if spec.levels_list[0] < 2 || spec.levels_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("levels_list must be strictly increasing and start at >= 2"));
    }
    spec.levels_list
        .iter()
        .map(|&levels| {
            run_point(&spec.fit_source, &spec.eval_source, spec.fit_mode, levels, spec.seed, &spec.options)
        })
        .collect()
}

/// Fit and evaluation data for one source in a cross-distribution run.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub tag: String,
    pub fit: FeatureTensor,
    pub eval: FeatureTensor,
}

impl Dataset {
    /// Fits and evaluates on the same tensor.
    pub fn self_fit(tensor: FeatureTensor) -> Self {
        let tag = String::from(tensor.source_tag());
        Self { tag, fit: tensor.clone(), eval: tensor }
    }

    /// Draws `k` tensors for fitting and pools the rest as held-out evaluation data.
    pub fn split(tag: impl Into<String>, tensors: &[FeatureTensor], k: usize, seed: u64) -> Result<Self> {
        if k >= tensors.len() {
            return Err(Error::param("held-out split needs more tensors than the fit-set size"));
        }
        let tag = tag.into();
        let picked = sample_fit_indices(tensors.len(), k, seed)?;
        let mut in_fit = alloc::vec![false; tensors.len()];
        picked.iter().for_each(|&i| in_fit[i] = true);
        let fit: Vec<FeatureTensor> = picked.iter().map(|&i| tensors[i].clone()).collect();
        let eval: Vec<FeatureTensor> = tensors
            .iter()
            .zip(&in_fit)
            .filter(|(_, &f)| !f)
            .map(|(t, _)| t.clone())
            .collect();
        Ok(Self {
            fit: FeatureTensor::pool(&fit, tag.clone())?,
            eval: FeatureTensor::pool(&eval, tag.clone())?,
            tag,
        })
    }
}

/// `matrix[i][j]` codes source `j`'s evaluation data with the codebook fit on
/// source `i`.
pub fn run_cross_matrix(
    sources: &[Dataset],
    mode: FitMode,
    levels: u32,
    seed: u64,
    opts: &FitOptions,
) -> Result<Vec<Vec<RDPoint>>> {
    if sources.len() < 2 {
        return Err(Error::param("cross matrix needs at least 2 sources"));
    }
    let codebooks: Vec<TransformCodebook> = sources
        .iter()
        .map(|s| fit_codebook(&s.fit, mode, levels, seed, opts).map(|(cb, _)| cb.with_tag(s.tag.clone())))
        .collect::<Result<_>>()?;
    codebooks
        .iter()
        .map(|cb| {
            sources
                .iter()
                .map(|s| {
                    let eval = s.eval.clone().with_tag(s.tag.clone());
                    evaluate_codebook(cb, &eval)
                })
                .collect()
        })
        .collect()
}

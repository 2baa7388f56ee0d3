//! Seeded synthetic feature sources and fit-set sampling.
//!
//! The three families stand in for real model dumps: a peaky mixture with
//! most mass in a narrow central spike, a Laplace heavy tail, and a flat
//! uniform source. All sampling goes through ChaCha8 and `libm`, so a given
//! `(spec, count)` yields the same bits on every platform.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::index;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tensor::FeatureTensor;

/// Number of tensors drawn for fitting when the caller does not say otherwise.
pub const DEFAULT_FIT_SET_SIZE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SourceKind {
    /// Gaussian mixture; the first component is treated as the central spike.
    PeakyMixture(Vec<MixtureComponent>),
    /// Zero-mean Laplace with the given scale.
    HeavyTail { scale: f64 },
    NearUniform { low: f64, high: f64 },
}

impl SourceKind {
    pub fn default_peaky() -> Self {
        SourceKind::PeakyMixture(alloc::vec![
            MixtureComponent { weight: 0.94, mean: 0.0, scale: 0.02 },
            MixtureComponent { weight: 0.05, mean: 0.0, scale: 0.25 },
            MixtureComponent { weight: 0.01, mean: 1.5, scale: 0.5 },
        ])
    }

    pub fn default_heavy_tail() -> Self {
        SourceKind::HeavyTail { scale: 0.1 }
    }

    pub fn default_near_uniform() -> Self {
        SourceKind::NearUniform { low: -1.0, high: 1.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SourceKind::PeakyMixture(_) => "peaky-mixture",
            SourceKind::HeavyTail { .. } => "heavy-tail",
            SourceKind::NearUniform { .. } => "near-uniform",
        }
    }

    /// Default-parameter source for a kind name.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "peaky-mixture" | "peaky" => Ok(Self::default_peaky()),
            "heavy-tail" => Ok(Self::default_heavy_tail()),
            "near-uniform" | "uniform" => Ok(Self::default_near_uniform()),
            other => Err(Error::param(format!("unknown source kind '{other}'"))),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SourceKind::PeakyMixture(components) => {
                if components.is_empty() {
                    return Err(Error::param("mixture needs at least one component"));
                }
                let mut total = 0.0;
                for c in components {
                    if !(c.weight > 0.0 && c.weight.is_finite()) {
                        return Err(Error::param("mixture weights must be positive"));
                    }
                    if !(c.scale > 0.0 && c.scale.is_finite()) || !c.mean.is_finite() {
                        return Err(Error::param("mixture means must be finite and scales positive"));
                    }
                    total += c.weight;
                }
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::param(format!("mixture weights sum to {total}, not 1")));
                }
            }
            SourceKind::HeavyTail { scale } => {
                if !(*scale > 0.0 && scale.is_finite()) {
                    return Err(Error::param("heavy-tail scale must be positive"));
                }
            }
            SourceKind::NearUniform { low, high } => {
                if !(low.is_finite() && high.is_finite() && low < high) {
                    return Err(Error::param("near-uniform requires finite low < high"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSourceSpec {
    pub kind: SourceKind,
    pub seed: u64,
}

impl SyntheticSourceSpec {
    pub fn new(kind: SourceKind, seed: u64) -> Self {
        Self { kind, seed }
    }

    pub fn tag(&self) -> String {
        format!("synthetic-{}", self.kind.name())
    }
}

/// Uniform draw in the open interval (0, 1).
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = open_unit(rng);
    let u2 = open_unit(rng);
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2)
}

/// Draws `count` samples from `spec` into a tensor of shape `[count]`.
pub fn generate(spec: &SyntheticSourceSpec, count: usize) -> Result<FeatureTensor> {
    if count == 0 {
        return Err(Error::param("count must be >= 1"));
    }
    spec.kind.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut values = Vec::with_capacity(count);
    match &spec.kind {
        SourceKind::PeakyMixture(components) => {
            let mut cumulative = Vec::with_capacity(components.len());
            let mut acc = 0.0;
            for c in components {
                acc += c.weight;
                cumulative.push(acc);
            }
            for _ in 0..count {
                let u = open_unit(&mut rng) * acc;
                let idx = cumulative.iter().position(|&c| u < c).unwrap_or(components.len() - 1);
                let c = &components[idx];
                values.push((c.mean + c.scale * standard_normal(&mut rng)) as f32);
            }
        }
        SourceKind::HeavyTail { scale } => {
            for _ in 0..count {
                let u = open_unit(&mut rng) - 0.5;
                let mag = -scale * libm::log(1.0 - 2.0 * u.abs());
                values.push(if u < 0.0 { -mag } else { mag } as f32);
            }
        }
        SourceKind::NearUniform { low, high } => {
            let (lo32, hi32) = (*low as f32, *high as f32);
            for _ in 0..count {
                let v = (low + (high - low) * open_unit(&mut rng)) as f32;
                values.push(v.clamp(lo32, hi32));
            }
        }
    }
    FeatureTensor::from_vec(values, spec.tag())
}

/// Picks `k` distinct tensors uniformly without replacement.
pub fn sample_fit_set(tensors: &[FeatureTensor], k: usize, seed: u64) -> Result<Vec<FeatureTensor>> {
    Ok(sample_fit_indices(tensors.len(), k, seed)?
        .into_iter()
        .map(|i| tensors[i].clone())
        .collect())
}

/// Index form of [`sample_fit_set`]; the selection order is part of the result.
pub fn sample_fit_indices(available: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if available == 0 {
        return Err(Error::param("no tensors to sample from"));
    }
    if k == 0 {
        return Err(Error::param("fit-set size must be >= 1"));
    }
    if k > available {
        return Err(Error::param(format!("fit-set size {k} exceeds {available} available tensors")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(index::sample(&mut rng, available, k).into_vec())
}

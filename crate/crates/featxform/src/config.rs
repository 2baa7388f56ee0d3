//! Sweep configuration files.
//!
//! ```toml
//! fit = ["train.npy"]
//! eval = ["test.npy"]        # optional, defaults to the fit files
//! modes = ["lloyd-max", "uniform"]
//! levels = [2, 4, 8, 16, 32, 64, 128, 256]
//! seed = 0
//! restarts = 10
//! ```
//!
//! Relative paths are resolved against the directory holding the file.

use std::path::{Path, PathBuf};

use featxform_core::harness::FitOptions;
use featxform_core::FitMode;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::files::read_bytes;

pub const DEFAULT_SWEEP_LEVELS: [u32; 8] = [2, 4, 8, 16, 32, 64, 128, 256];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    fit: Vec<PathBuf>,
    #[serde(default)]
    eval: Vec<PathBuf>,
    #[serde(default)]
    modes: Option<Vec<String>>,
    #[serde(default)]
    levels: Option<Vec<u32>>,
    seed: Option<u64>,
    restarts: Option<u32>,
    tol: Option<f64>,
    max_iters: Option<u32>,
    truncate_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub fit: Vec<PathBuf>,
    pub eval: Vec<PathBuf>,
    pub modes: Vec<FitMode>,
    pub levels: Vec<u32>,
    /// `None` defers to the command-line seed.
    pub seed: Option<u64>,
    pub options: FitOptions,
}

impl SweepConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = String::from_utf8(read_bytes(path)?)
            .map_err(|_| Error::Format(format!("{} is not utf-8", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let raw: Raw = toml::from_str(text).map_err(|e| Error::Format(format!("sweep config: {e}")))?;
        if raw.fit.is_empty() {
            return Err(Error::Param("sweep config needs at least one fit file".into()));
        }
        let resolve = |ps: Vec<PathBuf>| ps.into_iter().map(|p| base.join(p)).collect::<Vec<_>>();
        let fit = resolve(raw.fit);
        let eval = if raw.eval.is_empty() { fit.clone() } else { resolve(raw.eval) };
        let modes = match raw.modes {
            Some(names) => names.iter().map(|n| FitMode::from_name(n)).collect::<featxform_core::Result<_>>()?,
            None => vec![FitMode::LloydMax],
        };
        let d = FitOptions::default();
        Ok(Self {
            fit,
            eval,
            modes,
            levels: raw.levels.unwrap_or_else(|| DEFAULT_SWEEP_LEVELS.to_vec()),
            seed: raw.seed,
            options: FitOptions {
                restarts: raw.restarts.unwrap_or(d.restarts),
                tol: raw.tol.unwrap_or(d.tol),
                max_iters: raw.max_iters.unwrap_or(d.max_iters),
                truncate_pct: raw.truncate_pct.unwrap_or(d.truncate_pct),
            },
        })
    }
}

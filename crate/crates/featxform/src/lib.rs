//! File formats, reports and the command-line driver for `featxform-core`.
//!
//! * NPY v1.0 tensors (`<f4`, C order, rank 1 to 4)
//! * DTCB codebook and DTFC stream files
//! * RD, histogram, interval-width and KL tables as CSV, plots as SVG
//! * TOML sweep descriptions

pub mod cli;
pub mod config;
pub mod error;
pub mod files;
pub mod npy;
pub mod report;

pub use error::{Error, Result};

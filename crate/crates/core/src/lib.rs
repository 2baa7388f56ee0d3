//! Peaky-to-balanced feature transform and classical feature coding.
//!
//! Learns a non-uniform scalar transform that maps real-valued features onto
//! a fixed symbol alphabet (Lloyd-Max, equal-frequency or uniform fits),
//! entropy-codes the symbols with an adaptive range coder, and measures rate,
//! distortion and distribution alignment.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, reports and the
//! command-line driver live in the `featxform` crate.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod codec;
pub mod error;
pub mod harness;
pub mod synth;
pub mod tensor;
pub mod transform;

pub use error::{Error, Result};
pub use tensor::{FeatureTensor, SymbolPlane};
pub use transform::{FitMode, TransformCodebook};

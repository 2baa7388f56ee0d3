use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Dense row-major tensor of finite `f32` feature values.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTensor {
    shape: Vec<usize>,
    values: Vec<f32>,
    source_tag: String,
}

impl FeatureTensor {
    pub fn new(shape: Vec<usize>, values: Vec<f32>, source_tag: impl Into<String>) -> Result<Self> {
        if shape.is_empty() {
            return Err(Error::param("tensor shape must have at least one dimension"));
        }
        if shape.iter().any(|&d| d == 0) {
            return Err(Error::param("tensor dimensions must be >= 1"));
        }
        let expected = checked_product(&shape)
            .ok_or_else(|| Error::param("tensor shape overflows usize"))?;
        if expected != values.len() {
            return Err(Error::param(alloc::format!(
                "shape product {expected} does not match {} values",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(alloc::format!("non-finite value at index {i}")));
        }
        Ok(Self { shape, values, source_tag: source_tag.into() })
    }

    /// One-dimensional tensor of shape `[values.len()]`.
    pub fn from_vec(values: Vec<f32>, source_tag: impl Into<String>) -> Result<Self> {
        Self::new(alloc::vec![values.len()], values, source_tag)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false for a valid tensor; present for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn source_tag(&self) -> &str {
        &self.source_tag
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.source_tag = tag.into();
        self
    }

    pub fn into_values(self) -> Vec<f32> {
        self.values
    }

    /// Concatenates the scalar values of several tensors into one flat tensor.
    pub fn pool(tensors: &[FeatureTensor], tag: impl Into<String>) -> Result<Self> {
        if tensors.is_empty() {
            return Err(Error::param("cannot pool an empty tensor list"));
        }
        let values: Vec<f32> = tensors.iter().flat_map(|t| t.values.iter().copied()).collect();
        Self::from_vec(values, tag)
    }

    /// Splits along the leading axis into `shape[0]` sub-tensors.
    pub fn split_outer(&self) -> Vec<FeatureTensor> {
        let rows = self.shape[0];
        let inner: Vec<usize> = if self.shape.len() == 1 {
            alloc::vec![1]
        } else {
            self.shape[1..].to_vec()
        };
        let stride = self.values.len() / rows;
        self.values
            .chunks(stride)
            .map(|chunk| FeatureTensor {
                shape: inner.clone(),
                values: chunk.to_vec(),
                source_tag: self.source_tag.clone(),
            })
            .collect()
    }
}

/// Integer symbols in `[0, levels)` laid out with a source tensor's shape.
///
/// Unlike [`FeatureTensor`], a zero-sized dimension is allowed so that an empty
/// plane can travel through the codec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolPlane {
    shape: Vec<usize>,
    symbols: Vec<u32>,
    levels: u32,
}

impl SymbolPlane {
    pub fn new(shape: Vec<usize>, symbols: Vec<u32>, levels: u32) -> Result<Self> {
        if shape.is_empty() {
            return Err(Error::param("symbol plane shape must have at least one dimension"));
        }
        if levels < 2 {
            return Err(Error::param("symbol plane needs at least 2 levels"));
        }
        let expected = checked_product(&shape)
            .ok_or_else(|| Error::param("symbol plane shape overflows usize"))?;
        if expected != symbols.len() {
            return Err(Error::param(alloc::format!(
                "shape product {expected} does not match {} symbols",
                symbols.len()
            )));
        }
        if let Some(s) = symbols.iter().find(|&&s| s >= levels) {
            return Err(Error::param(alloc::format!("symbol {s} out of range for {levels} levels")));
        }
        Ok(Self { shape, symbols, levels })
    }

    pub(crate) fn from_parts_unchecked(shape: Vec<usize>, symbols: Vec<u32>, levels: u32) -> Self {
        debug_assert!(symbols.iter().all(|&s| s < levels));
        Self { shape, symbols, levels }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

pub(crate) fn checked_product(shape: &[usize]) -> Option<usize> {
    shape.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_shape_mismatch_and_non_finite() {
        assert!(FeatureTensor::new(vec![2, 3], vec![0.0; 5], "x").is_err());
        assert!(FeatureTensor::new(vec![], vec![], "x").is_err());
        assert!(FeatureTensor::new(vec![0], vec![], "x").is_err());
        let err = FeatureTensor::new(vec![2], vec![1.0, f32::NAN], "x").unwrap_err();
        assert_eq!(err.kind(), "data-error");
        assert!(FeatureTensor::new(vec![1], vec![f32::INFINITY], "x").is_err());
    }

    #[test]
    fn split_outer_rows() {
        let t = FeatureTensor::new(vec![2, 3], vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0], "x").unwrap();
        let rows = t.split_outer();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].values(), &[3.0, 4.0, 5.0]);
        assert_eq!(rows[1].shape(), &[3]);
    }

    #[test]
    fn symbol_plane_bounds() {
        assert!(SymbolPlane::new(vec![3], vec![0, 1, 2], 2).is_err());
        assert!(SymbolPlane::new(vec![0], vec![], 2).is_ok());
        assert!(SymbolPlane::new(vec![2], vec![0, 1], 1).is_err());
    }
}

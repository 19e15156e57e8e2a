//! Scalar fields: one finite real value per domain point.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite real value per domain point. Fields are plain value vectors; the
/// pairing with a [`crate::DiscreteDomain`] is checked where they meet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    /// Wraps a value vector, rejecting non-finite entries.
    pub fn from_vec(values: Vec<f64>) -> Result<Self> {
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
        }
        Ok(Self { values })
    }

    pub fn zeros(len: usize) -> Self {
        Self { values: vec![0.0; len] }
    }

    pub fn constant(len: usize, value: f64) -> Self {
        Self { values: vec![value; len] }
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> f64) -> Self {
        Self { values: (0..len).map(f).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied()
    }

    /// Pointwise sum with a constant.
    pub fn plus(&self, c: f64) -> Self {
        Self { values: self.values.iter().map(|v| v + c).collect() }
    }

    /// Pointwise multiple.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self { values: self.values.iter().map(|v| lambda * v).collect() }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Max-norm distance to another field of the same length.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Index and value of the minimum of `self[i] - other[i]`.
    pub fn min_difference(&self, other: &Self) -> (usize, f64) {
        debug_assert_eq!(self.len(), other.len());
        let mut arg = 0;
        let mut best = f64::INFINITY;
        for (i, (a, b)) in self.values.iter().zip(&other.values).enumerate() {
            let d = a - b;
            if d < best {
                best = d;
                arg = i;
            }
        }
        (arg, best)
    }

    /// Writes `index,value` rows. Values print in shortest round-trip form.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "index,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{i},{v}")?;
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for ScalarField {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

impl From<ScalarField> for Vec<f64> {
    fn from(f: ScalarField) -> Vec<f64> {
        f.values
    }
}

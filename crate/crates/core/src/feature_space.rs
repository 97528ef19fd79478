//! Finite-dimensional real feature spaces with a diagonal metric.
//!
//! Vectors are stored in raw coordinates. The orthonormal coordinates
//! `c_i = sqrt(w_i) * x_i` are the ones in which the Lebesgue measure, and
//! therefore every quadrature grid in this crate, is defined.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};

/// Real dimension of the scalar field. Only the real case is built.
pub const SCALAR_FIELD_DIM: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSpace {
    weights: Vec<f64>,
    sqrt_weights: Vec<f64>,
}

impl FeatureSpace {
    pub fn new(weights: Vec<f64>) -> Result<Arc<Self>> {
        if weights.is_empty() {
            return invalid("feature space must have positive dimension");
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return invalid(format!("metric weight {w} is not strictly positive"));
        }
        let sqrt_weights = weights.iter().map(|w| w.sqrt()).collect();
        Ok(Arc::new(Self {
            weights,
            sqrt_weights,
        }))
    }

    /// Weights `1/m` on every coordinate, the averaging inner product of the
    /// periodic-signal examples.
    pub fn uniform(dim: usize) -> Result<Arc<Self>> {
        Self::new(vec![1.0 / dim as f64; dim])
    }

    /// Plain Euclidean metric.
    pub fn unit(dim: usize) -> Result<Arc<Self>> {
        Self::new(vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sqrt_weights(&self) -> &[f64] {
        &self.sqrt_weights
    }

    pub fn zeros(self: &Arc<Self>) -> FeatureVec {
        FeatureVec {
            coords: vec![0.0; self.dim()],
            space: Arc::clone(self),
        }
    }

    pub fn vector(self: &Arc<Self>, coords: Vec<f64>) -> Result<FeatureVec> {
        FeatureVec::new(Arc::clone(self), coords)
    }

    /// Builds a vector from orthonormal coordinates.
    pub fn from_orthonormal(self: &Arc<Self>, c: &[f64]) -> Result<FeatureVec> {
        self.check_len(c.len())?;
        let coords = c
            .iter()
            .zip(&self.sqrt_weights)
            .map(|(ci, s)| ci / s)
            .collect();
        Ok(FeatureVec {
            coords,
            space: Arc::clone(self),
        })
    }

    /// Weighted inner product on raw coordinate slices.
    #[inline]
    pub fn inner_raw(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for ((w, a), b) in self.weights.iter().zip(x).zip(y) {
            acc += w * a * b;
        }
        acc
    }

    /// Raw coordinates from orthonormal ones, written into `out`.
    #[inline]
    pub fn orthonormal_to_raw_into(&self, c: &[f64], out: &mut [f64]) {
        for ((o, ci), s) in out.iter_mut().zip(c).zip(&self.sqrt_weights) {
            *o = ci / s;
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return invalid(format!(
                "dimension mismatch: expected {}, got {len}",
                self.dim()
            ));
        }
        Ok(())
    }
}

/// A vector of the feature space, in raw coordinates.
#[derive(Clone, PartialEq)]
pub struct FeatureVec {
    coords: Vec<f64>,
    space: Arc<FeatureSpace>,
}

impl fmt::Debug for FeatureVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("FeatureVec").field(&self.coords).finish()
    }
}

impl FeatureVec {
    pub fn new(space: Arc<FeatureSpace>, coords: Vec<f64>) -> Result<Self> {
        space.check_len(coords.len())?;
        Ok(Self { coords, space })
    }

    pub(crate) fn from_parts_unchecked(space: Arc<FeatureSpace>, coords: Vec<f64>) -> Self {
        debug_assert_eq!(space.dim(), coords.len());
        Self { coords, space }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn space(&self) -> &Arc<FeatureSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn inner(&self, other: &FeatureVec) -> Result<f64> {
        inner(self, other)
    }

    pub fn norm_sq(&self) -> f64 {
        self.space.inner_raw(&self.coords, &self.coords)
    }

    pub fn to_orthonormal(&self) -> Vec<f64> {
        self.coords
            .iter()
            .zip(self.space.sqrt_weights())
            .map(|(x, s)| s * x)
            .collect()
    }

    pub fn scaled(&self, alpha: f64) -> FeatureVec {
        FeatureVec {
            coords: self.coords.iter().map(|x| alpha * x).collect(),
            space: Arc::clone(&self.space),
        }
    }
}

fn same_space(a: &FeatureSpace, b: &FeatureSpace) -> bool {
    std::ptr::eq(a, b) || a.weights == b.weights
}

/// `<x, y> = sum_i w_i x_i y_i`.
pub fn inner(x: &FeatureVec, y: &FeatureVec) -> Result<f64> {
    if !same_space(&x.space, &y.space) {
        return invalid(format!(
            "vectors live in different spaces (dims {} and {})",
            x.dim(),
            y.dim()
        ));
    }
    Ok(x.space.inner_raw(&x.coords, &y.coords))
}

pub fn to_orthonormal(x: &FeatureVec) -> Vec<f64> {
    x.to_orthonormal()
}

pub fn from_orthonormal(space: &Arc<FeatureSpace>, c: &[f64]) -> Result<FeatureVec> {
    space.from_orthonormal(c)
}

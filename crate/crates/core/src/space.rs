//! Normed linear spaces over the real or complex field, and the problem
//! instances the rest of the crate consumes.
//!
//! Three concrete space families are supported: `l^p` on real `d`-vectors,
//! the complex plane under the modulus, and the real line under the absolute
//! value. Vectors are stored with complex coordinates throughout so that a
//! complex scalar sequence acting on a real vector sequence lands in the
//! complexification without a separate code path; purely real data keeps
//! exact zero imaginary parts and rounds identically to a real-only pipeline.

use num_complex::Complex64;
use thiserror::Error;

/// Exponent of an `l^p` norm. Infinity is a distinguished variant rather
/// than a large float so branch selection is exact and nothing overflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpExponent {
    Finite(f64),
    Infinity,
}

#[derive(Debug, Error, PartialEq)]
pub enum SpaceError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("l^p exponent must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),
    #[error("space dimension must be at least 1")]
    ZeroDimension,
}

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("sequences must have length n >= 2, got {0}")]
    TooShort(usize),
    #[error("weights/scalars/vectors lengths differ: {weights}/{scalars}/{vectors}")]
    LengthMismatch {
        weights: usize,
        scalars: usize,
        vectors: usize,
    },
    #[error("scalars and vectors lengths differ: {scalars}/{vectors}")]
    PairLengthMismatch { scalars: usize, vectors: usize },
    #[error("vector {index} does not conform to the space: {source}")]
    NonConforming { index: usize, source: SpaceError },
    #[error("vector {index} must have real coordinates in this space")]
    ComplexCoordinate { index: usize },
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
}

/// Selects the ambient normed space and evaluates its norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormDescriptor {
    /// `l^p` norm on real `d`-vectors (complexified results are measured by
    /// aggregating coordinatewise moduli with the same exponent).
    LpReal {
        exponent: LpExponent,
        dimension: usize,
    },
    /// The complex plane with the modulus; one complex coordinate.
    ComplexModulus,
    /// The real line with the absolute value; one real coordinate.
    RealAbs,
}

impl NormDescriptor {
    /// `l^p` space on real `d`-vectors with finite exponent `p >= 1`.
    pub fn lp_real(exponent: f64, dimension: usize) -> Result<Self, SpaceError> {
        if !exponent.is_finite() || exponent < 1.0 {
            return Err(SpaceError::InvalidExponent(exponent));
        }
        if dimension == 0 {
            return Err(SpaceError::ZeroDimension);
        }
        Ok(NormDescriptor::LpReal {
            exponent: LpExponent::Finite(exponent),
            dimension,
        })
    }

    /// `l^infinity` space on real `d`-vectors.
    pub fn linf_real(dimension: usize) -> Result<Self, SpaceError> {
        if dimension == 0 {
            return Err(SpaceError::ZeroDimension);
        }
        Ok(NormDescriptor::LpReal {
            exponent: LpExponent::Infinity,
            dimension,
        })
    }

    pub fn complex_modulus() -> Self {
        NormDescriptor::ComplexModulus
    }

    pub fn real_abs() -> Self {
        NormDescriptor::RealAbs
    }

    /// Number of stored coordinates per vector (one for the scalar spaces).
    pub fn dimension(&self) -> usize {
        match self {
            NormDescriptor::LpReal { dimension, .. } => *dimension,
            NormDescriptor::ComplexModulus | NormDescriptor::RealAbs => 1,
        }
    }

    /// Whether input vectors in this space must have real coordinates.
    pub fn requires_real_coordinates(&self) -> bool {
        !matches!(self, NormDescriptor::ComplexModulus)
    }

    fn exponent(&self) -> LpExponent {
        match self {
            NormDescriptor::LpReal { exponent, .. } => *exponent,
            // A single coordinate: every exponent yields the modulus.
            NormDescriptor::ComplexModulus | NormDescriptor::RealAbs => LpExponent::Finite(1.0),
        }
    }

    /// Evaluates the norm of `v`, which must have the space's dimension.
    pub fn norm(&self, v: &Vector) -> Result<f64, SpaceError> {
        if v.dimension() != self.dimension() {
            return Err(SpaceError::DimensionMismatch {
                expected: self.dimension(),
                got: v.dimension(),
            });
        }
        Ok(norm_conforming(self, v))
    }
}

/// Norm of a vector already known to conform to the space.
pub(crate) fn norm_conforming(nd: &NormDescriptor, v: &Vector) -> f64 {
    debug_assert_eq!(v.dimension(), nd.dimension());
    let moduli: Vec<f64> = v.coords.iter().map(|z| z.norm()).collect();
    match nd.exponent() {
        LpExponent::Infinity => abs_max(&moduli),
        LpExponent::Finite(p) => lp_sum(&moduli, p),
    }
}

/// Maximum of a slice of nonnegative values (zero on an empty slice).
pub(crate) fn abs_max(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, &t| m.max(t))
}

/// `(sum t_i^p)^(1/p)` for nonnegative `t_i` and finite `p >= 1`.
///
/// General exponents go through a peak-scaled form so that huge `p` (used to
/// probe the `p -> infinity` limit) neither overflows nor underflows.
pub(crate) fn lp_sum(values: &[f64], p: f64) -> f64 {
    debug_assert!(p >= 1.0);
    if p == 1.0 {
        return values.iter().sum();
    }
    if p == 2.0 {
        return values.iter().map(|t| t * t).sum::<f64>().sqrt();
    }
    let peak = abs_max(values);
    if peak == 0.0 {
        return 0.0;
    }
    peak * values
        .iter()
        .map(|&t| (t / peak).powf(p))
        .sum::<f64>()
        .powf(p.recip())
}

/// `(sum w_i t_i^p)^(1/p)` for nonnegative weights and values, finite `p >= 1`.
pub(crate) fn weighted_lp_sum(weights: &[f64], values: &[f64], p: f64) -> f64 {
    debug_assert_eq!(weights.len(), values.len());
    debug_assert!(p >= 1.0);
    if p == 1.0 {
        return weights.iter().zip(values).map(|(w, t)| w * t).sum();
    }
    if p == 2.0 {
        return weights
            .iter()
            .zip(values)
            .map(|(w, t)| w * t * t)
            .sum::<f64>()
            .sqrt();
    }
    let peak = abs_max(values);
    if peak == 0.0 {
        return 0.0;
    }
    peak * weights
        .iter()
        .zip(values)
        .map(|(w, &t)| w * (t / peak).powf(p))
        .sum::<f64>()
        .powf(p.recip())
}

/// A point of the ambient space (or of its complexification, for computed
/// results under a complex scalar sequence).
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    coords: Vec<Complex64>,
}

impl Vector {
    pub fn from_real(coords: &[f64]) -> Self {
        Vector {
            coords: coords.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        }
    }

    pub fn from_complex(coords: Vec<Complex64>) -> Self {
        Vector { coords }
    }

    pub fn zeros(dimension: usize) -> Self {
        Vector {
            coords: vec![Complex64::new(0.0, 0.0); dimension],
        }
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    /// True when every coordinate has an exactly zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.coords.iter().all(|z| z.im == 0.0)
    }

    /// Coordinatewise difference `self - other`.
    pub fn sub(&self, other: &Vector) -> Result<Vector, SpaceError> {
        if self.dimension() != other.dimension() {
            return Err(SpaceError::DimensionMismatch {
                expected: self.dimension(),
                got: other.dimension(),
            });
        }
        Ok(Vector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(u, v)| u - v)
                .collect(),
        })
    }

    /// Coordinatewise sum.
    pub fn add(&self, other: &Vector) -> Result<Vector, SpaceError> {
        if self.dimension() != other.dimension() {
            return Err(SpaceError::DimensionMismatch {
                expected: self.dimension(),
                got: other.dimension(),
            });
        }
        Ok(Vector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(u, v)| u + v)
                .collect(),
        })
    }

    pub fn scale(&self, factor: Complex64) -> Vector {
        Vector {
            coords: self.coords.iter().map(|z| factor * z).collect(),
        }
    }

    /// `self += factor * v`, used by the left-to-right accumulation passes.
    pub(crate) fn add_scaled(&mut self, factor: Complex64, v: &Vector) {
        debug_assert_eq!(self.dimension(), v.dimension());
        for (acc, z) in self.coords.iter_mut().zip(&v.coords) {
            *acc += factor * z;
        }
    }
}

/// Coordinatewise difference of two vectors of the same space.
pub fn vec_sub(u: &Vector, v: &Vector) -> Result<Vector, SpaceError> {
    u.sub(v)
}

/// One problem instance: weights `p`, scalar sequence `a`, vector sequence
/// `x`, all of length `n >= 2`, plus the ambient norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    weights: Vec<f64>,
    scalars: Vec<Complex64>,
    vectors: Vec<Vector>,
    norm: NormDescriptor,
}

impl Instance {
    pub fn new(
        weights: Vec<f64>,
        scalars: Vec<Complex64>,
        vectors: Vec<Vector>,
        norm: NormDescriptor,
    ) -> Result<Self, InstanceError> {
        let n = weights.len();
        if scalars.len() != n || vectors.len() != n {
            return Err(InstanceError::LengthMismatch {
                weights: n,
                scalars: scalars.len(),
                vectors: vectors.len(),
            });
        }
        if n < 2 {
            return Err(InstanceError::TooShort(n));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(InstanceError::NonFinite("weights"));
        }
        if scalars
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(InstanceError::NonFinite("scalars"));
        }
        for (index, v) in vectors.iter().enumerate() {
            if v.dimension() != norm.dimension() {
                return Err(InstanceError::NonConforming {
                    index,
                    source: SpaceError::DimensionMismatch {
                        expected: norm.dimension(),
                        got: v.dimension(),
                    },
                });
            }
            if v.coords
                .iter()
                .any(|z| !z.re.is_finite() || !z.im.is_finite())
            {
                return Err(InstanceError::NonFinite("vectors"));
            }
            if norm.requires_real_coordinates() && !v.is_real() {
                return Err(InstanceError::ComplexCoordinate { index });
            }
        }
        Ok(Instance {
            weights,
            scalars,
            vectors,
            norm,
        })
    }

    /// Convenience constructor for all-real data.
    pub fn from_real(
        weights: Vec<f64>,
        scalars: &[f64],
        vectors: Vec<Vector>,
        norm: NormDescriptor,
    ) -> Result<Self, InstanceError> {
        let scalars = scalars.iter().map(|&a| Complex64::new(a, 0.0)).collect();
        Instance::new(weights, scalars, vectors, norm)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scalars(&self) -> &[Complex64] {
        &self.scalars
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn norm(&self) -> &NormDescriptor {
        &self.norm
    }

    pub fn scalars_are_real(&self) -> bool {
        self.scalars.iter().all(|a| a.im == 0.0)
    }

    /// Magnitude scale `sum|p| * sum|a| * sum ||x||`, the yardstick used by
    /// validity tolerances and self-test discrepancy budgets.
    pub fn scale(&self) -> f64 {
        let sp: f64 = self.weights.iter().map(|w| w.abs()).sum();
        let sa: f64 = self.scalars.iter().map(|a| a.norm()).sum();
        let sx: f64 = self
            .vectors
            .iter()
            .map(|v| norm_conforming(&self.norm, v))
            .sum();
        sp * sa * sx
    }
}

//! Exact-rational ground truth for the floating-point pipeline.
//!
//! Every finite double is a rational, so instances with small integer or
//! dyadic entries convert losslessly and the functional, its equivalent
//! representations, the kernel identity and the bound families can all be
//! evaluated without rounding. Norms are restricted to the rational-exact
//! ones (`l^1`, `l^infinity`, the real line), scalars to real values, and
//! dual-exponent branches to the self-dual pair `p = q = 2`, where validity
//! comparisons go through exact squares.
//!
//! Everything here recomputes from the definitions with fresh loops; nothing
//! calls into the floating-point path it is meant to check.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::bounds::BoundFamily;
use crate::identities::IdentityError;
use crate::space::{Instance, LpExponent, NormDescriptor};

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("norm is not rational-exact (need l1, linf or real_abs)")]
    UnsupportedNorm,
    #[error("scalars must be real for exact evaluation")]
    ComplexScalars,
    #[error("vectors must be real for exact evaluation")]
    ComplexVectors,
    #[error("entry is not a finite double")]
    NonRepresentable,
    #[error("sequences must have length n >= 2 with equal vector dimensions")]
    BadShape,
}

/// Norms whose values stay rational on rational inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactNorm {
    L1,
    LInf,
    RealAbs,
}

fn ratio(value: f64) -> Result<BigRational, OracleError> {
    BigRational::from_float(value).ok_or(OracleError::NonRepresentable)
}

fn int(value: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(value))
}

/// A bound value that is either itself rational or the square root of a
/// rational (for the `p = q = 2` dual-exponent branches).
#[derive(Debug, Clone, PartialEq)]
pub enum ExactBound {
    Value(BigRational),
    SquareOf(BigRational),
}

impl ExactBound {
    pub fn to_f64(&self) -> f64 {
        match self {
            ExactBound::Value(v) => v.to_f64().expect("modest magnitudes"),
            ExactBound::SquareOf(s) => s.to_f64().expect("modest magnitudes").sqrt(),
        }
    }

    /// Exact check of `bound >= other`, comparing squares where needed.
    pub fn at_least(&self, other: &BigRational) -> bool {
        match self {
            ExactBound::Value(v) => v >= other,
            ExactBound::SquareOf(s) => {
                if other.is_negative() || other.is_zero() {
                    !s.is_negative()
                } else {
                    *s >= other * other
                }
            }
        }
    }
}

/// One instance with rational entries, real scalars, and a rational-exact
/// norm.
#[derive(Debug, Clone)]
pub struct ExactInstance {
    pub weights: Vec<BigRational>,
    pub scalars: Vec<BigRational>,
    pub vectors: Vec<Vec<BigRational>>,
    pub norm: ExactNorm,
}

impl ExactInstance {
    pub fn new(
        weights: Vec<BigRational>,
        scalars: Vec<BigRational>,
        vectors: Vec<Vec<BigRational>>,
        norm: ExactNorm,
    ) -> Result<Self, OracleError> {
        let n = weights.len();
        if n < 2 || scalars.len() != n || vectors.len() != n {
            return Err(OracleError::BadShape);
        }
        let d = vectors[0].len();
        if d == 0 || vectors.iter().any(|v| v.len() != d) {
            return Err(OracleError::BadShape);
        }
        if matches!(norm, ExactNorm::RealAbs) && d != 1 {
            return Err(OracleError::BadShape);
        }
        Ok(ExactInstance {
            weights,
            scalars,
            vectors,
            norm,
        })
    }

    /// Lossless conversion from a floating-point instance.
    pub fn from_instance(inst: &Instance) -> Result<Self, OracleError> {
        let norm = match inst.norm() {
            NormDescriptor::RealAbs => ExactNorm::RealAbs,
            NormDescriptor::LpReal { exponent, .. } => match exponent {
                LpExponent::Infinity => ExactNorm::LInf,
                LpExponent::Finite(p) if *p == 1.0 => ExactNorm::L1,
                LpExponent::Finite(_) => return Err(OracleError::UnsupportedNorm),
            },
            NormDescriptor::ComplexModulus => return Err(OracleError::UnsupportedNorm),
        };
        if !inst.scalars_are_real() {
            return Err(OracleError::ComplexScalars);
        }
        let weights = inst
            .weights()
            .iter()
            .map(|&w| ratio(w))
            .collect::<Result<_, _>>()?;
        let scalars = inst
            .scalars()
            .iter()
            .map(|a| ratio(a.re))
            .collect::<Result<_, _>>()?;
        let vectors = inst
            .vectors()
            .iter()
            .map(|v| {
                if !v.is_real() {
                    return Err(OracleError::ComplexVectors);
                }
                v.coords().iter().map(|z| ratio(z.re)).collect()
            })
            .collect::<Result<_, _>>()?;
        ExactInstance::new(weights, scalars, vectors, norm)
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    fn zero_vec(&self) -> Vec<BigRational> {
        vec![BigRational::zero(); self.dim()]
    }

    fn weight_prefixes(&self) -> Vec<BigRational> {
        let mut out = Vec::with_capacity(self.n());
        let mut acc = BigRational::zero();
        for w in &self.weights {
            acc += w;
            out.push(acc.clone());
        }
        out
    }

    fn weighted_scalar_prefixes(&self) -> Vec<BigRational> {
        let mut out = Vec::with_capacity(self.n());
        let mut acc = BigRational::zero();
        for (w, a) in self.weights.iter().zip(&self.scalars) {
            acc += w * a;
            out.push(acc.clone());
        }
        out
    }

    fn vector_diff(&self, i: usize) -> Vec<BigRational> {
        self.vectors[i + 1]
            .iter()
            .zip(&self.vectors[i])
            .map(|(u, v)| u - v)
            .collect()
    }

    fn scalar_diff(&self, j: usize) -> BigRational {
        &self.scalars[j + 1] - &self.scalars[j]
    }

    /// Exact norm of a rational coordinate vector.
    pub fn norm_exact(&self, v: &[BigRational]) -> BigRational {
        match self.norm {
            ExactNorm::L1 => v.iter().map(|c| c.abs()).sum(),
            ExactNorm::LInf => {
                v.iter()
                    .map(|c| c.abs())
                    .fold(BigRational::zero(), |m, c| if c > m { c } else { m })
            }
            ExactNorm::RealAbs => v[0].abs(),
        }
    }

    /// `T_n(p;a,x)` from the definition.
    pub fn chebyshev_direct(&self) -> Vec<BigRational> {
        let n = self.n();
        let mut weighted_products = self.zero_vec();
        let mut weighted_vectors = self.zero_vec();
        let mut weighted_scalars = BigRational::zero();
        let mut weight_total = BigRational::zero();
        for i in 0..n {
            let wa = &self.weights[i] * &self.scalars[i];
            for (acc, c) in weighted_products.iter_mut().zip(&self.vectors[i]) {
                *acc += &wa * c;
            }
            for (acc, c) in weighted_vectors.iter_mut().zip(&self.vectors[i]) {
                *acc += &self.weights[i] * c;
            }
            weighted_scalars += &wa;
            weight_total += &self.weights[i];
        }
        weighted_products
            .iter()
            .zip(&weighted_vectors)
            .map(|(s1, s2)| &weight_total * s1 - &weighted_scalars * s2)
            .collect()
    }

    /// Exact norm of the functional.
    pub fn t_norm(&self) -> BigRational {
        self.norm_exact(&self.chebyshev_direct())
    }

    /// `det_i = P_i A_n - P_n A_i` for `i = 1..n-1`.
    pub fn det_coefficients(&self) -> Vec<BigRational> {
        let p = self.weight_prefixes();
        let a = self.weighted_scalar_prefixes();
        let n = self.n();
        (0..n - 1)
            .map(|i| &p[i] * &a[n - 1] - &p[n - 1] * &a[i])
            .collect()
    }

    /// First representation: `sum det_i dx_i`.
    pub fn chebyshev_identity1(&self) -> Vec<BigRational> {
        let dets = self.det_coefficients();
        let mut acc = self.zero_vec();
        for (i, det) in dets.iter().enumerate() {
            for (a, c) in acc.iter_mut().zip(self.vector_diff(i)) {
                *a += det * c;
            }
        }
        acc
    }

    /// Second representation, hypothesis `P_i != 0` for all `i = 1..n`
    /// (exact test).
    pub fn chebyshev_identity2(&self) -> Result<Vec<BigRational>, IdentityError> {
        let p = self.weight_prefixes();
        for (i, pi) in p.iter().enumerate() {
            if pi.is_zero() {
                return Err(IdentityError::ZeroPartialSum(i + 1));
            }
        }
        let a = self.weighted_scalar_prefixes();
        let n = self.n();
        let global_mean = &a[n - 1] / &p[n - 1];
        let mut acc = self.zero_vec();
        for i in 0..n - 1 {
            let coeff = &p[i] * (&global_mean - &a[i] / &p[i]);
            for (acc_c, c) in acc.iter_mut().zip(self.vector_diff(i)) {
                *acc_c += &coeff * c;
            }
        }
        Ok(acc.into_iter().map(|c| c * &p[n - 1]).collect())
    }

    /// Third representation, hypothesis `P_i, P_n - P_i != 0` for
    /// `i = 1..n-1` (exact test).
    pub fn chebyshev_identity3(&self) -> Result<Vec<BigRational>, IdentityError> {
        let p = self.weight_prefixes();
        let n = self.n();
        let tails: Vec<BigRational> = (0..n - 1).map(|i| &p[n - 1] - &p[i]).collect();
        for i in 0..n - 1 {
            if p[i].is_zero() {
                return Err(IdentityError::ZeroPartialSum(i + 1));
            }
            if tails[i].is_zero() {
                return Err(IdentityError::ZeroTailSum(i + 1));
            }
        }
        let a = self.weighted_scalar_prefixes();
        let mut acc = self.zero_vec();
        for i in 0..n - 1 {
            let tail_scalar = &a[n - 1] - &a[i];
            let coeff = &p[i] * &tails[i] * (&tail_scalar / &tails[i] - &a[i] / &p[i]);
            for (acc_c, c) in acc.iter_mut().zip(self.vector_diff(i)) {
                *acc_c += &coeff * c;
            }
        }
        Ok(acc)
    }

    fn kernel_entry(&self, p: &[BigRational], i: usize, j: usize) -> BigRational {
        let n = self.n();
        let lo = i.min(j);
        let hi = i.max(j);
        &p[lo] * (&p[n - 1] - &p[hi])
    }

    /// Fourth representation, the kernel double sum.
    pub fn chebyshev_double_sum(&self) -> Vec<BigRational> {
        let p = self.weight_prefixes();
        let n = self.n();
        let mut acc = self.zero_vec();
        for i in 0..n - 1 {
            let mut row = BigRational::zero();
            for j in 0..n - 1 {
                row += self.kernel_entry(&p, i, j) * self.scalar_diff(j);
            }
            for (acc_c, c) in acc.iter_mut().zip(self.vector_diff(i)) {
                *acc_c += &row * c;
            }
        }
        acc
    }

    /// `max_i |det_i - sum_j K(i,j) da_j|`; exactly zero when the kernel
    /// identity holds.
    pub fn lemma_max_discrepancy(&self) -> BigRational {
        let p = self.weight_prefixes();
        let dets = self.det_coefficients();
        let n = self.n();
        let mut worst = BigRational::zero();
        for (i, det) in dets.iter().enumerate() {
            let mut row = BigRational::zero();
            for j in 0..n - 1 {
                row += self.kernel_entry(&p, i, j) * self.scalar_diff(j);
            }
            let gap = (det - row).abs();
            if gap > worst {
                worst = gap;
            }
        }
        worst
    }

    /// The same discrepancy with the tail index shifted from `max{i,j}` to
    /// `max{i,j}+1` (so the last tail is the empty sum). This is the
    /// misprinted form of the kernel; it must fail the identity.
    pub fn lemma_max_discrepancy_misprinted(&self) -> BigRational {
        let p = self.weight_prefixes();
        let dets = self.det_coefficients();
        let n = self.n();
        let tail = |idx: usize| -> BigRational {
            // tail after position idx+1 (1-based); idx = n-1 gives zero
            &p[n - 1] - &p[idx]
        };
        let mut worst = BigRational::zero();
        for (i, det) in dets.iter().enumerate() {
            let mut row = BigRational::zero();
            for j in 0..n - 1 {
                let lo = i.min(j);
                let hi = i.max(j);
                row += &p[lo] * tail(hi + 1) * self.scalar_diff(j);
            }
            let gap = (det - row).abs();
            if gap > worst {
                worst = gap;
            }
        }
        worst
    }

    fn diff_data(&self) -> (Vec<BigRational>, Vec<BigRational>) {
        let n = self.n();
        let da: Vec<BigRational> = (0..n - 1).map(|j| self.scalar_diff(j).abs()).collect();
        let dx: Vec<BigRational> = (0..n - 1)
            .map(|i| self.norm_exact(&self.vector_diff(i)))
            .collect();
        (da, dx)
    }

    /// Exact value of one bound family (`None` when the family does not
    /// apply). Dual-exponent branches use `p = q = 2` and come back as exact
    /// squares.
    pub fn bound(&self, family: BoundFamily) -> Option<ExactBound> {
        let n = self.n();
        let p = self.weight_prefixes();
        let a = self.weighted_scalar_prefixes();
        let (da, dx) = self.diff_data();
        let max_of = |vals: &[BigRational]| {
            vals.iter().fold(
                BigRational::zero(),
                |m, v| if *v > m { v.clone() } else { m },
            )
        };
        let sum_of = |vals: &[BigRational]| vals.iter().sum::<BigRational>();
        let sum_sq = |vals: &[BigRational]| vals.iter().map(|v| v * v).sum::<BigRational>();

        let prefix_nonzero = |upto: usize| p[..upto].iter().all(|pi| !pi.is_zero());
        let is_probability =
            self.weights.iter().all(|w| !w.is_negative()) && sum_of(&self.weights) == int(1);
        let uniform = BigRational::new(BigInt::from(1), BigInt::from(n as i64));
        let is_uniform = self.weights.iter().all(|w| *w == uniform);

        match family {
            BoundFamily::Thm31MaxSum | BoundFamily::Thm31Holder | BoundFamily::Thm31SumMax => {
                let dets: Vec<BigRational> =
                    self.det_coefficients().iter().map(|d| d.abs()).collect();
                Some(match family {
                    BoundFamily::Thm31MaxSum => ExactBound::Value(max_of(&dets) * sum_of(&dx)),
                    BoundFamily::Thm31SumMax => ExactBound::Value(sum_of(&dets) * max_of(&dx)),
                    _ => ExactBound::SquareOf(sum_sq(&dets) * sum_sq(&dx)),
                })
            }
            BoundFamily::Thm33Branch1 | BoundFamily::Thm33Branch2 | BoundFamily::Thm33Branch3 => {
                if !prefix_nonzero(n) {
                    return None;
                }
                let global_mean = &a[n - 1] / &p[n - 1];
                let devs: Vec<BigRational> = (0..n - 1)
                    .map(|i| (&global_mean - &a[i] / &p[i]).abs())
                    .collect();
                let wts: Vec<BigRational> = (0..n - 1).map(|i| p[i].abs()).collect();
                let prefactor = p[n - 1].abs();
                Some(match family {
                    BoundFamily::Thm33Branch1 => {
                        let weighted_dx: BigRational =
                            wts.iter().zip(&dx).map(|(w, t)| w * t).sum();
                        ExactBound::Value(prefactor * max_of(&devs) * weighted_dx)
                    }
                    BoundFamily::Thm33Branch3 => {
                        let weighted_dev: BigRational =
                            wts.iter().zip(&devs).map(|(w, t)| w * t).sum();
                        ExactBound::Value(prefactor * weighted_dev * max_of(&dx))
                    }
                    _ => {
                        let dev_mass: BigRational =
                            wts.iter().zip(&devs).map(|(w, t)| w * t * t).sum();
                        let dx_mass: BigRational =
                            wts.iter().zip(&dx).map(|(w, t)| w * t * t).sum();
                        ExactBound::SquareOf(&prefactor * &prefactor * dev_mass * dx_mass)
                    }
                })
            }
            BoundFamily::Thm34Branch1 | BoundFamily::Thm34Branch2 | BoundFamily::Thm34Branch3 => {
                let tails: Vec<BigRational> = (0..n - 1).map(|i| &p[n - 1] - &p[i]).collect();
                if !prefix_nonzero(n - 1) || tails.iter().any(|t| t.is_zero()) {
                    return None;
                }
                let devs: Vec<BigRational> = (0..n - 1)
                    .map(|i| {
                        let tail_scalar = &a[n - 1] - &a[i];
                        (tail_scalar / &tails[i] - &a[i] / &p[i]).abs()
                    })
                    .collect();
                let wts: Vec<BigRational> = (0..n - 1).map(|i| (&p[i] * &tails[i]).abs()).collect();
                Some(match family {
                    BoundFamily::Thm34Branch1 => {
                        let weighted_dx: BigRational =
                            wts.iter().zip(&dx).map(|(w, t)| w * t).sum();
                        ExactBound::Value(max_of(&devs) * weighted_dx)
                    }
                    BoundFamily::Thm34Branch3 => {
                        let weighted_dev: BigRational =
                            wts.iter().zip(&devs).map(|(w, t)| w * t).sum();
                        ExactBound::Value(weighted_dev * max_of(&dx))
                    }
                    _ => {
                        let dev_mass: BigRational =
                            wts.iter().zip(&devs).map(|(w, t)| w * t * t).sum();
                        let dx_mass: BigRational =
                            wts.iter().zip(&dx).map(|(w, t)| w * t * t).sum();
                        ExactBound::SquareOf(dev_mass * dx_mass)
                    }
                })
            }
            BoundFamily::Thm35Branch1 | BoundFamily::Thm35Branch2 | BoundFamily::Thm35Branch3 => {
                let mut cells: Vec<BigRational> = Vec::with_capacity((n - 1) * (n - 1));
                for i in 0..n - 1 {
                    for j in 0..n - 1 {
                        cells.push(self.kernel_entry(&p, i, j).abs());
                    }
                }
                Some(match family {
                    BoundFamily::Thm35Branch1 => {
                        ExactBound::Value(max_of(&cells) * sum_of(&da) * sum_of(&dx))
                    }
                    BoundFamily::Thm35Branch3 => {
                        ExactBound::Value(sum_of(&cells) * max_of(&da) * max_of(&dx))
                    }
                    _ => ExactBound::SquareOf(sum_sq(&cells) * sum_sq(&da) * sum_sq(&dx)),
                })
            }
            BoundFamily::BaselineMaxMax
            | BoundFamily::BaselineSum11
            | BoundFamily::BaselineHolder => {
                if !is_probability {
                    return None;
                }
                Some(match family {
                    BoundFamily::BaselineMaxMax => {
                        let mut mean = BigRational::zero();
                        let mut second = BigRational::zero();
                        for (i, w) in self.weights.iter().enumerate() {
                            let idx = int((i + 1) as i64);
                            mean += &idx * w;
                            second += &idx * &idx * w;
                        }
                        ExactBound::Value((second - &mean * &mean) * max_of(&da) * max_of(&dx))
                    }
                    BoundFamily::BaselineSum11 => {
                        let half_pair_mass: BigRational =
                            self.weights.iter().map(|w| w * (int(1) - w)).sum();
                        ExactBound::Value(
                            BigRational::new(BigInt::from(1), BigInt::from(2))
                                * half_pair_mass
                                * sum_of(&da)
                                * sum_of(&dx),
                        )
                    }
                    _ => {
                        // The pair loop is the independent route here; the
                        // floating path folds it into a prefix-tail pass.
                        let mut pair_mass = BigRational::zero();
                        for i in 0..n {
                            for j in i + 1..n {
                                pair_mass +=
                                    &self.weights[i] * &self.weights[j] * int((j - i) as i64);
                            }
                        }
                        ExactBound::SquareOf(&pair_mass * &pair_mass * sum_sq(&da) * sum_sq(&dx))
                    }
                })
            }
            BoundFamily::Cor36KInf => {
                if !is_uniform {
                    return None;
                }
                Some(ExactBound::Value(
                    k_infinity_exact(n) * sum_of(&da) * sum_of(&dx),
                ))
            }
            BoundFamily::Cor38KQ => {
                if !is_uniform {
                    return None;
                }
                Some(ExactBound::SquareOf(
                    k_q2_squared_exact(n) * sum_sq(&da) * sum_sq(&dx),
                ))
            }
            BoundFamily::ClosingMaxMax => {
                if !is_uniform {
                    return None;
                }
                Some(ExactBound::Value(
                    k_one_exact(n) * max_of(&da) * max_of(&dx),
                ))
            }
        }
    }
}

/// Exact `k_inf` by brute force over the grid.
pub fn k_infinity_exact(n: usize) -> BigRational {
    assert!(n >= 2);
    let n = n as i64;
    let mut best = 0i64;
    for i in 1..n {
        for j in 1..n {
            best = best.max(i.min(j) * (n - i.max(j)));
        }
    }
    BigRational::new(BigInt::from(best), BigInt::from(n * n))
}

/// Exact square of `k_q` at `q = 2`: `(1/n^4) * sum cells^2`.
pub fn k_q2_squared_exact(n: usize) -> BigRational {
    assert!(n >= 2);
    let n = n as i64;
    let mut sum = BigInt::from(0);
    for i in 1..n {
        for j in 1..n {
            let cell = BigInt::from(i.min(j) * (n - i.max(j)));
            sum += &cell * &cell;
        }
    }
    BigRational::new(sum, BigInt::from(n * n) * BigInt::from(n * n))
}

/// Exact `k_one` via the grid sum `(1/n^2) sum min (n - max)`.
pub fn k_one_exact(n: usize) -> BigRational {
    assert!(n >= 2);
    let n = n as i64;
    let mut sum = 0i64;
    for i in 1..n {
        for j in 1..n {
            sum += i.min(j) * (n - i.max(j));
        }
    }
    BigRational::new(BigInt::from(sum), BigInt::from(n * n))
}

/// Exact closed form `(n^2 - 1) / 12`.
pub fn k_one_closed_exact(n: usize) -> BigRational {
    assert!(n >= 2);
    let n = n as i64;
    BigRational::new(BigInt::from(n * n - 1), BigInt::from(12))
}

/// Exact `T_n(u; e, e)` for uniform weights `u = 1/n` and the ramp
/// `e = (1, 2, ..., n)` on the real line.
pub fn t_uniform_ramp_exact(n: usize) -> BigRational {
    assert!(n >= 2);
    let uniform = BigRational::new(BigInt::from(1), BigInt::from(n as i64));
    let weights = vec![uniform; n];
    let ramp: Vec<BigRational> = (1..=n as i64).map(int).collect();
    let vectors: Vec<Vec<BigRational>> = ramp.iter().map(|e| vec![e.clone()]).collect();
    let inst = ExactInstance::new(weights, ramp, vectors, ExactNorm::RealAbs)
        .expect("ramp instance is well-formed");
    inst.chebyshev_direct()[0].clone()
}

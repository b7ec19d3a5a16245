//! Upper bounds for the norm of the Chebyshev functional.
//!
//! Eighteen bound families are evaluated: the three baseline branches for
//! probability weights, three branches each built on the four equivalent
//! representations (determinant coefficients, the two normalized forms, and
//! the kernel double sum), and the three uniform-weight kernel-constant
//! bounds. Every family reports a value together with its applicability, so
//! a report can always be assembled even when a family's hypothesis fails on
//! the instance at hand.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{k_infinity, k_one, k_q};
use crate::functional::{aggregates, chebyshev_direct, PrefixAggregates};
use crate::identities::{
    det_coefficients, kernel_matrix, DetCoefficients, KernelMatrix, DEFAULT_ZERO_GUARD,
};
use crate::space::{
    abs_max, lp_sum, norm_conforming, weighted_lp_sum, Instance, InstanceError, NormDescriptor,
    Vector,
};

/// A bound is declared violated only when it undershoots the functional norm
/// by more than this fraction of the instance scale.
pub const VALIDITY_RELATIVE_TOLERANCE: f64 = 1e-10;

/// Tolerance on `sum p_i = 1` for the probability-weight hypothesis.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// Tolerance on `p_i = 1/n` for the uniform-weight hypothesis.
pub const UNIFORM_WEIGHT_TOLERANCE: f64 = 1e-12;

/// Conjugate exponents `1/p + 1/q = 1` with `p, q` in `(1, infinity)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderPair {
    p: f64,
    q: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum HolderError {
    #[error("Holder exponent must lie in (1, infinity), got {0}")]
    InvalidExponent(f64),
    #[error("exponents are not conjugate: 1/{p} + 1/{q} != 1")]
    NotConjugate { p: f64, q: f64 },
}

impl HolderPair {
    /// Builds the pair from `p`, with `q = p / (p - 1)`.
    pub fn from_p(p: f64) -> Result<Self, HolderError> {
        if !p.is_finite() || p <= 1.0 {
            return Err(HolderError::InvalidExponent(p));
        }
        Ok(HolderPair {
            p,
            q: p / (p - 1.0),
        })
    }

    pub fn new(p: f64, q: f64) -> Result<Self, HolderError> {
        if !p.is_finite() || p <= 1.0 {
            return Err(HolderError::InvalidExponent(p));
        }
        if !q.is_finite() || q <= 1.0 {
            return Err(HolderError::InvalidExponent(q));
        }
        if (p.recip() + q.recip() - 1.0).abs() > 1e-12 {
            return Err(HolderError::NotConjugate { p, q });
        }
        Ok(HolderPair { p, q })
    }

    /// The self-dual pair `p = q = 2`, the default wherever no pair is given.
    pub fn square() -> Self {
        HolderPair { p: 2.0, q: 2.0 }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

impl Default for HolderPair {
    fn default() -> Self {
        HolderPair::square()
    }
}

/// The bound families, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundFamily {
    #[serde(rename = "baseline_maxmax")]
    BaselineMaxMax,
    #[serde(rename = "baseline_sum_11")]
    BaselineSum11,
    #[serde(rename = "baseline_holder")]
    BaselineHolder,
    #[serde(rename = "thm31_max_sum")]
    Thm31MaxSum,
    #[serde(rename = "thm31_holder")]
    Thm31Holder,
    #[serde(rename = "thm31_sum_max")]
    Thm31SumMax,
    #[serde(rename = "thm33_branch1")]
    Thm33Branch1,
    #[serde(rename = "thm33_branch2")]
    Thm33Branch2,
    #[serde(rename = "thm33_branch3")]
    Thm33Branch3,
    #[serde(rename = "thm34_branch1")]
    Thm34Branch1,
    #[serde(rename = "thm34_branch2")]
    Thm34Branch2,
    #[serde(rename = "thm34_branch3")]
    Thm34Branch3,
    #[serde(rename = "thm35_branch1")]
    Thm35Branch1,
    #[serde(rename = "thm35_branch2")]
    Thm35Branch2,
    #[serde(rename = "thm35_branch3")]
    Thm35Branch3,
    #[serde(rename = "cor36_kinf")]
    Cor36KInf,
    #[serde(rename = "cor38_kq")]
    Cor38KQ,
    #[serde(rename = "closing_maxmax")]
    ClosingMaxMax,
}

impl BoundFamily {
    pub const ALL: [BoundFamily; 18] = [
        BoundFamily::BaselineMaxMax,
        BoundFamily::BaselineSum11,
        BoundFamily::BaselineHolder,
        BoundFamily::Thm31MaxSum,
        BoundFamily::Thm31Holder,
        BoundFamily::Thm31SumMax,
        BoundFamily::Thm33Branch1,
        BoundFamily::Thm33Branch2,
        BoundFamily::Thm33Branch3,
        BoundFamily::Thm34Branch1,
        BoundFamily::Thm34Branch2,
        BoundFamily::Thm34Branch3,
        BoundFamily::Thm35Branch1,
        BoundFamily::Thm35Branch2,
        BoundFamily::Thm35Branch3,
        BoundFamily::Cor36KInf,
        BoundFamily::Cor38KQ,
        BoundFamily::ClosingMaxMax,
    ];

    pub fn token(&self) -> &'static str {
        match self {
            BoundFamily::BaselineMaxMax => "baseline_maxmax",
            BoundFamily::BaselineSum11 => "baseline_sum_11",
            BoundFamily::BaselineHolder => "baseline_holder",
            BoundFamily::Thm31MaxSum => "thm31_max_sum",
            BoundFamily::Thm31Holder => "thm31_holder",
            BoundFamily::Thm31SumMax => "thm31_sum_max",
            BoundFamily::Thm33Branch1 => "thm33_branch1",
            BoundFamily::Thm33Branch2 => "thm33_branch2",
            BoundFamily::Thm33Branch3 => "thm33_branch3",
            BoundFamily::Thm34Branch1 => "thm34_branch1",
            BoundFamily::Thm34Branch2 => "thm34_branch2",
            BoundFamily::Thm34Branch3 => "thm34_branch3",
            BoundFamily::Thm35Branch1 => "thm35_branch1",
            BoundFamily::Thm35Branch2 => "thm35_branch2",
            BoundFamily::Thm35Branch3 => "thm35_branch3",
            BoundFamily::Cor36KInf => "cor36_kinf",
            BoundFamily::Cor38KQ => "cor38_kq",
            BoundFamily::ClosingMaxMax => "closing_maxmax",
        }
    }

    /// Whether the family's value depends on a Holder pair.
    pub fn uses_holder(&self) -> bool {
        matches!(
            self,
            BoundFamily::BaselineHolder
                | BoundFamily::Thm31Holder
                | BoundFamily::Thm33Branch2
                | BoundFamily::Thm34Branch2
                | BoundFamily::Thm35Branch2
                | BoundFamily::Cor38KQ
        )
    }
}

impl fmt::Display for BoundFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("unknown bound family: {0}")]
pub struct ParseBoundFamilyError(String);

impl FromStr for BoundFamily {
    type Err = ParseBoundFamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BoundFamily::ALL
            .iter()
            .copied()
            .find(|f| f.token() == s)
            .ok_or_else(|| ParseBoundFamilyError(s.to_string()))
    }
}

/// Why a family does not apply to an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InapplicabilityReason {
    /// `P_i = 0` for the given 1-based index.
    ZeroPartialSum(usize),
    /// `P_n - P_i = 0` for the given 1-based index.
    ZeroTailSum(usize),
    /// Weights are not a probability vector.
    NotProbabilityWeights,
    /// Weights are not the uniform probability vector `1/n`.
    NotUniformWeights,
}

impl fmt::Display for InapplicabilityReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InapplicabilityReason::ZeroPartialSum(i) => write!(f, "zero_partial_sum({i})"),
            InapplicabilityReason::ZeroTailSum(i) => write!(f, "zero_tail_sum({i})"),
            InapplicabilityReason::NotProbabilityWeights => f.write_str("not_probability_weights"),
            InapplicabilityReason::NotUniformWeights => f.write_str("not_uniform_weights"),
        }
    }
}

/// One evaluated bound: a value when the family's hypothesis holds on the
/// instance, otherwise the reason it does not.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundValue {
    pub family: BoundFamily,
    pub value: Option<f64>,
    pub holder: Option<HolderPair>,
    pub reason: Option<InapplicabilityReason>,
}

impl BoundValue {
    fn applicable_value(family: BoundFamily, value: f64, holder: Option<HolderPair>) -> Self {
        BoundValue {
            family,
            // Cancellation in an otherwise nonnegative factor may round a
            // hair below zero; the bound itself is nonnegative.
            value: Some(value.max(0.0)),
            holder,
            reason: None,
        }
    }

    fn inapplicable(
        family: BoundFamily,
        reason: InapplicabilityReason,
        holder: Option<HolderPair>,
    ) -> Self {
        BoundValue {
            family,
            value: None,
            holder,
            reason: Some(reason),
        }
    }

    pub fn applicable(&self) -> bool {
        self.value.is_some()
    }
}

fn scalar_moduli(values: &[Complex64]) -> Vec<f64> {
    values.iter().map(|z| z.norm()).collect()
}

fn diff_norms(norm: &NormDescriptor, diffs: &[Vector]) -> Vec<f64> {
    diffs.iter().map(|v| norm_conforming(norm, v)).collect()
}

fn is_probability_weights(weights: &[f64]) -> bool {
    weights.iter().all(|&p| p >= 0.0)
        && (weights.iter().sum::<f64>() - 1.0).abs() <= PROBABILITY_TOLERANCE
}

pub(crate) fn is_uniform_probability(weights: &[f64]) -> bool {
    let inv = 1.0 / weights.len() as f64;
    weights
        .iter()
        .all(|&p| (p - inv).abs() <= UNIFORM_WEIGHT_TOLERANCE)
}

/// First index (1-based) at which the prefix-sum hypothesis fails, checking
/// `P_i` for `i <= upto` and, when `check_tails` is set, `P_n - P_i` for
/// `i <= n-1`.
fn prefix_hypothesis_failure(
    agg: &PrefixAggregates,
    upto: usize,
    check_tails: bool,
) -> Option<InapplicabilityReason> {
    let threshold = DEFAULT_ZERO_GUARD * agg.weight_abs_sum;
    for i in 0..upto {
        if agg.weight_prefix[i].abs() <= threshold {
            return Some(InapplicabilityReason::ZeroPartialSum(i + 1));
        }
        if check_tails && i < agg.n() - 1 && agg.weight_tail[i].abs() <= threshold {
            return Some(InapplicabilityReason::ZeroTailSum(i + 1));
        }
    }
    None
}

/// Bounds from the determinant-coefficient representation (arbitrary real
/// weights): `max|det| * sum||dx||`, the dual-exponent split with `q` on the
/// determinants and `p` on the vector differences, and `sum|det| * max||dx||`.
pub fn bounds_theorem31(
    inst: &Instance,
    agg: &PrefixAggregates,
    dets: &DetCoefficients,
    holder: Option<HolderPair>,
) -> [BoundValue; 3] {
    let pair = holder.unwrap_or_default();
    let det_abs = scalar_moduli(&dets.dets);
    let dx = diff_norms(inst.norm(), &agg.vector_diffs);

    let b1 = abs_max(&det_abs) * dx.iter().sum::<f64>();
    let b2 = lp_sum(&det_abs, pair.q()) * lp_sum(&dx, pair.p());
    let b3 = det_abs.iter().sum::<f64>() * abs_max(&dx);

    [
        BoundValue::applicable_value(BoundFamily::Thm31MaxSum, b1, None),
        BoundValue::applicable_value(BoundFamily::Thm31Holder, b2, Some(pair)),
        BoundValue::applicable_value(BoundFamily::Thm31SumMax, b3, None),
    ]
}

/// Bounds from the prefix-normalized representation, needing `P_i != 0` for
/// every `i = 1..n`. Prefactor `|P_n|`, weights `|P_i|`, deviations
/// `|A_n/P_n - A_i/P_i|`. The dual-exponent branch splits with the weighted
/// power-mean form `(sum |P_i| dev^q)^(1/q) * (sum |P_i| ||dx||^p)^(1/p)`.
pub fn bounds_theorem33(
    inst: &Instance,
    agg: &PrefixAggregates,
    holder: Option<HolderPair>,
) -> [BoundValue; 3] {
    let pair = holder.unwrap_or_default();
    let families = [
        BoundFamily::Thm33Branch1,
        BoundFamily::Thm33Branch2,
        BoundFamily::Thm33Branch3,
    ];
    if let Some(reason) = prefix_hypothesis_failure(agg, agg.n(), false) {
        return [
            BoundValue::inapplicable(families[0], reason, None),
            BoundValue::inapplicable(families[1], reason, Some(pair)),
            BoundValue::inapplicable(families[2], reason, None),
        ];
    }

    let n = agg.n();
    let prefactor = agg.weight_total().abs();
    let global_mean = agg.weighted_scalar_total() / agg.weight_total();
    let deviations: Vec<f64> = (0..n - 1)
        .map(|i| (global_mean - agg.weighted_scalar_prefix[i] / agg.weight_prefix[i]).norm())
        .collect();
    let weights: Vec<f64> = agg.weight_prefix[..n - 1].iter().map(|p| p.abs()).collect();
    let dx = diff_norms(inst.norm(), &agg.vector_diffs);

    let weighted_dx: f64 = weights.iter().zip(&dx).map(|(w, t)| w * t).sum();
    let b1 = prefactor * abs_max(&deviations) * weighted_dx;
    let b2 = prefactor
        * weighted_lp_sum(&weights, &deviations, pair.q())
        * weighted_lp_sum(&weights, &dx, pair.p());
    let weighted_dev: f64 = weights.iter().zip(&deviations).map(|(w, t)| w * t).sum();
    let b3 = prefactor * weighted_dev * abs_max(&dx);

    [
        BoundValue::applicable_value(families[0], b1, None),
        BoundValue::applicable_value(families[1], b2, Some(pair)),
        BoundValue::applicable_value(families[2], b3, None),
    ]
}

/// The sum-then-root variant of the second factor of the dual-exponent branch
/// above: `(sum |P_i| ||dx||)^(1/p)` instead of the weighted power mean.
///
/// Kept only for side-by-side comparison; it is not positively homogeneous in
/// `x` and is not a valid upper bound, so it never enters reports.
pub fn bounds_theorem33_branch2_asprinted(
    inst: &Instance,
    agg: &PrefixAggregates,
    holder: Option<HolderPair>,
) -> Option<f64> {
    let pair = holder.unwrap_or_default();
    if prefix_hypothesis_failure(agg, agg.n(), false).is_some() {
        return None;
    }
    let n = agg.n();
    let prefactor = agg.weight_total().abs();
    let global_mean = agg.weighted_scalar_total() / agg.weight_total();
    let deviations: Vec<f64> = (0..n - 1)
        .map(|i| (global_mean - agg.weighted_scalar_prefix[i] / agg.weight_prefix[i]).norm())
        .collect();
    let weights: Vec<f64> = agg.weight_prefix[..n - 1].iter().map(|p| p.abs()).collect();
    let dx = diff_norms(inst.norm(), &agg.vector_diffs);
    let weighted_dx: f64 = weights.iter().zip(&dx).map(|(w, t)| w * t).sum();
    Some(
        prefactor
            * weighted_lp_sum(&weights, &deviations, pair.q())
            * weighted_dx.powf(pair.p().recip()),
    )
}

/// The unweighted specialization of [`bounds_theorem33`]: prefactor `1/n`,
/// weights `i`, deviations `|mean of all - mean of the first i|`. Reported
/// under the same family tags.
pub fn bounds_corollary34(
    scalars: &[Complex64],
    vectors: &[Vector],
    norm: &NormDescriptor,
    holder: Option<HolderPair>,
) -> Result<[BoundValue; 3], InstanceError> {
    let diffs = unweighted_diffs(scalars, vectors, norm)?;
    let pair = holder.unwrap_or_default();
    let n = scalars.len();

    let mut prefix = Complex64::new(0.0, 0.0);
    let mut prefix_means = Vec::with_capacity(n);
    for a in scalars {
        prefix += a;
        prefix_means.push(prefix / (prefix_means.len() + 1) as f64);
    }
    let global_mean = prefix_means[n - 1];
    let deviations: Vec<f64> = prefix_means[..n - 1]
        .iter()
        .map(|m| (global_mean - m).norm())
        .collect();
    let weights: Vec<f64> = (1..n).map(|i| i as f64).collect();
    let dx = &diffs.dx_norms;

    let inv_n = 1.0 / n as f64;
    let weighted_dx: f64 = weights.iter().zip(dx).map(|(w, t)| w * t).sum();
    let b1 = inv_n * abs_max(&deviations) * weighted_dx;
    let b2 = inv_n
        * weighted_lp_sum(&weights, &deviations, pair.q())
        * weighted_lp_sum(&weights, dx, pair.p());
    let weighted_dev: f64 = weights.iter().zip(&deviations).map(|(w, t)| w * t).sum();
    let b3 = inv_n * weighted_dev * abs_max(dx);

    Ok([
        BoundValue::applicable_value(BoundFamily::Thm33Branch1, b1, None),
        BoundValue::applicable_value(BoundFamily::Thm33Branch2, b2, Some(pair)),
        BoundValue::applicable_value(BoundFamily::Thm33Branch3, b3, None),
    ])
}

/// Output of [`bounds_theorem34`]: the general prefix/tail-normalized bounds
/// plus, when the weights are exactly uniform, the `1/n^2`-prefactor
/// specialization with weights `i(n-i)` and head/tail mean gaps.
#[derive(Debug, Clone)]
pub struct Theorem34Bounds {
    pub general: [BoundValue; 3],
    pub uniform: Option<[BoundValue; 3]>,
}

/// Bounds from the prefix/tail-normalized representation, needing
/// `P_i, P_n - P_i != 0` for `i = 1..n-1`. Weights `|P_i| |P_n - P_i|`,
/// deviations `|Abar_i/Pbar_i - A_i/P_i|`.
pub fn bounds_theorem34(
    inst: &Instance,
    agg: &PrefixAggregates,
    holder: Option<HolderPair>,
) -> Theorem34Bounds {
    let pair = holder.unwrap_or_default();
    let families = [
        BoundFamily::Thm34Branch1,
        BoundFamily::Thm34Branch2,
        BoundFamily::Thm34Branch3,
    ];
    let uniform = if is_uniform_probability(inst.weights()) {
        Some(
            bounds_theorem34_uniform(inst.scalars(), inst.vectors(), inst.norm(), holder)
                .expect("instance shapes are valid"),
        )
    } else {
        None
    };

    if let Some(reason) = prefix_hypothesis_failure(agg, agg.n() - 1, true) {
        return Theorem34Bounds {
            general: [
                BoundValue::inapplicable(families[0], reason, None),
                BoundValue::inapplicable(families[1], reason, Some(pair)),
                BoundValue::inapplicable(families[2], reason, None),
            ],
            uniform,
        };
    }

    let n = agg.n();
    let deviations: Vec<f64> = (0..n - 1)
        .map(|i| {
            let prefix_mean = agg.weighted_scalar_prefix[i] / agg.weight_prefix[i];
            let tail_mean = agg.weighted_scalar_tail[i] / agg.weight_tail[i];
            (tail_mean - prefix_mean).norm()
        })
        .collect();
    let weights: Vec<f64> = (0..n - 1)
        .map(|i| (agg.weight_prefix[i] * agg.weight_tail[i]).abs())
        .collect();
    let dx = diff_norms(inst.norm(), &agg.vector_diffs);

    let weighted_dx: f64 = weights.iter().zip(&dx).map(|(w, t)| w * t).sum();
    let b1 = abs_max(&deviations) * weighted_dx;
    let b2 =
        weighted_lp_sum(&weights, &deviations, pair.q()) * weighted_lp_sum(&weights, &dx, pair.p());
    let weighted_dev: f64 = weights.iter().zip(&deviations).map(|(w, t)| w * t).sum();
    let b3 = weighted_dev * abs_max(&dx);

    Theorem34Bounds {
        general: [
            BoundValue::applicable_value(families[0], b1, None),
            BoundValue::applicable_value(families[1], b2, Some(pair)),
            BoundValue::applicable_value(families[2], b3, None),
        ],
        uniform,
    }
}

/// The uniform-weight specialization of [`bounds_theorem34`], evaluated from
/// the raw sequences: prefactor `1/n^2`, weights `i(n-i)`, deviations
/// `|mean of the last n-i - mean of the first i|`.
pub fn bounds_theorem34_uniform(
    scalars: &[Complex64],
    vectors: &[Vector],
    norm: &NormDescriptor,
    holder: Option<HolderPair>,
) -> Result<[BoundValue; 3], InstanceError> {
    let diffs = unweighted_diffs(scalars, vectors, norm)?;
    let pair = holder.unwrap_or_default();
    let n = scalars.len();

    let mut prefix_sums = Vec::with_capacity(n);
    let mut acc = Complex64::new(0.0, 0.0);
    for a in scalars {
        acc += a;
        prefix_sums.push(acc);
    }
    let total = prefix_sums[n - 1];
    let deviations: Vec<f64> = (1..n)
        .map(|i| {
            let head_mean = prefix_sums[i - 1] / i as f64;
            let tail_mean = (total - prefix_sums[i - 1]) / (n - i) as f64;
            (tail_mean - head_mean).norm()
        })
        .collect();
    let weights: Vec<f64> = (1..n).map(|i| (i * (n - i)) as f64).collect();
    let dx = &diffs.dx_norms;

    let inv_n2 = 1.0 / (n * n) as f64;
    let weighted_dx: f64 = weights.iter().zip(dx).map(|(w, t)| w * t).sum();
    let b1 = inv_n2 * abs_max(&deviations) * weighted_dx;
    let b2 = inv_n2
        * weighted_lp_sum(&weights, &deviations, pair.q())
        * weighted_lp_sum(&weights, dx, pair.p());
    let weighted_dev: f64 = weights.iter().zip(&deviations).map(|(w, t)| w * t).sum();
    let b3 = inv_n2 * weighted_dev * abs_max(dx);

    Ok([
        BoundValue::applicable_value(BoundFamily::Thm34Branch1, b1, None),
        BoundValue::applicable_value(BoundFamily::Thm34Branch2, b2, Some(pair)),
        BoundValue::applicable_value(BoundFamily::Thm34Branch3, b3, None),
    ])
}

/// Bounds from the kernel double sum; no nonvanishing hypothesis. Branch 2
/// places `q` on the kernel entries and `p` on both difference sequences.
pub fn bounds_theorem35(
    inst: &Instance,
    agg: &PrefixAggregates,
    kernel: &KernelMatrix,
    holder: Option<HolderPair>,
) -> [BoundValue; 3] {
    let pair = holder.unwrap_or_default();
    let kernel_abs: Vec<f64> = kernel.entries().iter().map(|v| v.abs()).collect();
    let da = scalar_moduli(&agg.scalar_diffs);
    let dx = diff_norms(inst.norm(), &agg.vector_diffs);

    let b1 = abs_max(&kernel_abs) * da.iter().sum::<f64>() * dx.iter().sum::<f64>();
    let b2 = lp_sum(&kernel_abs, pair.q()) * lp_sum(&da, pair.p()) * lp_sum(&dx, pair.p());
    let b3 = kernel_abs.iter().sum::<f64>() * abs_max(&da) * abs_max(&dx);

    [
        BoundValue::applicable_value(BoundFamily::Thm35Branch1, b1, None),
        BoundValue::applicable_value(BoundFamily::Thm35Branch2, b2, Some(pair)),
        BoundValue::applicable_value(BoundFamily::Thm35Branch3, b3, None),
    ]
}

/// The baseline bounds for probability weights: the index-variance branch,
/// the `(1/2) sum p(1-p)` branch, and the pair-distance branch with `p` on
/// the scalar differences and `q` on the vector differences (note the
/// transposed exponent roles relative to the determinant-route branch).
pub fn bounds_baseline(
    inst: &Instance,
    agg: &PrefixAggregates,
    holder: Option<HolderPair>,
) -> [BoundValue; 3] {
    let pair = holder.unwrap_or_default();
    let families = [
        BoundFamily::BaselineMaxMax,
        BoundFamily::BaselineSum11,
        BoundFamily::BaselineHolder,
    ];
    if !is_probability_weights(inst.weights()) {
        let reason = InapplicabilityReason::NotProbabilityWeights;
        return [
            BoundValue::inapplicable(families[0], reason, None),
            BoundValue::inapplicable(families[1], reason, None),
            BoundValue::inapplicable(families[2], reason, Some(pair)),
        ];
    }

    let weights = inst.weights();
    let n = weights.len();
    let da = scalar_moduli(&agg.scalar_diffs);
    let dx = diff_norms(inst.norm(), &agg.vector_diffs);

    // Variance of the index under the weights.
    let mut index_mean = 0.0_f64;
    let mut index_second_moment = 0.0_f64;
    let mut half_pair_mass = 0.0_f64;
    for (i, &w) in weights.iter().enumerate() {
        let idx = (i + 1) as f64;
        index_mean += idx * w;
        index_second_moment += idx * idx * w;
        half_pair_mass += w * (1.0 - w);
    }
    let index_variance = index_second_moment - index_mean * index_mean;

    // sum_{i<j} p_i p_j (j - i), folded into the single pass
    // sum_i P_i (P_n - P_i); the pair loop stays in the test oracle.
    let pair_distance_mass: f64 = (0..n - 1)
        .map(|i| agg.weight_prefix[i] * agg.weight_tail[i])
        .sum();

    let b1 = index_variance * abs_max(&da) * abs_max(&dx);
    let b2 = 0.5 * half_pair_mass * da.iter().sum::<f64>() * dx.iter().sum::<f64>();
    let b3 = pair_distance_mass * lp_sum(&da, pair.p()) * lp_sum(&dx, pair.q());

    [
        BoundValue::applicable_value(families[0], b1, None),
        BoundValue::applicable_value(families[1], b2, None),
        BoundValue::applicable_value(families[2], b3, Some(pair)),
    ]
}

struct UnweightedDiffs {
    da_moduli: Vec<f64>,
    dx_norms: Vec<f64>,
}

fn unweighted_diffs(
    scalars: &[Complex64],
    vectors: &[Vector],
    norm: &NormDescriptor,
) -> Result<UnweightedDiffs, InstanceError> {
    let n = scalars.len();
    if vectors.len() != n {
        return Err(InstanceError::PairLengthMismatch {
            scalars: n,
            vectors: vectors.len(),
        });
    }
    if n < 2 {
        return Err(InstanceError::TooShort(n));
    }
    for (index, v) in vectors.iter().enumerate() {
        if v.dimension() != norm.dimension() {
            return Err(InstanceError::NonConforming {
                index,
                source: crate::space::SpaceError::DimensionMismatch {
                    expected: norm.dimension(),
                    got: v.dimension(),
                },
            });
        }
    }
    let da_moduli = (0..n - 1)
        .map(|j| (scalars[j + 1] - scalars[j]).norm())
        .collect();
    let dx_norms = (0..n - 1)
        .map(|i| {
            norm_conforming(
                norm,
                &vectors[i + 1].sub(&vectors[i]).expect("checked dims"),
            )
        })
        .collect();
    Ok(UnweightedDiffs {
        da_moduli,
        dx_norms,
    })
}

/// Unweighted kernel-maximum bound `k_inf * sum|da| * sum||dx||`.
pub fn bound_cor36_kinf(
    scalars: &[Complex64],
    vectors: &[Vector],
    norm: &NormDescriptor,
) -> Result<BoundValue, InstanceError> {
    let diffs = unweighted_diffs(scalars, vectors, norm)?;
    let value = k_infinity(scalars.len())
        * diffs.da_moduli.iter().sum::<f64>()
        * diffs.dx_norms.iter().sum::<f64>();
    Ok(BoundValue::applicable_value(
        BoundFamily::Cor36KInf,
        value,
        None,
    ))
}

/// Unweighted kernel `l^q` bound
/// `k_q * (sum|da|^p)^(1/p) * (sum||dx||^p)^(1/p)` (both factors carry `p`).
pub fn bound_cor38_kq(
    scalars: &[Complex64],
    vectors: &[Vector],
    norm: &NormDescriptor,
    holder: Option<HolderPair>,
) -> Result<BoundValue, InstanceError> {
    let diffs = unweighted_diffs(scalars, vectors, norm)?;
    let pair = holder.unwrap_or_default();
    let kq = k_q(scalars.len(), pair.q()).expect("pair keeps q > 1");
    let value = kq * lp_sum(&diffs.da_moduli, pair.p()) * lp_sum(&diffs.dx_norms, pair.p());
    Ok(BoundValue::applicable_value(
        BoundFamily::Cor38KQ,
        value,
        Some(pair),
    ))
}

/// Unweighted closing bound `(n^2 - 1)/12 * max|da| * max||dx||`, routed
/// through the kernel-constant `k_one`.
pub fn bound_closing_maxmax(
    scalars: &[Complex64],
    vectors: &[Vector],
    norm: &NormDescriptor,
) -> Result<BoundValue, InstanceError> {
    let diffs = unweighted_diffs(scalars, vectors, norm)?;
    let value = k_one(scalars.len()) * abs_max(&diffs.da_moduli) * abs_max(&diffs.dx_norms);
    Ok(BoundValue::applicable_value(
        BoundFamily::ClosingMaxMax,
        value,
        None,
    ))
}

/// One row of an instance report: the bound, whether it holds against the
/// functional norm at the validity tolerance, and the tightness ratio.
#[derive(Debug, Clone)]
pub struct BoundEntry {
    pub bound: BoundValue,
    /// `value + 1e-10 * scale >= ||T_n||`; vacuously true when inapplicable.
    pub valid: bool,
    /// `||T_n|| / value`; `None` when inapplicable (or on the impossible
    /// `value = 0 < ||T_n||`); exactly `1.0` with the flag below when both
    /// sides are zero.
    pub ratio: Option<f64>,
    /// Both the bound and the functional norm are exactly zero.
    pub exact_equality: bool,
}

/// Per-instance evaluation of every bound family.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub t_norm: f64,
    pub scale: f64,
    pub entries: Vec<BoundEntry>,
}

impl BoundReport {
    pub fn entry(&self, family: BoundFamily) -> &BoundEntry {
        self.entries
            .iter()
            .find(|e| e.bound.family == family)
            .expect("report carries every family")
    }

    /// Number of applicable families whose bound fails against `t_norm`.
    pub fn violations(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.bound.applicable() && !e.valid)
            .count()
    }
}

fn entry_from_bound(bound: BoundValue, t_norm: f64, scale: f64) -> BoundEntry {
    match bound.value {
        None => BoundEntry {
            bound,
            valid: true,
            ratio: None,
            exact_equality: false,
        },
        Some(v) => {
            let valid = v + VALIDITY_RELATIVE_TOLERANCE * scale >= t_norm;
            let (ratio, exact_equality) = if v == 0.0 && t_norm == 0.0 {
                (Some(1.0), true)
            } else if v == 0.0 {
                (None, false)
            } else {
                (Some(t_norm / v), false)
            };
            BoundEntry {
                bound,
                valid,
                ratio,
                exact_equality,
            }
        }
    }
}

/// Evaluates the functional norm and every bound family on one instance.
///
/// The three uniform-weight families apply only when the weights are exactly
/// the uniform probability vector, where the weighted and unweighted
/// functionals coincide. Entries come back in the fixed family order.
pub fn evaluate_all(inst: &Instance, holder: Option<HolderPair>) -> BoundReport {
    let agg = aggregates(inst);
    let dets = det_coefficients(&agg);
    let kernel = kernel_matrix(&agg);
    let t_norm = norm_conforming(inst.norm(), &chebyshev_direct(inst));
    let scale = inst.scale();
    let pair = holder.unwrap_or_default();

    let mut bounds: Vec<BoundValue> = Vec::with_capacity(18);
    bounds.extend(bounds_baseline(inst, &agg, holder));
    bounds.extend(bounds_theorem31(inst, &agg, &dets, holder));
    bounds.extend(bounds_theorem33(inst, &agg, holder));
    bounds.extend(bounds_theorem34(inst, &agg, holder).general);
    bounds.extend(bounds_theorem35(inst, &agg, &kernel, holder));

    if is_uniform_probability(inst.weights()) {
        let scalars = inst.scalars();
        let vectors = inst.vectors();
        let norm = inst.norm();
        bounds.push(bound_cor36_kinf(scalars, vectors, norm).expect("valid instance"));
        bounds.push(bound_cor38_kq(scalars, vectors, norm, holder).expect("valid instance"));
        bounds.push(bound_closing_maxmax(scalars, vectors, norm).expect("valid instance"));
    } else {
        let reason = InapplicabilityReason::NotUniformWeights;
        bounds.push(BoundValue::inapplicable(
            BoundFamily::Cor36KInf,
            reason,
            None,
        ));
        bounds.push(BoundValue::inapplicable(
            BoundFamily::Cor38KQ,
            reason,
            Some(pair),
        ));
        bounds.push(BoundValue::inapplicable(
            BoundFamily::ClosingMaxMax,
            reason,
            None,
        ));
    }

    debug_assert_eq!(bounds.len(), BoundFamily::ALL.len());
    debug_assert!(bounds
        .iter()
        .zip(BoundFamily::ALL)
        .all(|(b, f)| b.family == f));

    BoundReport {
        t_norm,
        scale,
        entries: bounds
            .into_iter()
            .map(|b| entry_from_bound(b, t_norm, scale))
            .collect(),
    }
}

/// Evaluates a single family on an instance, used by the sharpness search.
pub fn single_bound(
    inst: &Instance,
    family: BoundFamily,
    holder: Option<HolderPair>,
) -> BoundValue {
    let agg = aggregates(inst);
    let branch = |values: [BoundValue; 3], idx: usize| values.into_iter().nth(idx).unwrap();
    match family {
        BoundFamily::BaselineMaxMax => branch(bounds_baseline(inst, &agg, holder), 0),
        BoundFamily::BaselineSum11 => branch(bounds_baseline(inst, &agg, holder), 1),
        BoundFamily::BaselineHolder => branch(bounds_baseline(inst, &agg, holder), 2),
        BoundFamily::Thm31MaxSum | BoundFamily::Thm31Holder | BoundFamily::Thm31SumMax => {
            let dets = det_coefficients(&agg);
            let idx = match family {
                BoundFamily::Thm31MaxSum => 0,
                BoundFamily::Thm31Holder => 1,
                _ => 2,
            };
            branch(bounds_theorem31(inst, &agg, &dets, holder), idx)
        }
        BoundFamily::Thm33Branch1 => branch(bounds_theorem33(inst, &agg, holder), 0),
        BoundFamily::Thm33Branch2 => branch(bounds_theorem33(inst, &agg, holder), 1),
        BoundFamily::Thm33Branch3 => branch(bounds_theorem33(inst, &agg, holder), 2),
        BoundFamily::Thm34Branch1 => branch(bounds_theorem34(inst, &agg, holder).general, 0),
        BoundFamily::Thm34Branch2 => branch(bounds_theorem34(inst, &agg, holder).general, 1),
        BoundFamily::Thm34Branch3 => branch(bounds_theorem34(inst, &agg, holder).general, 2),
        BoundFamily::Thm35Branch1 | BoundFamily::Thm35Branch2 | BoundFamily::Thm35Branch3 => {
            let kernel = kernel_matrix(&agg);
            let idx = match family {
                BoundFamily::Thm35Branch1 => 0,
                BoundFamily::Thm35Branch2 => 1,
                _ => 2,
            };
            branch(bounds_theorem35(inst, &agg, &kernel, holder), idx)
        }
        BoundFamily::Cor36KInf | BoundFamily::Cor38KQ | BoundFamily::ClosingMaxMax => {
            if !is_uniform_probability(inst.weights()) {
                let reason = InapplicabilityReason::NotUniformWeights;
                return BoundValue::inapplicable(family, reason, None);
            }
            let (scalars, vectors, norm) = (inst.scalars(), inst.vectors(), inst.norm());
            match family {
                BoundFamily::Cor36KInf => {
                    bound_cor36_kinf(scalars, vectors, norm).expect("valid instance")
                }
                BoundFamily::Cor38KQ => {
                    bound_cor38_kq(scalars, vectors, norm, holder).expect("valid instance")
                }
                _ => bound_closing_maxmax(scalars, vectors, norm).expect("valid instance"),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn real_instance(p: &[f64], a: &[f64], x: &[f64]) -> Instance {
        let vectors = x.iter().map(|&c| Vector::from_real(&[c])).collect();
        Instance::from_real(p.to_vec(), a, vectors, NormDescriptor::real_abs()).unwrap()
    }

    fn worked() -> Instance {
        real_instance(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0], &[1.0, 4.0, 9.0])
    }

    fn value(b: &BoundValue) -> f64 {
        b.value.expect("applicable")
    }

    #[test]
    fn theorem31_worked_values() {
        let inst = worked();
        let agg = aggregates(&inst);
        let dets = det_coefficients(&agg);
        let [b1, b2, b3] = bounds_theorem31(&inst, &agg, &dets, None);
        assert_eq!(value(&b1), 24.0);
        assert!((value(&b2) - 612.0_f64.sqrt()).abs() <= 1e-12);
        assert_eq!(value(&b3), 30.0);
    }

    #[test]
    fn theorem31_two_point_equality() {
        let inst = real_instance(&[1.0, 1.0], &[0.0, 1.0], &[0.0, 1.0]);
        let agg = aggregates(&inst);
        let dets = det_coefficients(&agg);
        for b in bounds_theorem31(&inst, &agg, &dets, None) {
            assert_eq!(value(&b), 1.0);
        }
    }

    #[test]
    fn theorem33_worked_value() {
        let inst = worked();
        let agg = aggregates(&inst);
        let [b1, _, _] = bounds_theorem33(&inst, &agg, None);
        assert!((value(&b1) - 39.0).abs() <= 1e-12);
    }

    #[test]
    fn theorem33_constant_scalars_vanish() {
        let inst = real_instance(&[1.0, 2.0, 1.0], &[5.0, 5.0, 5.0], &[1.0, 4.0, 9.0]);
        let agg = aggregates(&inst);
        for b in bounds_theorem33(&inst, &agg, None) {
            assert!(value(&b) <= 1e-12);
        }
    }

    #[test]
    fn theorem33_inapplicable_on_zero_prefix() {
        let inst = real_instance(&[1.0, -1.0, 1.0], &[1.0, 2.0, 3.0], &[1.0, 4.0, 9.0]);
        let agg = aggregates(&inst);
        for b in bounds_theorem33(&inst, &agg, None) {
            assert!(!b.applicable());
            assert_eq!(b.reason, Some(InapplicabilityReason::ZeroPartialSum(2)));
        }
    }

    #[test]
    fn corollary34_worked_value() {
        let a: Vec<Complex64> = [1.0, 2.0, 3.0]
            .iter()
            .map(|&c| Complex64::new(c, 0.0))
            .collect();
        let x: Vec<Vector> = [1.0, 4.0, 9.0]
            .iter()
            .map(|&c| Vector::from_real(&[c]))
            .collect();
        let norm = NormDescriptor::real_abs();
        let [b1, _, _] = bounds_corollary34(&a, &x, &norm, None).unwrap();
        assert!((value(&b1) - 13.0 / 3.0).abs() <= 1e-13);
        assert!(value(&b1) >= 8.0 / 3.0);
    }

    #[test]
    fn corollary34_matches_theorem33_at_uniform_weights() {
        let a = [0.3, -0.7, 0.2, 0.9];
        let x = [0.1, 0.5, -0.4, 0.8];
        let n = a.len();
        let inst = real_instance(&vec![1.0 / n as f64; n], &a, &x);
        let agg = aggregates(&inst);
        let weighted = bounds_theorem33(&inst, &agg, None);
        let unweighted =
            bounds_corollary34(inst.scalars(), inst.vectors(), inst.norm(), None).unwrap();
        for (w, u) in weighted.iter().zip(&unweighted) {
            let (w, u) = (value(w), value(u));
            assert!((w - u).abs() <= 1e-12 * w.max(u).max(1e-30), "{w} vs {u}");
        }
    }

    #[test]
    fn theorem34_worked_values() {
        let inst = worked();
        let agg = aggregates(&inst);
        let out = bounds_theorem34(&inst, &agg, None);
        assert!((value(&out.general[0]) - 24.0).abs() <= 1e-12);
        assert!(out.uniform.is_none());

        let uniform = real_instance(&[1.0 / 3.0; 3], &[1.0, 2.0, 3.0], &[1.0, 4.0, 9.0]);
        let agg = aggregates(&uniform);
        let out = bounds_theorem34(&uniform, &agg, None);
        let eq37 = out.uniform.expect("uniform weights");
        assert!((value(&eq37[0]) - 8.0 / 3.0).abs() <= 1e-14);
    }

    #[test]
    fn theorem34_uniform_specialization_matches_general() {
        let a = [0.4, -0.1, 0.7, -0.9, 0.2];
        let x = [0.6, 0.3, -0.2, 0.5, -0.8];
        let n = a.len();
        let inst = real_instance(&vec![1.0 / n as f64; n], &a, &x);
        let agg = aggregates(&inst);
        let out = bounds_theorem34(&inst, &agg, None);
        let eq37 = out.uniform.expect("uniform weights");
        for (g, u) in out.general.iter().zip(&eq37) {
            let (g, u) = (value(g), value(u));
            assert!((g - u).abs() <= 1e-12 * g.max(u).max(1e-30), "{g} vs {u}");
        }
    }

    #[test]
    fn theorem35_worked_values() {
        let inst = worked();
        let agg = aggregates(&inst);
        let kernel = kernel_matrix(&agg);
        let [b1, b2, b3] = bounds_theorem35(&inst, &agg, &kernel, None);
        assert_eq!(value(&b1), 32.0);
        assert!((value(&b2) - 680.0_f64.sqrt()).abs() <= 1e-12);
        assert_eq!(value(&b3), 30.0);
    }

    #[test]
    fn baseline_worked_values() {
        let inst = real_instance(&[1.0 / 3.0; 3], &[1.0, 2.0, 3.0], &[1.0, 4.0, 9.0]);
        let agg = aggregates(&inst);
        let [b1, b2, _] = bounds_baseline(&inst, &agg, None);
        assert!((value(&b1) - 10.0 / 3.0).abs() <= 1e-13);
        assert!((value(&b2) - 16.0 / 3.0).abs() <= 1e-13);
    }

    #[test]
    fn baseline_inapplicable_without_probability_weights() {
        let inst = worked();
        let agg = aggregates(&inst);
        for b in bounds_baseline(&inst, &agg, None) {
            assert_eq!(b.reason, Some(InapplicabilityReason::NotProbabilityWeights));
        }
    }

    #[test]
    fn baseline_constant_scalars_zero_first_two_branches() {
        let inst = real_instance(&[0.2, 0.3, 0.5], &[4.0, 4.0, 4.0], &[1.0, 4.0, 9.0]);
        let agg = aggregates(&inst);
        let [b1, b2, _] = bounds_baseline(&inst, &agg, None);
        assert_eq!(value(&b1), 0.0);
        assert_eq!(value(&b2), 0.0);
    }

    #[test]
    fn baseline_pair_mass_matches_pair_loop() {
        let p = [0.1, 0.25, 0.3, 0.2, 0.15];
        let inst = real_instance(&p, &[1.0, 2.0, 3.0, 4.0, 5.0], &[1.0, 2.0, 3.0, 4.0, 5.0]);
        let agg = aggregates(&inst);
        let single_pass: f64 = (0..p.len() - 1)
            .map(|i| agg.weight_prefix[i] * agg.weight_tail[i])
            .sum();
        let mut pair_loop = 0.0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                pair_loop += p[i] * p[j] * (j - i) as f64;
            }
        }
        assert!((single_pass - pair_loop).abs() <= 1e-14);
    }

    #[test]
    fn closing_maxmax_values() {
        let a: Vec<Complex64> = [1.0, 2.0, 3.0]
            .iter()
            .map(|&c| Complex64::new(c, 0.0))
            .collect();
        let x: Vec<Vector> = [1.0, 4.0, 9.0]
            .iter()
            .map(|&c| Vector::from_real(&[c]))
            .collect();
        let norm = NormDescriptor::real_abs();
        let b = bound_closing_maxmax(&a, &x, &norm).unwrap();
        assert!((value(&b) - 10.0 / 3.0).abs() <= 1e-14);

        let a2: Vec<Complex64> = [0.0, 1.0].iter().map(|&c| Complex64::new(c, 0.0)).collect();
        let x2: Vec<Vector> = [0.0, 1.0]
            .iter()
            .map(|&c| Vector::from_real(&[c]))
            .collect();
        let b2 = bound_closing_maxmax(&a2, &x2, &norm).unwrap();
        assert_eq!(value(&b2), 0.25);
    }

    #[test]
    fn asprinted_branch2_is_not_homogeneous() {
        // Scaling x by 100 scales the functional by 100 but the sum-then-root
        // variant by less, so the variant must diverge from the power-mean
        // form under scaling.
        let inst = worked();
        let agg = aggregates(&inst);
        let corrected = value(&bounds_theorem33(&inst, &agg, None)[1]);
        let printed = bounds_theorem33_branch2_asprinted(&inst, &agg, None).unwrap();
        assert!(printed != corrected);

        let scaled = real_instance(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0], &[100.0, 400.0, 900.0]);
        let agg_scaled = aggregates(&scaled);
        let corrected_scaled = value(&bounds_theorem33(&scaled, &agg_scaled, None)[1]);
        let printed_scaled =
            bounds_theorem33_branch2_asprinted(&scaled, &agg_scaled, None).unwrap();
        assert!((corrected_scaled - 100.0 * corrected).abs() <= 1e-9 * corrected_scaled);
        assert!(printed_scaled < corrected_scaled / 5.0);
    }

    #[test]
    fn evaluate_all_worked_instance() {
        let report = evaluate_all(&worked(), None);
        assert_eq!(report.t_norm, 24.0);
        assert_eq!(report.violations(), 0);
        assert_eq!(
            report.entry(BoundFamily::Thm31MaxSum).bound.value,
            Some(24.0)
        );
        assert_eq!(report.entry(BoundFamily::Thm31MaxSum).ratio, Some(1.0));
        assert!(!report.entry(BoundFamily::BaselineMaxMax).bound.applicable());
        assert!(!report.entry(BoundFamily::Cor36KInf).bound.applicable());
        for (entry, family) in report.entries.iter().zip(BoundFamily::ALL) {
            assert_eq!(entry.bound.family, family);
        }
    }

    #[test]
    fn evaluate_all_zero_functional_flags_exact_equality() {
        let inst = real_instance(&[1.0, 1.0, 1.0], &[5.0, 5.0, 5.0], &[1.0, 4.0, 9.0]);
        let report = evaluate_all(&inst, None);
        assert_eq!(report.t_norm, 0.0);
        assert_eq!(report.violations(), 0);
        let entry = report.entry(BoundFamily::Thm31MaxSum);
        assert_eq!(entry.ratio, Some(1.0));
        assert!(entry.exact_equality);
    }

    #[test]
    fn evaluate_all_uniform_includes_kernel_constant_families() {
        let inst = real_instance(&[0.25; 4], &[1.0, -1.0, 2.0, 0.5], &[0.3, 0.9, -0.4, 0.1]);
        let report = evaluate_all(&inst, None);
        assert_eq!(report.violations(), 0);
        assert!(report.entry(BoundFamily::Cor36KInf).bound.applicable());
        assert!(report.entry(BoundFamily::Cor38KQ).bound.applicable());
        assert!(report.entry(BoundFamily::ClosingMaxMax).bound.applicable());
        assert!(report.entry(BoundFamily::BaselineMaxMax).bound.applicable());
    }

    #[test]
    fn holder_limits_bridge_branches() {
        let inst = worked();
        let agg = aggregates(&inst);
        let dets = det_coefficients(&agg);

        let toward_branch3 = HolderPair::from_p(1e6).unwrap();
        let [_, b2, b3] = bounds_theorem31(&inst, &agg, &dets, Some(toward_branch3));
        assert!((value(&b2) - value(&b3)).abs() <= 0.01 * value(&b3));

        let toward_branch1 = HolderPair::from_p(1.0 + 1e-6).unwrap();
        let [b1, b2, _] = bounds_theorem31(&inst, &agg, &dets, Some(toward_branch1));
        assert!((value(&b2) - value(&b1)).abs() <= 0.01 * value(&b1));
    }

    #[test]
    fn domination_kinf_below_baseline_sum_branch() {
        let a = [0.3, -0.5, 0.8, 0.1];
        let x = [0.2, 0.7, -0.6, 0.4];
        let n = a.len();
        let inst = real_instance(&vec![1.0 / n as f64; n], &a, &x);
        let report = evaluate_all(&inst, None);
        let kinf = report.entry(BoundFamily::Cor36KInf).bound.value.unwrap();
        let sum11 = report
            .entry(BoundFamily::BaselineSum11)
            .bound
            .value
            .unwrap();
        assert!(kinf <= sum11 * (1.0 + 1e-12));
    }

    #[test]
    fn family_tokens_round_trip() {
        for family in BoundFamily::ALL {
            assert_eq!(family.token().parse::<BoundFamily>().unwrap(), family);
        }
        assert!("thm99_branch9".parse::<BoundFamily>().is_err());
    }

    #[test]
    fn holder_pair_validation() {
        assert!(HolderPair::from_p(1.0).is_err());
        assert!(HolderPair::from_p(f64::INFINITY).is_err());
        let pair = HolderPair::from_p(3.0).unwrap();
        assert!((pair.q() - 1.5).abs() <= 1e-15);
        assert!(HolderPair::new(2.0, 2.0).is_ok());
        assert!(HolderPair::new(2.0, 3.0).is_err());
    }

    fn entry() -> impl Strategy<Value = f64> {
        -1.0f64..1.0
    }

    fn triple(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
        (
            proptest::collection::vec(entry(), n),
            proptest::collection::vec(entry(), n),
            proptest::collection::vec(entry(), n),
        )
    }

    proptest! {
        #[test]
        fn bounds_are_valid_on_random_instances((p, a, x) in (2usize..9).prop_flat_map(triple)) {
            let inst = real_instance(&p, &a, &x);
            let report = evaluate_all(&inst, None);
            prop_assert_eq!(report.violations(), 0);
        }

        #[test]
        fn bounds_are_valid_on_uniform_instances((_, a, x) in (2usize..9).prop_flat_map(triple)) {
            let n = a.len();
            let inst = real_instance(&vec![1.0 / n as f64; n], &a, &x);
            let report = evaluate_all(&inst, None);
            prop_assert_eq!(report.violations(), 0);

            // Kernel-max domination against the baseline sum branch.
            let kinf = report.entry(BoundFamily::Cor36KInf).bound.value.unwrap();
            let sum11 = report.entry(BoundFamily::BaselineSum11).bound.value.unwrap();
            prop_assert!(kinf <= sum11 * (1.0 + 1e-12) + 1e-300);
        }

        #[test]
        fn bounds_scale_linearly_in_x((p, a, x) in (2usize..8).prop_flat_map(triple), lambda in 0.1f64..10.0) {
            let base = evaluate_all(&real_instance(&p, &a, &x), None);
            let scaled_x: Vec<f64> = x.iter().map(|v| lambda * v).collect();
            let scaled = evaluate_all(&real_instance(&p, &a, &scaled_x), None);
            prop_assert!((scaled.t_norm - lambda * base.t_norm).abs()
                <= 1e-12 * (1.0 + scaled.t_norm.max(lambda * base.t_norm)));
            for (b, s) in base.entries.iter().zip(&scaled.entries) {
                if let (Some(bv), Some(sv)) = (b.bound.value, s.bound.value) {
                    prop_assert!((sv - lambda * bv).abs() <= 1e-12 * (1.0 + sv.max(lambda * bv)),
                        "{:?}: {} vs {}", b.bound.family, sv, lambda * bv);
                }
            }
        }
    }
}

//! Direct evaluation of the weighted Chebyshev functional
//! `T_n(p;a,x) = P_n * sum p_i a_i x_i - (sum p_i a_i) * (sum p_i x_i)`
//! and the prefix/difference aggregates that every identity and bound
//! consumes.
//!
//! Summation is plain left-to-right throughout (no pairwise or compensated
//! schemes) so cross-checks between the equivalent representations see
//! reproducible rounding.

use num_complex::Complex64;

use crate::space::{Instance, InstanceError, Vector};

/// Prefix sums, tail sums and forward differences of one instance.
///
/// Using 1-based math indices: `weight_prefix[i-1] = P_i`,
/// `weight_tail[i-1] = P_n - P_i`, `weighted_scalar_prefix[i-1] = A_i`,
/// `weighted_scalar_tail[i-1] = A_n - A_i`, `scalar_diffs[j-1] = a_{j+1} - a_j`
/// and `vector_diffs[i-1] = x_{i+1} - x_i`.
#[derive(Debug, Clone)]
pub struct PrefixAggregates {
    /// `P_i` for `i = 1..n`.
    pub weight_prefix: Vec<f64>,
    /// `P_n - P_i` for `i = 1..n-1`.
    pub weight_tail: Vec<f64>,
    /// `A_i = sum_{k<=i} p_k a_k` for `i = 1..n`.
    pub weighted_scalar_prefix: Vec<Complex64>,
    /// `A_n - A_i` for `i = 1..n-1`.
    pub weighted_scalar_tail: Vec<Complex64>,
    /// Forward differences of the scalar sequence, length `n-1`.
    pub scalar_diffs: Vec<Complex64>,
    /// Forward differences of the vector sequence, length `n-1`.
    pub vector_diffs: Vec<Vector>,
    /// `sum |p_k|`, the scale used by near-zero partial-sum guards.
    pub weight_abs_sum: f64,
}

impl PrefixAggregates {
    pub fn n(&self) -> usize {
        self.weight_prefix.len()
    }

    /// `P_n`.
    pub fn weight_total(&self) -> f64 {
        self.weight_prefix[self.n() - 1]
    }

    /// `A_n`.
    pub fn weighted_scalar_total(&self) -> Complex64 {
        self.weighted_scalar_prefix[self.n() - 1]
    }
}

/// Builds every prefix/tail/difference aggregate in one left-to-right pass.
pub fn aggregates(inst: &Instance) -> PrefixAggregates {
    let n = inst.len();
    let p = inst.weights();
    let a = inst.scalars();
    let x = inst.vectors();

    let mut weight_prefix = Vec::with_capacity(n);
    let mut weighted_scalar_prefix = Vec::with_capacity(n);
    let mut scalar_diffs = Vec::with_capacity(n - 1);
    let mut vector_diffs = Vec::with_capacity(n - 1);
    let mut running_weight = 0.0_f64;
    let mut running_weighted_scalar = Complex64::new(0.0, 0.0);
    let mut weight_abs_sum = 0.0_f64;

    for i in 0..n {
        running_weight += p[i];
        running_weighted_scalar += p[i] * a[i];
        weight_abs_sum += p[i].abs();
        weight_prefix.push(running_weight);
        weighted_scalar_prefix.push(running_weighted_scalar);
        if i + 1 < n {
            scalar_diffs.push(a[i + 1] - a[i]);
            vector_diffs.push(x[i + 1].sub(&x[i]).expect("instance vectors conform"));
        }
    }

    let total_weight = weight_prefix[n - 1];
    let total_weighted_scalar = weighted_scalar_prefix[n - 1];
    let weight_tail = weight_prefix[..n - 1]
        .iter()
        .map(|pi| total_weight - pi)
        .collect();
    let weighted_scalar_tail = weighted_scalar_prefix[..n - 1]
        .iter()
        .map(|ai| total_weighted_scalar - ai)
        .collect();

    PrefixAggregates {
        weight_prefix,
        weight_tail,
        weighted_scalar_prefix,
        weighted_scalar_tail,
        scalar_diffs,
        vector_diffs,
        weight_abs_sum,
    }
}

/// `T_n(p;a,x)` evaluated straight from the definition.
///
/// The result lives in the ambient space, or in its complexification when the
/// scalar sequence is complex and the vectors are real.
pub fn chebyshev_direct(inst: &Instance) -> Vector {
    let n = inst.len();
    let p = inst.weights();
    let a = inst.scalars();
    let x = inst.vectors();
    let d = inst.norm().dimension();

    let mut weighted_products = Vector::zeros(d); // sum p_i a_i x_i
    let mut weighted_vectors = Vector::zeros(d); // sum p_i x_i
    let mut weighted_scalars = Complex64::new(0.0, 0.0); // sum p_i a_i
    let mut weight_total = 0.0_f64; // P_n
    for i in 0..n {
        weighted_products.add_scaled(p[i] * a[i], &x[i]);
        weighted_vectors.add_scaled(Complex64::new(p[i], 0.0), &x[i]);
        weighted_scalars += p[i] * a[i];
        weight_total += p[i];
    }

    let coords = weighted_products
        .coords()
        .iter()
        .zip(weighted_vectors.coords())
        .map(|(s1, s2)| weight_total * s1 - weighted_scalars * s2)
        .collect();
    Vector::from_complex(coords)
}

/// The unweighted functional
/// `(1/n) sum a_i x_i - (1/n) sum a_i * (1/n) sum x_i`.
///
/// Agrees with [`chebyshev_direct`] at weights `p_i = 1/n` up to rounding.
pub fn chebyshev_unweighted(
    scalars: &[Complex64],
    vectors: &[Vector],
) -> Result<Vector, InstanceError> {
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
    let d = vectors[0].dimension();
    for v in vectors {
        if v.dimension() != d {
            return Err(InstanceError::PairLengthMismatch {
                scalars: n,
                vectors: vectors.len(),
            });
        }
    }

    let inv = 1.0 / n as f64;
    let mut products = Vector::zeros(d); // sum a_i x_i
    let mut vector_sum = Vector::zeros(d);
    let mut scalar_sum = Complex64::new(0.0, 0.0);
    for (ai, xi) in scalars.iter().zip(vectors) {
        products.add_scaled(*ai, xi);
        vector_sum.add_scaled(Complex64::new(1.0, 0.0), xi);
        scalar_sum += ai;
    }
    let scalar_mean = inv * scalar_sum;
    let coords = products
        .coords()
        .iter()
        .zip(vector_sum.coords())
        .map(|(sp, sv)| inv * sp - scalar_mean * (inv * sv))
        .collect();
    Ok(Vector::from_complex(coords))
}

//! Equivalent representations of the Chebyshev functional built by summation
//! by parts: the determinant-coefficient form, two normalized variants, and
//! the symmetric-kernel double sum. Each is an independent evaluator used to
//! cross-validate [`chebyshev_direct`](crate::functional::chebyshev_direct).

use num_complex::Complex64;
use thiserror::Error;

use crate::functional::PrefixAggregates;
use crate::space::Vector;

/// Relative threshold below which a partial sum counts as zero: an identity
/// that divides by `P_i` refuses inputs with `|P_i| <= guard * sum|p_k|`.
pub const DEFAULT_ZERO_GUARD: f64 = 1e-13;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdentityError {
    /// `P_i` vanishes (1-based index), so the representation's hypothesis
    /// fails on this instance.
    #[error("partial sum P_{0} is numerically zero")]
    ZeroPartialSum(usize),
    /// `P_n - P_i` vanishes (1-based index).
    #[error("tail sum P_{0} (from the right) is numerically zero")]
    ZeroTailSum(usize),
}

/// The coefficients `det_i = P_i * A_n - P_n * A_i`, `i = 1..n-1`, through
/// which the functional is a weighted sum of vector differences.
#[derive(Debug, Clone)]
pub struct DetCoefficients {
    pub dets: Vec<Complex64>,
}

/// The symmetric grid `K(i,j) = P_min{i,j} * (P_n - P_max{i,j})` on
/// `{1..n-1}^2`, stored dense in row-major order.
///
/// Memory is O(n^2); instances here are desk-scale and the double-sum bounds
/// need the full grid anyway.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl KernelMatrix {
    /// Grid side length, `n - 1`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Entry at 0-based `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// `det_i = P_i * A_n - P_n * A_i` for `i = 1..n-1`.
pub fn det_coefficients(agg: &PrefixAggregates) -> DetCoefficients {
    let n = agg.n();
    let total_weight = agg.weight_total();
    let total_scalar = agg.weighted_scalar_total();
    let dets = (0..n - 1)
        .map(|i| agg.weight_prefix[i] * total_scalar - total_weight * agg.weighted_scalar_prefix[i])
        .collect();
    DetCoefficients { dets }
}

/// First representation: `sum_i det_i * (x_{i+1} - x_i)`.
pub fn chebyshev_identity1(agg: &PrefixAggregates) -> Vector {
    let dets = det_coefficients(agg);
    let mut acc = Vector::zeros(agg.vector_diffs[0].dimension());
    for (det, dx) in dets.dets.iter().zip(&agg.vector_diffs) {
        acc.add_scaled(*det, dx);
    }
    acc
}

fn check_prefix_nonzero(
    agg: &PrefixAggregates,
    upto: usize,
    guard: f64,
) -> Result<(), IdentityError> {
    let threshold = guard * agg.weight_abs_sum;
    for (i, pi) in agg.weight_prefix[..upto].iter().enumerate() {
        if pi.abs() <= threshold {
            return Err(IdentityError::ZeroPartialSum(i + 1));
        }
    }
    Ok(())
}

/// Second representation:
/// `P_n * sum_i P_i * (A_n/P_n - A_i/P_i) * (x_{i+1} - x_i)`,
/// defined when `P_i != 0` for every `i = 1..n`.
pub fn chebyshev_identity2(agg: &PrefixAggregates) -> Result<Vector, IdentityError> {
    chebyshev_identity2_guarded(agg, DEFAULT_ZERO_GUARD)
}

/// [`chebyshev_identity2`] with an explicit relative near-zero guard.
pub fn chebyshev_identity2_guarded(
    agg: &PrefixAggregates,
    guard: f64,
) -> Result<Vector, IdentityError> {
    let n = agg.n();
    check_prefix_nonzero(agg, n, guard)?;

    let total_weight = agg.weight_total();
    let global_mean = agg.weighted_scalar_total() / total_weight;
    let mut acc = Vector::zeros(agg.vector_diffs[0].dimension());
    for i in 0..n - 1 {
        let prefix_mean = agg.weighted_scalar_prefix[i] / agg.weight_prefix[i];
        let coeff = agg.weight_prefix[i] * (global_mean - prefix_mean);
        acc.add_scaled(coeff, &agg.vector_diffs[i]);
    }
    Ok(acc.scale(Complex64::new(total_weight, 0.0)))
}

/// Third representation:
/// `sum_i P_i * Pbar_i * (Abar_i/Pbar_i - A_i/P_i) * (x_{i+1} - x_i)`,
/// defined when `P_i != 0` and `P_n - P_i != 0` for `i = 1..n-1`.
pub fn chebyshev_identity3(agg: &PrefixAggregates) -> Result<Vector, IdentityError> {
    chebyshev_identity3_guarded(agg, DEFAULT_ZERO_GUARD)
}

/// [`chebyshev_identity3`] with an explicit relative near-zero guard.
pub fn chebyshev_identity3_guarded(
    agg: &PrefixAggregates,
    guard: f64,
) -> Result<Vector, IdentityError> {
    let n = agg.n();
    let threshold = guard * agg.weight_abs_sum;
    for i in 0..n - 1 {
        if agg.weight_prefix[i].abs() <= threshold {
            return Err(IdentityError::ZeroPartialSum(i + 1));
        }
        if agg.weight_tail[i].abs() <= threshold {
            return Err(IdentityError::ZeroTailSum(i + 1));
        }
    }

    let mut acc = Vector::zeros(agg.vector_diffs[0].dimension());
    for i in 0..n - 1 {
        let prefix_mean = agg.weighted_scalar_prefix[i] / agg.weight_prefix[i];
        let tail_mean = agg.weighted_scalar_tail[i] / agg.weight_tail[i];
        let coeff = agg.weight_prefix[i] * agg.weight_tail[i] * (tail_mean - prefix_mean);
        acc.add_scaled(coeff, &agg.vector_diffs[i]);
    }
    Ok(acc)
}

/// Materializes `K(i,j) = P_min{i,j} * (P_n - P_max{i,j})`; each unordered
/// pair is computed once, so symmetry holds exactly.
pub fn kernel_matrix(agg: &PrefixAggregates) -> KernelMatrix {
    let m = agg.n() - 1;
    let mut entries = vec![0.0_f64; m * m];
    for i in 0..m {
        for j in i..m {
            let v = agg.weight_prefix[i] * agg.weight_tail[j];
            entries[i * m + j] = v;
            entries[j * m + i] = v;
        }
    }
    KernelMatrix { size: m, entries }
}

/// Fourth representation, the kernel double sum
/// `sum_i sum_j K(i,j) * (a_{j+1} - a_j) * (x_{i+1} - x_i)`.
///
/// Needs no nonvanishing hypothesis. Rows are summed left-to-right and added
/// in index order.
pub fn chebyshev_double_sum(agg: &PrefixAggregates) -> Vector {
    let kernel = kernel_matrix(agg);
    let m = kernel.size();
    let mut acc = Vector::zeros(agg.vector_diffs[0].dimension());
    for i in 0..m {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..m {
            row += kernel.get(i, j) * agg.scalar_diffs[j];
        }
        acc.add_scaled(row, &agg.vector_diffs[i]);
    }
    acc
}

/// Self-test of the kernel identity `det_i = sum_j K(i,j) * (a_{j+1} - a_j)`:
/// returns `max_i |det_i - sum_j K(i,j) da_j|`, expected to be tiny relative
/// to the instance scale.
pub fn lemma_kernel_identity_check(agg: &PrefixAggregates) -> f64 {
    let dets = det_coefficients(agg);
    let kernel = kernel_matrix(agg);
    let m = kernel.size();
    let mut worst = 0.0_f64;
    for i in 0..m {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..m {
            row += kernel.get(i, j) * agg.scalar_diffs[j];
        }
        worst = worst.max((dets.dets[i] - row).norm());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::{aggregates, chebyshev_direct};
    use crate::space::{Instance, NormDescriptor};
    use proptest::prelude::*;

    fn real_instance(p: &[f64], a: &[f64], x: &[f64]) -> Instance {
        let vectors = x.iter().map(|&c| Vector::from_real(&[c])).collect();
        Instance::from_real(p.to_vec(), a, vectors, NormDescriptor::real_abs()).unwrap()
    }

    fn re(v: &Vector) -> f64 {
        v.coords()[0].re
    }

    #[test]
    fn det_coefficients_worked_example() {
        let agg = aggregates(&real_instance(
            &[1.0, 1.0, 1.0],
            &[1.0, 2.0, 3.0],
            &[0.0, 0.0, 0.0],
        ));
        let dets = det_coefficients(&agg);
        assert_eq!(dets.dets[0].re, 3.0);
        assert_eq!(dets.dets[1].re, 3.0);
    }

    #[test]
    fn det_coefficients_constant_scalars_vanish() {
        let agg = aggregates(&real_instance(
            &[0.5, -1.0, 2.0],
            &[7.0, 7.0, 7.0],
            &[0.0, 0.0, 0.0],
        ));
        for det in det_coefficients(&agg).dets {
            assert!(det.norm() <= 1e-14);
        }
    }

    #[test]
    fn det_coefficient_two_point_form() {
        // det_1 = p1 p2 (a2 - a1)
        let agg = aggregates(&real_instance(&[0.3, -0.8], &[1.0, 4.0], &[0.0, 0.0]));
        let expected = 0.3 * (-0.8) * 3.0;
        assert!((det_coefficients(&agg).dets[0].re - expected).abs() <= 1e-15);
    }

    #[test]
    fn identity1_worked_example() {
        let agg = aggregates(&real_instance(
            &[1.0, 1.0, 1.0],
            &[1.0, 2.0, 3.0],
            &[1.0, 4.0, 9.0],
        ));
        assert_eq!(re(&chebyshev_identity1(&agg)), 24.0);
    }

    #[test]
    fn identity1_constant_vectors_vanish() {
        let agg = aggregates(&real_instance(
            &[1.0, -2.0, 3.0],
            &[1.0, 2.0, 5.0],
            &[4.0, 4.0, 4.0],
        ));
        assert_eq!(re(&chebyshev_identity1(&agg)), 0.0);
    }

    #[test]
    fn identity2_worked_example() {
        let agg = aggregates(&real_instance(
            &[1.0, 1.0, 1.0],
            &[1.0, 2.0, 3.0],
            &[1.0, 4.0, 9.0],
        ));
        assert!((re(&chebyshev_identity2(&agg).unwrap()) - 24.0).abs() <= 1e-12);
    }

    #[test]
    fn identity2_rejects_zero_partial_sum() {
        let agg = aggregates(&real_instance(
            &[1.0, -1.0, 1.0],
            &[1.0, 2.0, 3.0],
            &[1.0, 4.0, 9.0],
        ));
        assert_eq!(
            chebyshev_identity2(&agg).unwrap_err(),
            IdentityError::ZeroPartialSum(2)
        );
    }

    #[test]
    fn identity3_worked_example() {
        let agg = aggregates(&real_instance(
            &[1.0, 1.0, 1.0],
            &[1.0, 2.0, 3.0],
            &[1.0, 4.0, 9.0],
        ));
        assert!((re(&chebyshev_identity3(&agg).unwrap()) - 24.0).abs() <= 1e-12);
    }

    #[test]
    fn identity3_constant_scalars_vanish() {
        let agg = aggregates(&real_instance(
            &[1.0, 2.0, 1.0],
            &[3.0, 3.0, 3.0],
            &[1.0, 4.0, 9.0],
        ));
        assert!(re(&chebyshev_identity3(&agg).unwrap()).abs() <= 1e-13);
    }

    #[test]
    fn identity3_rejects_zero_tail_sum() {
        // P = (1, 2, 0, 1), so the tail P_4 - P_1 vanishes.
        let agg = aggregates(&real_instance(
            &[1.0, 1.0, -2.0, 1.0],
            &[1.0, 2.0, 3.0, 4.0],
            &[1.0, 4.0, 9.0, 16.0],
        ));
        assert_eq!(
            chebyshev_identity3(&agg).unwrap_err(),
            IdentityError::ZeroTailSum(1)
        );
    }

    #[test]
    fn kernel_worked_example() {
        let agg = aggregates(&real_instance(
            &[1.0, 1.0, 1.0],
            &[0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0],
        ));
        let k = kernel_matrix(&agg);
        assert_eq!(k.size(), 2);
        assert_eq!(
            (k.get(0, 0), k.get(0, 1), k.get(1, 0), k.get(1, 1)),
            (2.0, 1.0, 1.0, 2.0)
        );
    }

    #[test]
    fn kernel_two_point_single_entry() {
        let agg = aggregates(&real_instance(&[0.4, 0.6], &[0.0, 0.0], &[0.0, 0.0]));
        let k = kernel_matrix(&agg);
        assert_eq!(k.size(), 1);
        assert!((k.get(0, 0) - 0.24).abs() <= 1e-16);
    }

    #[test]
    fn kernel_uniform_weights_close_to_grid_formula() {
        for n in 2..=6usize {
            let p = vec![1.0 / n as f64; n];
            let zeros = vec![0.0; n];
            let agg = aggregates(&real_instance(&p, &zeros, &zeros));
            let k = kernel_matrix(&agg);
            for i in 1..n {
                for j in 1..n {
                    let expected = (i.min(j) * (n - i.max(j))) as f64 / (n * n) as f64;
                    let got = k.get(i - 1, j - 1);
                    assert!(
                        (got - expected).abs() <= 1e-15,
                        "n={n} i={i} j={j}: {got} vs {expected}"
                    );
                }
            }
        }
    }

    #[test]
    fn double_sum_worked_example() {
        let agg = aggregates(&real_instance(
            &[1.0, 1.0, 1.0],
            &[1.0, 2.0, 3.0],
            &[1.0, 4.0, 9.0],
        ));
        assert_eq!(re(&chebyshev_double_sum(&agg)), 24.0);
    }

    #[test]
    fn lemma_check_worked_example() {
        let agg = aggregates(&real_instance(
            &[1.0, 1.0, 1.0],
            &[1.0, 2.0, 3.0],
            &[0.0, 0.0, 0.0],
        ));
        assert_eq!(lemma_kernel_identity_check(&agg), 0.0);
    }

    #[test]
    fn misprinted_kernel_index_breaks_the_identity() {
        // Shifting the tail index from max{i,j} to max{i,j}+1 (with the
        // convention that the full tail sum is zero) must visibly break the
        // det/kernel identity on a fixed instance.
        let agg = aggregates(&real_instance(
            &[1.0, 1.0, 1.0],
            &[1.0, 2.0, 3.0],
            &[0.0, 0.0, 0.0],
        ));
        let dets = det_coefficients(&agg);
        let n = agg.n();
        let mut tail_shifted = agg.weight_tail.clone();
        tail_shifted.push(0.0); // P_n - P_n
        let mut worst = 0.0_f64;
        for i in 0..n - 1 {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..n - 1 {
                let k = agg.weight_prefix[i.min(j)] * tail_shifted[i.max(j) + 1];
                row += k * agg.scalar_diffs[j];
            }
            worst = worst.max((dets.dets[i] - row).norm());
        }
        assert!(
            worst > 0.1,
            "misprinted index must not satisfy the identity"
        );
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
        fn four_way_agreement((p, a, x) in (2usize..10).prop_flat_map(triple)) {
            let inst = real_instance(&p, &a, &x);
            let agg = aggregates(&inst);
            let scale = inst.scale().max(1.0);
            let direct = re(&chebyshev_direct(&inst));

            let id1 = re(&chebyshev_identity1(&agg));
            prop_assert!((id1 - direct).abs() <= 1e-10 * scale);

            let dbl = re(&chebyshev_double_sum(&agg));
            prop_assert!((dbl - direct).abs() <= 1e-10 * scale);

            if let Ok(v) = chebyshev_identity2(&agg) {
                prop_assert!((re(&v) - direct).abs() <= 1e-10 * scale);
            }
            if let Ok(v) = chebyshev_identity3(&agg) {
                prop_assert!((re(&v) - direct).abs() <= 1e-10 * scale);
            }

            prop_assert!(lemma_kernel_identity_check(&agg) <= 1e-10 * scale);
        }

        #[test]
        fn kernel_symmetry((p, a, x) in (2usize..10).prop_flat_map(triple)) {
            let agg = aggregates(&real_instance(&p, &a, &x));
            let k = kernel_matrix(&agg);
            for i in 0..k.size() {
                for j in 0..k.size() {
                    prop_assert_eq!(k.get(i, j), k.get(j, i));
                }
            }
        }
    }
}

//! Aggregates of the uniform-weight kernel `min{i,j} * (n - max{i,j}) / n^2`
//! over the grid `{1..n-1}^2`: its maximum `k_inf`, its `l^q` mass `k_q`, and
//! its total mass `k_one`.
//!
//! `k_inf` and `k_q` are computed by brute force over the grid — that is the
//! definition — while `k_one` has the closed form `(n^2 - 1) / 12`, asserted
//! against the grid sum in tests.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConstantsError {
    #[error("q must satisfy q > 1, got {0}")]
    InvalidQ(f64),
}

/// `max_{1<=i,j<=n-1} min{i,j} * (n - max{i,j}) / n^2`. At most `1/4`, and at
/// most `(1/2)(1 - 1/n)`.
pub fn k_infinity(n: usize) -> f64 {
    assert!(n >= 2, "kernel constants need n >= 2");
    let mut best = 0u64;
    for i in 1..n as u64 {
        for j in 1..n as u64 {
            best = best.max(i.min(j) * (n as u64 - i.max(j)));
        }
    }
    best as f64 / (n * n) as f64
}

/// `(1/n^2) * (sum_{i,j} [min{i,j} * (n - max{i,j})]^q)^(1/q)` for real
/// `q > 1`. At most `(1/4) * (n-1)^(2/q)`.
pub fn k_q(n: usize, q: f64) -> Result<f64, ConstantsError> {
    assert!(n >= 2, "kernel constants need n >= 2");
    if !q.is_finite() || q <= 1.0 {
        return Err(ConstantsError::InvalidQ(q));
    }
    let mut sum = 0.0_f64;
    for i in 1..n as u64 {
        for j in 1..n as u64 {
            let cell = (i.min(j) * (n as u64 - i.max(j))) as f64;
            sum += cell.powf(q);
        }
    }
    Ok(sum.powf(q.recip()) / (n * n) as f64)
}

/// [`k_q`] through the symmetry-reduced sum
/// `2 * sum_{i<j} i^q (n-j)^q + sum_i i^q (n-i)^q`; agrees with the full
/// double sum up to rounding and serves as its cross-check.
pub fn k_q_symmetric(n: usize, q: f64) -> Result<f64, ConstantsError> {
    assert!(n >= 2, "kernel constants need n >= 2");
    if !q.is_finite() || q <= 1.0 {
        return Err(ConstantsError::InvalidQ(q));
    }
    let mut off_diagonal = 0.0_f64;
    for i in 1..n as u64 {
        for j in (i + 1)..n as u64 {
            off_diagonal += (i as f64).powf(q) * ((n as u64 - j) as f64).powf(q);
        }
    }
    let mut diagonal = 0.0_f64;
    for i in 1..n as u64 {
        diagonal += (i as f64).powf(q) * ((n as u64 - i) as f64).powf(q);
    }
    Ok((2.0 * off_diagonal + diagonal).powf(q.recip()) / (n * n) as f64)
}

/// `(1/n^2) * sum_{i,j} min{i,j} * (n - max{i,j}) = (n^2 - 1) / 12`.
pub fn k_one(n: usize) -> f64 {
    assert!(n >= 2, "kernel constants need n >= 2");
    ((n * n - 1) as f64) / 12.0
}

/// The grid-sum route to [`k_one`], kept as its independent evaluator.
pub fn k_one_grid(n: usize) -> f64 {
    assert!(n >= 2, "kernel constants need n >= 2");
    let mut sum = 0u64;
    for i in 1..n as u64 {
        for j in 1..n as u64 {
            sum += i.min(j) * (n as u64 - i.max(j));
        }
    }
    sum as f64 / (n * n) as f64
}

/// The kernel constants of one grid size, with `k_q` computed on demand.
#[derive(Debug, Clone, Copy)]
pub struct KernelConstants {
    pub n: usize,
    pub k_inf: f64,
    pub k_one: f64,
}

impl KernelConstants {
    pub fn new(n: usize) -> Self {
        KernelConstants {
            n,
            k_inf: k_infinity(n),
            k_one: k_one(n),
        }
    }

    pub fn k_q(&self, q: f64) -> Result<f64, ConstantsError> {
        k_q(self.n, q)
    }
}

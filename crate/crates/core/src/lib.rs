//! Weighted discrete Chebyshev functional for sequences of vectors in normed
//! linear spaces.
//!
//! For weights `p`, scalars `a` (real or complex) and vectors `x` in an
//! `l^p` space, the complex plane or the real line, the crate evaluates
//!
//! ```text
//! T_n(p; a, x) = P_n * sum_i p_i a_i x_i - (sum_i p_i a_i) * (sum_i p_i x_i)
//! ```
//!
//! through four independent representations (the definition, two
//! prefix-normalized summation-by-parts forms, and a symmetric-kernel double
//! sum), evaluates eighteen upper-bound families for `||T_n||` with
//! per-instance validity and tightness reporting, computes the uniform-weight
//! kernel constants `k_1 = (n^2-1)/12`, `k_q` and `k_inf <= 1/4` with their
//! caps, and searches for extremal instances witnessing that the bound
//! constants cannot be improved.
//!
//! The floating-point pipeline is cross-checked by an exact-rational oracle
//! ([`oracle`]) on losslessly convertible instances, and by seeded random
//! ensembles ([`ensemble`], [`report`]) whose reports are byte-deterministic
//! for a fixed configuration.

pub mod bounds;
pub mod constants;
pub mod ensemble;
pub mod functional;
pub mod identities;
pub mod json;
pub mod oracle;
pub mod report;
pub mod search;
pub mod space;

pub use bounds::{
    evaluate_all, single_bound, BoundFamily, BoundReport, BoundValue, HolderPair,
    InapplicabilityReason,
};
pub use constants::{k_infinity, k_one, k_q, KernelConstants};
pub use ensemble::{generate_instance, EnsembleConfig, ScalarMode, WeightMode};
pub use functional::{aggregates, chebyshev_direct, chebyshev_unweighted, PrefixAggregates};
pub use identities::{
    chebyshev_double_sum, chebyshev_identity1, chebyshev_identity2, chebyshev_identity3,
    det_coefficients, kernel_matrix, lemma_kernel_identity_check, IdentityError, KernelMatrix,
};
pub use report::{run_report, to_json_string, EnsembleReport, InstanceReport};
pub use search::{sharpness_search, SharpnessResult, DEFAULT_SEARCH_BUDGET};
pub use space::{Instance, LpExponent, NormDescriptor, Vector};

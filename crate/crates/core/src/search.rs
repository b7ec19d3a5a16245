//! Randomized extremal search for tightness witnesses.
//!
//! The objective `||T_n|| / bound` is maximized by derivative-free coordinate
//! perturbation with multi-starts: a two-point seed (`a = (0,...,0,1)`,
//! `x = (0,...,0,v)`) followed by random starts, accepting a move only when
//! the ratio strictly improves, shrinking the step by 0.9 after every 50
//! non-improving moves and restarting once the step drops below 1e-8. A
//! ratio meaningfully above 1 is impossible for a correct bound, so the
//! search treats it as an error rather than a discovery.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{single_bound, BoundFamily, HolderPair, VALIDITY_RELATIVE_TOLERANCE};
use crate::functional::chebyshev_direct;
use crate::space::{norm_conforming, Instance, NormDescriptor, Vector};

/// Default evaluation budget per family.
pub const DEFAULT_SEARCH_BUDGET: u64 = 20_000;

/// Ratios above `1 + SHARPNESS_CEILING_TOLERANCE` fail the search.
pub const SHARPNESS_CEILING_TOLERANCE: f64 = 1e-9;

const INITIAL_STEP: f64 = 0.25;
const STEP_DECAY: f64 = 0.9;
const DECAY_PATIENCE: u64 = 50;
const RESTART_STEP_FLOOR: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum SearchError {
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error("dimension must be positive and match the norm")]
    BadDimension,
    #[error("n must be at least 2, got {0}")]
    BadN(usize),
    #[error("family {family} reported ratio {ratio} > 1; the bound is broken")]
    RatioCeilingExceeded { family: BoundFamily, ratio: f64 },
}

/// Outcome of one search: the best ratio found, the instance attaining it,
/// and the improvement trace `(evaluation index, ratio)`.
#[derive(Debug, Clone, Serialize)]
pub struct SharpnessResult {
    pub family: BoundFamily,
    pub best_ratio: f64,
    pub witness: Instance,
    pub iterations: u64,
    pub trace: Vec<(u64, f64)>,
}

/// Which coordinates a family lets the search move.
#[derive(Debug, Clone, Copy, PartialEq)]
enum WeightPolicy {
    /// Arbitrary real weights.
    Free,
    /// Weights stay a probability vector (perturbations are re-projected).
    Probability,
    /// Weights pinned to `1/n` (family is about the unweighted functional).
    PinnedUniform,
}

fn weight_policy(family: BoundFamily) -> WeightPolicy {
    match family {
        BoundFamily::BaselineMaxMax | BoundFamily::BaselineSum11 | BoundFamily::BaselineHolder => {
            WeightPolicy::Probability
        }
        BoundFamily::Cor36KInf | BoundFamily::Cor38KQ | BoundFamily::ClosingMaxMax => {
            WeightPolicy::PinnedUniform
        }
        _ => WeightPolicy::Free,
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    weights: Vec<f64>,
    scalars: Vec<f64>,
    vectors: Vec<Vec<f64>>,
}

impl Candidate {
    fn to_instance(&self, norm: &NormDescriptor) -> Instance {
        let scalars = self
            .scalars
            .iter()
            .map(|&a| Complex64::new(a, 0.0))
            .collect();
        let vectors = self
            .vectors
            .iter()
            .map(|coords| match norm {
                NormDescriptor::ComplexModulus => {
                    Vector::from_complex(vec![Complex64::new(coords[0], coords[1])])
                }
                _ => Vector::from_real(coords),
            })
            .collect();
        Instance::new(self.weights.clone(), scalars, vectors, *norm)
            .expect("candidates stay well-formed")
    }
}

/// Coordinates stored per vector: two for the complex plane, `d` otherwise.
fn stored_dim(norm: &NormDescriptor) -> usize {
    match norm {
        NormDescriptor::ComplexModulus => 2,
        _ => norm.dimension(),
    }
}

fn two_point_start(n: usize, policy: WeightPolicy, norm: &NormDescriptor) -> Candidate {
    let weights = match policy {
        WeightPolicy::Free => vec![1.0; n],
        WeightPolicy::Probability | WeightPolicy::PinnedUniform => vec![1.0 / n as f64; n],
    };
    let mut scalars = vec![0.0; n];
    scalars[n - 1] = 1.0;
    let sd = stored_dim(norm);
    let mut vectors = vec![vec![0.0; sd]; n];
    vectors[n - 1] = vec![1.0; sd];
    Candidate {
        weights,
        scalars,
        vectors,
    }
}

fn random_start(
    n: usize,
    policy: WeightPolicy,
    norm: &NormDescriptor,
    rng: &mut ChaCha8Rng,
) -> Candidate {
    let weights = match policy {
        WeightPolicy::PinnedUniform => vec![1.0 / n as f64; n],
        WeightPolicy::Probability => {
            let raw: Vec<f64> = (0..n).map(|_| 0.05 + rng.random::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|w| w / total).collect()
        }
        // Positive draws keep the prefix-normalized families applicable;
        // the perturbation moves explore signs from there.
        WeightPolicy::Free => (0..n).map(|_| 0.1 + 0.9 * rng.random::<f64>()).collect(),
    };
    let sd = stored_dim(norm);
    Candidate {
        weights,
        scalars: (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        vectors: (0..n)
            .map(|_| (0..sd).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect(),
    }
}

fn perturb(
    current: &Candidate,
    policy: WeightPolicy,
    step: f64,
    rng: &mut ChaCha8Rng,
) -> Candidate {
    let mut next = current.clone();
    let n = next.scalars.len();
    let sd = next.vectors[0].len();
    let classes = match policy {
        WeightPolicy::PinnedUniform => 2,
        _ => 3,
    };
    let delta = step * rng.random_range(-1.0..1.0);
    match rng.random_range(0..classes) {
        0 => next.scalars[rng.random_range(0..n)] += delta,
        1 => {
            let i = rng.random_range(0..n);
            next.vectors[i][rng.random_range(0..sd)] += delta;
        }
        _ => {
            next.weights[rng.random_range(0..n)] += delta;
            if policy == WeightPolicy::Probability {
                for w in &mut next.weights {
                    *w = w.max(0.0);
                }
                let total: f64 = next.weights.iter().sum();
                if total > 0.0 {
                    for w in &mut next.weights {
                        *w /= total;
                    }
                } else {
                    next.weights = vec![1.0 / n as f64; n];
                }
            }
        }
    }
    next
}

/// Tightness objective for one candidate; `None` when the family does not
/// apply to it.
///
/// The raw quotient `||T_n|| / bound` is ill-posed under rounding: where the
/// true functional and the bound both vanish, the evaluated numerator keeps
/// cancellation residue of size `eps * scale` while the denominator can be
/// exactly zero, so hill climbing would chase arbitrarily large fake ratios.
/// Regularizing the denominator with the validity tolerance keeps
/// "near 1 means sharp" intact and turns the `1 + 1e-9` ceiling into a real
/// bound-violation detector.
fn ratio_of(inst: &Instance, family: BoundFamily, holder: Option<HolderPair>) -> Option<f64> {
    let bound = single_bound(inst, family, holder);
    let value = bound.value?;
    let denominator = value + VALIDITY_RELATIVE_TOLERANCE * inst.scale();
    if denominator <= 0.0 {
        return Some(0.0);
    }
    let t = norm_conforming(inst.norm(), &chebyshev_direct(inst));
    Some(t / denominator)
}

/// Maximizes `||T_n|| / bound` for one family over instances of length `n`
/// in the given space, spending at most `budget` bound evaluations.
pub fn sharpness_search(
    family: BoundFamily,
    n: usize,
    dimension: usize,
    norm: NormDescriptor,
    budget: u64,
    seed: u64,
) -> Result<SharpnessResult, SearchError> {
    if budget == 0 {
        return Err(SearchError::ZeroBudget);
    }
    if n < 2 {
        return Err(SearchError::BadN(n));
    }
    if dimension == 0 || dimension != norm.dimension() {
        return Err(SearchError::BadDimension);
    }

    let policy = weight_policy(family);
    let holder = Some(HolderPair::square());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut evaluations = 0u64;
    let mut trace: Vec<(u64, f64)> = Vec::new();
    let mut best: Option<(f64, Candidate)> = None;

    let mut start_index = 0usize;
    'outer: while evaluations < budget {
        let candidate = if start_index == 0 {
            two_point_start(n, policy, &norm)
        } else {
            random_start(n, policy, &norm, &mut rng)
        };
        start_index += 1;

        let mut current = candidate;
        evaluations += 1;
        let mut current_ratio =
            ratio_of(&current.to_instance(&norm), family, holder).unwrap_or(0.0);
        if best.as_ref().is_none_or(|(r, _)| current_ratio > *r) {
            trace.push((evaluations, current_ratio));
            best = Some((current_ratio, current.clone()));
        }

        let mut step = INITIAL_STEP;
        let mut stale = 0u64;
        while evaluations < budget {
            let proposal = perturb(&current, policy, step, &mut rng);
            evaluations += 1;
            let proposal_ratio = ratio_of(&proposal.to_instance(&norm), family, holder);
            match proposal_ratio {
                Some(r) if r > current_ratio => {
                    current = proposal;
                    current_ratio = r;
                    stale = 0;
                    if best.as_ref().is_none_or(|(b, _)| r > *b) {
                        trace.push((evaluations, r));
                        best = Some((r, current.clone()));
                    }
                }
                _ => {
                    stale += 1;
                    if stale.is_multiple_of(DECAY_PATIENCE) {
                        step *= STEP_DECAY;
                        if step < RESTART_STEP_FLOOR {
                            continue 'outer;
                        }
                    }
                }
            }
        }
    }

    let (best_ratio, witness) = best.expect("at least one evaluation happened");
    if best_ratio > 1.0 + SHARPNESS_CEILING_TOLERANCE {
        return Err(SearchError::RatioCeilingExceeded {
            family,
            ratio: best_ratio,
        });
    }
    Ok(SharpnessResult {
        family,
        best_ratio,
        witness: witness.to_instance(&norm),
        iterations: evaluations,
        trace,
    })
}

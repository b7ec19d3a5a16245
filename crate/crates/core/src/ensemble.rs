//! Seeded random instance generation for ensemble verification.
//!
//! Every instance is a pure function of `(seed, index)`: each index derives
//! its own stream cipher state, so generation order and parallelism cannot
//! change the ensemble. Entries are drawn uniformly from `[-1, 1]` (complex
//! scalars from the square `[-1, 1]^2`), which keeps magnitudes bounded while
//! mixing signs and exercising cancellation.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::space::{Instance, NormDescriptor, Vector};

/// How weights are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// Exactly `1/n` each.
    Uniform,
    /// Independent draws from `(0, 1]`.
    PositiveRandom,
    /// Independent draws from `[-1, 1]`, redrawn while any partial sum is
    /// nearly zero.
    SignedRandom,
    /// Nonnegative draws normalized to sum to one.
    ProbabilitySimplex,
}

/// Whether the scalar sequence is real or complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarMode {
    Real,
    Complex,
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("n must be at least 2, got {0}")]
    BadN(usize),
    #[error("trials must be positive")]
    ZeroTrials,
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("dimension {dimension} does not match the norm's dimension {norm_dimension}")]
    DimensionMismatch {
        dimension: usize,
        norm_dimension: usize,
    },
    #[error("holder_p must be > 1, got {0}")]
    BadHolder(f64),
}

/// Configuration of one random ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleConfig {
    pub n: usize,
    pub trials: u64,
    pub dimension: usize,
    pub norm: NormDescriptor,
    pub weight_mode: WeightMode,
    pub scalar_mode: ScalarMode,
    pub holder_p: Option<f64>,
    pub seed: u64,
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n < 2 {
            return Err(ConfigError::BadN(self.n));
        }
        if self.trials == 0 {
            return Err(ConfigError::ZeroTrials);
        }
        if self.dimension == 0 {
            return Err(ConfigError::ZeroDimension);
        }
        if self.dimension != self.norm.dimension() {
            return Err(ConfigError::DimensionMismatch {
                dimension: self.dimension,
                norm_dimension: self.norm.dimension(),
            });
        }
        if let Some(p) = self.holder_p {
            if !p.is_finite() || p <= 1.0 {
                return Err(ConfigError::BadHolder(p));
            }
        }
        Ok(())
    }
}

/// A generated instance plus the flag raised when signed weight draws kept
/// producing near-zero partial sums; such instances skip the representations
/// that divide by them.
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub instance: Instance,
    pub signed_degenerate: bool,
}

/// Relative floor under which a signed partial sum counts as degenerate at
/// generation time.
pub const SIGNED_DEGENERACY_FLOOR: f64 = 1e-6;

const SIGNED_REDRAW_LIMIT: usize = 64;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream for one `(seed, index)` pair; mixing both through splitmix keeps
/// streams independent of evaluation order.
fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        splitmix64(seed) ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)),
    )
}

fn draw_weights(cfg: &EnsembleConfig, rng: &mut ChaCha8Rng) -> (Vec<f64>, bool) {
    let n = cfg.n;
    match cfg.weight_mode {
        WeightMode::Uniform => (vec![1.0 / n as f64; n], false),
        WeightMode::PositiveRandom => {
            let w = (0..n).map(|_| 1.0 - rng.random::<f64>()).collect();
            (w, false)
        }
        WeightMode::ProbabilitySimplex => loop {
            let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            if total > 0.0 {
                return (raw.into_iter().map(|w| w / total).collect(), false);
            }
        },
        WeightMode::SignedRandom => {
            let mut last = Vec::new();
            for _ in 0..SIGNED_REDRAW_LIMIT {
                let w: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let abs_sum: f64 = w.iter().map(|v| v.abs()).sum();
                let mut prefix = 0.0;
                let degenerate = w.iter().any(|v| {
                    prefix += v;
                    prefix.abs() < SIGNED_DEGENERACY_FLOOR * abs_sum
                });
                if !degenerate {
                    return (w, false);
                }
                last = w;
            }
            (last, true)
        }
    }
}

fn draw_scalars(cfg: &EnsembleConfig, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..cfg.n)
        .map(|_| match cfg.scalar_mode {
            ScalarMode::Real => Complex64::new(rng.random_range(-1.0..1.0), 0.0),
            ScalarMode::Complex => {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            }
        })
        .collect()
}

fn draw_vectors(cfg: &EnsembleConfig, rng: &mut ChaCha8Rng) -> Vec<Vector> {
    (0..cfg.n)
        .map(|_| match cfg.norm {
            NormDescriptor::ComplexModulus => Vector::from_complex(vec![Complex64::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            )]),
            _ => {
                let coords: Vec<f64> = (0..cfg.dimension)
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect();
                Vector::from_real(&coords)
            }
        })
        .collect()
}

/// Draws instance `index` of the ensemble. Deterministic in `(seed, index)`;
/// weights are drawn first, then scalars, then vectors.
pub fn generate_instance(
    cfg: &EnsembleConfig,
    index: u64,
) -> Result<GeneratedInstance, ConfigError> {
    cfg.validate()?;
    let mut rng = instance_rng(cfg.seed, index);
    let (weights, signed_degenerate) = draw_weights(cfg, &mut rng);
    let scalars = draw_scalars(cfg, &mut rng);
    let vectors = draw_vectors(cfg, &mut rng);
    let instance =
        Instance::new(weights, scalars, vectors, cfg.norm).expect("generated data is well-formed");
    Ok(GeneratedInstance {
        instance,
        signed_degenerate,
    })
}

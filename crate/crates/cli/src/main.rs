//! Command-line front end: evaluate one instance, verify bound validity over
//! a seeded random ensemble, search for sharpness witnesses, or print the
//! kernel constants. All output is JSON on stdout with floats at 17
//! significant digits.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use chebgruss::ensemble::{EnsembleConfig, ScalarMode, WeightMode};
use chebgruss::report::{run_report, to_json_string, InstanceReport};
use chebgruss::search::{sharpness_search, DEFAULT_SEARCH_BUDGET};
use chebgruss::{evaluate_all, BoundFamily, HolderPair, Instance, NormDescriptor};

#[derive(Parser)]
#[command(
    name = "chebgruss",
    about = "Chebyshev functional bounds: evaluate, verify, search for sharpness, print kernel constants",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightModeArg {
    #[value(name = "uniform")]
    Uniform,
    #[value(name = "positive_random", alias = "positive-random")]
    PositiveRandom,
    #[value(name = "signed_random", alias = "signed-random")]
    SignedRandom,
    #[value(name = "probability_simplex", alias = "probability-simplex")]
    ProbabilitySimplex,
}

impl From<WeightModeArg> for WeightMode {
    fn from(arg: WeightModeArg) -> Self {
        match arg {
            WeightModeArg::Uniform => WeightMode::Uniform,
            WeightModeArg::PositiveRandom => WeightMode::PositiveRandom,
            WeightModeArg::SignedRandom => WeightMode::SignedRandom,
            WeightModeArg::ProbabilitySimplex => WeightMode::ProbabilitySimplex,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ScalarModeArg {
    Real,
    Complex,
}

impl From<ScalarModeArg> for ScalarMode {
    fn from(arg: ScalarModeArg) -> Self {
        match arg {
            ScalarModeArg::Real => ScalarMode::Real,
            ScalarModeArg::Complex => ScalarMode::Complex,
        }
    }
}

/// Parses `lp:P`, `linf`, `l1`, `real_abs` or `complex_modulus`.
fn parse_norm(token: &str, dimension: usize) -> Result<NormDescriptor> {
    let norm = match token {
        "linf" => NormDescriptor::linf_real(dimension)?,
        "l1" => NormDescriptor::lp_real(1.0, dimension)?,
        "real_abs" => NormDescriptor::real_abs(),
        "complex_modulus" => NormDescriptor::complex_modulus(),
        _ => {
            let Some(p) = token.strip_prefix("lp:") else {
                bail!(
                    "unknown norm {token:?}; expected lp:P, linf, l1, real_abs or complex_modulus"
                );
            };
            let p: f64 = p
                .parse()
                .with_context(|| format!("bad exponent in {token:?}"))?;
            NormDescriptor::lp_real(p, dimension)?
        }
    };
    Ok(norm)
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every bound family on one instance JSON file.
    Eval {
        /// Path to the instance document.
        instance: PathBuf,
        /// Holder exponent p > 1 for the dual-exponent branches (default 2).
        #[arg(long)]
        holder_p: Option<f64>,
    },
    /// Evaluate a seeded random ensemble and report per-family statistics.
    /// Exits nonzero if any bound is violated.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum)]
        weight_mode: WeightModeArg,
        /// Ambient norm: lp:P, linf or l1 (plus real_abs / complex_modulus).
        #[arg(long)]
        norm: String,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        holder_p: Option<f64>,
        #[arg(long, value_enum, default_value = "real")]
        scalar_mode: ScalarModeArg,
        /// Evaluate instances one by one instead of on the thread pool.
        #[arg(long)]
        sequential: bool,
    },
    /// Search for an instance maximizing ||T_n|| / bound for one family.
    Sharpness {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
        budget: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value = "lp:2")]
        norm: String,
    },
    /// Print the kernel constants for one n.
    Constants {
        #[arg(long)]
        n: usize,
        /// Also evaluate k_q at this exponent (q > 1).
        #[arg(long)]
        q: Option<f64>,
    },
}

fn holder_from(p: Option<f64>) -> Result<Option<HolderPair>> {
    Ok(match p {
        Some(p) => Some(HolderPair::from_p(p)?),
        None => None,
    })
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Eval { instance, holder_p } => {
            let text = fs::read_to_string(&instance)
                .with_context(|| format!("reading {}", instance.display()))?;
            let parsed: Instance = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", instance.display()))?;
            let holder = holder_from(holder_p)?;
            let report = evaluate_all(&parsed, holder);
            let echo = serde_json::json!({
                "source": instance.display().to_string(),
                "holder_p": holder_p,
            });
            let doc = InstanceReport::new(0, &report, echo, None);
            println!("{}", to_json_string(&doc));
            Ok(report.violations() == 0)
        }
        Command::Verify {
            n,
            trials,
            seed,
            weight_mode,
            norm,
            dim,
            holder_p,
            scalar_mode,
            sequential,
        } => {
            let cfg = EnsembleConfig {
                n,
                trials,
                dimension: dim,
                norm: parse_norm(&norm, dim)?,
                weight_mode: weight_mode.into(),
                scalar_mode: scalar_mode.into(),
                holder_p,
                seed,
            };
            let report = run_report(&cfg, !sequential)?;
            println!("{}", report.to_json());
            Ok(report.total_violations == 0)
        }
        Command::Sharpness {
            family,
            n,
            budget,
            seed,
            dim,
            norm,
        } => {
            let family: BoundFamily = family
                .parse()
                .with_context(|| "expected a bound-family token such as thm31_holder")?;
            let norm = parse_norm(&norm, dim)?;
            let result = sharpness_search(family, n, dim, norm, budget, seed)?;
            println!("{}", to_json_string(&result));
            Ok(true)
        }
        Command::Constants { n, q } => {
            if n < 2 {
                bail!("n must be at least 2");
            }
            let k_q = match q {
                Some(q) => Some(serde_json::json!({
                    "q": q,
                    "value": chebgruss::k_q(n, q)?,
                })),
                None => None,
            };
            let doc = serde_json::json!({
                "n": n,
                "k_inf": chebgruss::k_infinity(n),
                "k_one": chebgruss::k_one(n),
                "k_q": k_q,
            });
            println!("{}", to_json_string(&doc));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

//! Report assembly and serialization.
//!
//! All emitted JSON goes through a serializer that prints every float with 17
//! significant digits, enough to round-trip a double exactly, so a fixed
//! configuration produces byte-identical output on a platform. Ensemble rows
//! are aggregated strictly in instance-index order whether or not the
//! evaluation itself ran in parallel.

use std::io;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{evaluate_all, BoundFamily, BoundReport, HolderPair};
use crate::ensemble::{generate_instance, ConfigError, EnsembleConfig};

/// serde_json formatter printing floats as `{:.16e}` (17 significant digits).
struct SigFig17Formatter;

impl serde_json::ser::Formatter for SigFig17Formatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{:.16e}", value)
    }
}

/// Serializes any value to a JSON string with 17-significant-digit floats.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFig17Formatter);
    value
        .serialize(&mut ser)
        .expect("report types serialize infallibly");
    String::from_utf8(out).expect("serializer writes UTF-8")
}

fn skip_false(flag: &bool) -> bool {
    !*flag
}

/// One serialized bound row of an instance report.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub family: BoundFamily,
    pub value: Option<f64>,
    pub applicable: bool,
    pub valid: bool,
    pub ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holder_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "skip_false")]
    pub exact_equality: bool,
}

/// Serialized per-instance evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceReport {
    pub instance_id: u64,
    pub t_norm: f64,
    pub bounds: Vec<BoundRow>,
    pub config_echo: serde_json::Value,
    pub seed: Option<u64>,
}

impl InstanceReport {
    pub fn new(
        instance_id: u64,
        report: &BoundReport,
        config_echo: serde_json::Value,
        seed: Option<u64>,
    ) -> Self {
        let bounds = report
            .entries
            .iter()
            .map(|entry| BoundRow {
                family: entry.bound.family,
                value: entry.bound.value,
                applicable: entry.bound.applicable(),
                valid: entry.valid,
                ratio: entry.ratio,
                holder_p: entry.bound.holder.map(|h| h.p()),
                reason: entry.bound.reason.map(|r| r.to_string()),
                exact_equality: entry.exact_equality,
            })
            .collect();
        InstanceReport {
            instance_id,
            t_norm: report.t_norm,
            bounds,
            config_echo,
            seed,
        }
    }
}

/// Aggregated behaviour of one bound family across an ensemble.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyStats {
    pub family: BoundFamily,
    pub applicable: u64,
    pub applicability_rate: f64,
    pub violations: u64,
    pub mean_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
}

/// The ensemble verification report.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleReport {
    pub seed: u64,
    pub trials: u64,
    pub config_echo: EnsembleConfig,
    pub signed_degenerate: u64,
    pub total_violations: u64,
    pub families: Vec<FamilyStats>,
}

impl EnsembleReport {
    pub fn to_json(&self) -> String {
        to_json_string(self)
    }

    pub fn family(&self, family: BoundFamily) -> &FamilyStats {
        self.families
            .iter()
            .find(|f| f.family == family)
            .expect("report carries every family")
    }
}

/// Evaluates every bound family over the configured ensemble and aggregates
/// per-family statistics. With `parallel` set the instances are evaluated on
/// a rayon pool; rows land in a preallocated index-ordered table either way,
/// so the report bytes do not depend on the execution mode.
pub fn run_report(cfg: &EnsembleConfig, parallel: bool) -> Result<EnsembleReport, ConfigError> {
    cfg.validate()?;
    let holder = cfg
        .holder_p
        .map(|p| HolderPair::from_p(p).expect("config validated"));

    let evaluate_one = |index: u64| -> (bool, BoundReport) {
        let generated = generate_instance(cfg, index).expect("config validated");
        let report = evaluate_all(&generated.instance, holder);
        (generated.signed_degenerate, report)
    };

    let rows: Vec<(bool, BoundReport)> = if parallel {
        (0..cfg.trials).into_par_iter().map(evaluate_one).collect()
    } else {
        (0..cfg.trials).map(evaluate_one).collect()
    };

    let signed_degenerate = rows.iter().filter(|(flag, _)| *flag).count() as u64;
    let mut families = Vec::with_capacity(BoundFamily::ALL.len());
    let mut total_violations = 0u64;
    for (slot, family) in BoundFamily::ALL.iter().enumerate() {
        let mut applicable = 0u64;
        let mut violations = 0u64;
        let mut ratio_sum = 0.0_f64;
        let mut ratio_count = 0u64;
        let mut max_ratio: Option<f64> = None;
        for (_, report) in &rows {
            let entry = &report.entries[slot];
            debug_assert_eq!(entry.bound.family, *family);
            if !entry.bound.applicable() {
                continue;
            }
            applicable += 1;
            if !entry.valid {
                violations += 1;
            }
            if let Some(r) = entry.ratio {
                ratio_sum += r;
                ratio_count += 1;
                max_ratio = Some(max_ratio.map_or(r, |m| m.max(r)));
            }
        }
        total_violations += violations;
        families.push(FamilyStats {
            family: *family,
            applicable,
            applicability_rate: applicable as f64 / cfg.trials as f64,
            violations,
            mean_ratio: (ratio_count > 0).then(|| ratio_sum / ratio_count as f64),
            max_ratio,
        });
    }

    Ok(EnsembleReport {
        seed: cfg.seed,
        trials: cfg.trials,
        config_echo: *cfg,
        signed_degenerate,
        total_violations,
        families,
    })
}

//! CSV and JSON persistence of bench results.
//!
//! `samples.csv` holds one record per sample with a fixed column set per
//! mode. Vector-valued fields are `;`-joined. Wall times go to a separate
//! `timings.csv` so that `samples.csv` depends only on config and seed.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bench::{BenchOutput, CoherentRecord, IdentifyRecord, Timing, SOUNDNESS_TOL};
use crate::error::CliResult;

pub const SAMPLES_FILE: &str = "samples.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TIMINGS_FILE: &str = "timings.csv";

/// Columns of `samples.csv` for the gate bench, in order.
pub const COHERENT_COLUMNS: &[&str] = &[
    "sample_id",
    "x_star",
    "conv_x_star",
    "conv_violation_x_star",
    "x_hat",
    "conv_x_hat",
    "conv_violation_x_hat",
    "lower_bound",
    "relaxation_status",
    "rank_one",
    "relaxed_at_x_star",
    "relaxed_at_x_hat",
    "bound_excess_x_star",
    "bound_excess_x_hat",
    "objective_at_x_star",
    "objective_at_x_hat",
    "surrogate_distance",
    "true_distance",
    "refine_converged",
    "error",
];

/// Columns of `samples.csv` for the identification bench, in order.
pub const IDENTIFY_COLUMNS: &[&str] = &[
    "sample_id",
    "known_x",
    "conv_known_x",
    "z_true",
    "z_hat",
    "z_error",
    "max_error",
    "symmetry_orbit",
    "lower_bound",
    "relaxation_status",
    "bound_excess_truth",
    "objective_at_truth",
    "objective_at_z_hat",
    "true_distance",
    "refine_converged",
    "error",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub count: usize,
    pub median: f64,
    pub p90: f64,
    pub max: f64,
    pub mean: f64,
}

/// Statistics of the finite values; `None` when there are none. Quantiles
/// interpolate linearly between order statistics.
pub fn stats(values: impl IntoIterator<Item = f64>) -> Option<Stats> {
    let mut v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let pos = p * (v.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
    };
    Some(Stats {
        count: v.len(),
        median: q(0.5),
        p90: q(0.9),
        max: v[v.len() - 1],
        mean: v.iter().sum::<f64>() / v.len() as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingSummary {
    pub total_seconds: f64,
    pub per_sample: Option<Stats>,
}

fn timing_summary(t: &[Timing]) -> TimingSummary {
    TimingSummary {
        total_seconds: t.iter().map(|t| t.seconds).sum(),
        per_sample: stats(t.iter().map(|t| t.seconds)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentSummary {
    pub mode: String,
    pub samples: usize,
    pub seed: u64,
    pub failures: usize,
    pub true_distance: Option<Stats>,
    pub surrogate_distance: Option<Stats>,
    pub conv_x_star: Option<Stats>,
    pub conv_x_hat: Option<Stats>,
    pub conv_violations_x_star: usize,
    pub conv_violations_x_hat: usize,
    pub relaxations_optimal: usize,
    pub relaxations_rank_one: usize,
    pub soundness_checks: usize,
    pub soundness_violations: usize,
    pub max_bound_excess: Option<f64>,
    pub timings: TimingSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentifySummary {
    pub mode: String,
    pub samples: usize,
    pub seed: u64,
    pub failures: usize,
    pub max_error: Option<Stats>,
    pub true_distance: Option<Stats>,
    pub conv_violations: usize,
    pub relaxations_optimal: usize,
    pub soundness_checks: usize,
    pub soundness_violations: usize,
    pub timings: TimingSummary,
}

fn flatten<'a>(it: impl Iterator<Item = &'a Option<f64>> + 'a) -> impl Iterator<Item = f64> + 'a {
    it.filter_map(|v| *v)
}

pub fn coherent_summary(out: &BenchOutput<CoherentRecord>, seed: u64) -> CoherentSummary {
    let r = &out.records;
    let excess: Vec<f64> = flatten(r.iter().map(|r| &r.bound_excess_x_star))
        .chain(flatten(r.iter().map(|r| &r.bound_excess_x_hat)))
        .collect();
    CoherentSummary {
        mode: "bench-coherent".into(),
        samples: r.len(),
        seed,
        failures: r.iter().filter(|r| !r.error.is_empty()).count(),
        true_distance: stats(flatten(r.iter().map(|r| &r.true_distance))),
        surrogate_distance: stats(flatten(r.iter().map(|r| &r.surrogate_distance))),
        conv_x_star: stats(r.iter().map(|r| r.conv_x_star)),
        conv_x_hat: stats(flatten(r.iter().map(|r| &r.conv_x_hat))),
        conv_violations_x_star: r.iter().filter(|r| r.conv_violation_x_star).count(),
        conv_violations_x_hat: r.iter().filter(|r| r.conv_violation_x_hat == Some(true)).count(),
        relaxations_optimal: r
            .iter()
            .filter(|r| r.relaxation_status.as_deref() == Some("optimal"))
            .count(),
        relaxations_rank_one: r.iter().filter(|r| r.rank_one == Some(true)).count(),
        soundness_checks: excess.len(),
        soundness_violations: excess.iter().filter(|e| **e > SOUNDNESS_TOL).count(),
        max_bound_excess: excess.iter().copied().reduce(f64::max),
        timings: timing_summary(&out.timings),
    }
}

pub fn identify_summary(out: &BenchOutput<IdentifyRecord>, seed: u64) -> IdentifySummary {
    let r = &out.records;
    let excess: Vec<f64> = flatten(r.iter().map(|r| &r.bound_excess_truth)).collect();
    IdentifySummary {
        mode: "bench-identify".into(),
        samples: r.len(),
        seed,
        failures: r.iter().filter(|r| !r.error.is_empty()).count(),
        max_error: stats(flatten(r.iter().map(|r| &r.max_error))),
        true_distance: stats(flatten(r.iter().map(|r| &r.true_distance))),
        conv_violations: r.iter().filter(|r| !(r.conv_known_x < std::f64::consts::PI)).count(),
        relaxations_optimal: r
            .iter()
            .filter(|r| r.relaxation_status.as_deref() == Some("optimal"))
            .count(),
        soundness_checks: excess.len(),
        soundness_violations: excess.iter().filter(|e| **e > SOUNDNESS_TOL).count(),
        timings: timing_summary(&out.timings),
    }
}

/// Serializes records to CSV bytes.
pub fn records_csv<R: Serialize>(records: &[R]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// Paths of the three output files in `dir`.
pub fn output_paths(dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
    (dir.join(SAMPLES_FILE), dir.join(SUMMARY_FILE), dir.join(TIMINGS_FILE))
}

/// Writes `samples.csv`, `summary.json` and `timings.csv` into `dir`.
pub fn write_bench<R: Serialize, S: Serialize>(
    dir: &Path,
    out: &BenchOutput<R>,
    summary: &S,
) -> CliResult<()> {
    std::fs::create_dir_all(dir)?;
    let (samples, summary_path, timings) = output_paths(dir);
    std::fs::write(samples, records_csv(&out.records)?)?;
    std::fs::write(timings, records_csv(&out.timings)?)?;
    std::fs::write(summary_path, serde_json::to_string_pretty(summary)? + "\n")?;
    Ok(())
}

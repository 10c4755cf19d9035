use chrono::{NaiveDate, NaiveDateTime};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sim::{simulate_prepared, PreparedPolicy};
use super::{Policy, SeizureModelConfig, SimResult};
use crate::diary::{mann_whitney_one_tailed, Alternative, MannWhitneyResult, Stats};
use crate::error::{Error, Result};
use crate::streams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSpec {
    pub days: u32,
    pub start: NaiveDateTime,
    pub n_reps: usize,
    pub seed: u64,
    /// Direction tested for policy A against policy B.
    pub alternative: Alternative,
}

impl Default for ComparisonSpec {
    fn default() -> Self {
        Self {
            days: 30,
            start: NaiveDate::from_ymd_opt(2026, 1, 1)
                .and_then(|d| d.and_hms_opt(0, 0, 0))
                .expect("valid date"),
            n_reps: 200,
            seed: 42,
            alternative: Alternative::XLess,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicySummary {
    pub name: String,
    pub seizures: Stats,
    pub periods: Stats,
    /// Over all periods of all replicates; absent when there were none.
    pub period_duration_h: Option<Stats>,
    pub attempts: usize,
    pub successes: usize,
    pub seizures_per_replicate: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyComparison {
    pub spec: ComparisonSpec,
    pub a: PolicySummary,
    pub b: PolicySummary,
    /// Per-replicate seizure counts, A as x.
    pub seizure_test: MannWhitneyResult,
    /// Per-replicate period counts, A as x.
    pub period_test: MannWhitneyResult,
}

/// Seed of replicate `rep` of arm `arm` (0 for A, 1 for B).
pub fn replicate_seed(seed: u64, arm: u64, rep: usize) -> u64 {
    streams::derive(seed, &[arm, rep as u64])
}

fn summarize(name: &str, runs: &[SimResult]) -> PolicySummary {
    let counts: Vec<usize> = runs.iter().map(|r| r.seizures.len()).collect();
    let as_f64 = |v: &[usize]| v.iter().map(|&c| c as f64).collect::<Vec<_>>();
    let periods: Vec<usize> = runs.iter().map(|r| r.periods.len()).collect();
    let durations: Vec<f64> = runs
        .iter()
        .flat_map(|r| r.periods.iter().map(|p| p.duration_h))
        .collect();
    PolicySummary {
        name: name.to_string(),
        seizures: Stats::of(&as_f64(&counts)),
        periods: Stats::of(&as_f64(&periods)),
        period_duration_h: (!durations.is_empty()).then(|| Stats::of(&durations)),
        attempts: runs.iter().map(|r| r.interruption.attempts).sum(),
        successes: runs.iter().map(|r| r.interruption.successes).sum(),
        seizures_per_replicate: counts,
    }
}

fn run_arm(prep: &PreparedPolicy<'_>, spec: &ComparisonSpec, arm: u64) -> Result<Vec<SimResult>> {
    (0..spec.n_reps)
        .into_par_iter()
        .map(|rep| {
            simulate_prepared(
                spec.days,
                spec.start,
                prep,
                replicate_seed(spec.seed, arm, rep),
            )
        })
        .collect()
}

/// Simulate `n_reps` independent replicates of each policy and test A
/// against B with a one-tailed Mann-Whitney test.
pub fn compare_policies(
    model: &SeizureModelConfig,
    a: &Policy,
    b: &Policy,
    spec: &ComparisonSpec,
) -> Result<PolicyComparison> {
    if spec.n_reps < 2 {
        return Err(Error::config("n_reps must be >= 2"));
    }
    let prep_a = PreparedPolicy::new(model, a)?;
    let prep_b = PreparedPolicy::new(model, b)?;
    let runs_a = run_arm(&prep_a, spec, 0)?;
    let runs_b = run_arm(&prep_b, spec, 1)?;
    let sa = summarize(&a.name, &runs_a);
    let sb = summarize(&b.name, &runs_b);
    let counts = |s: &PolicySummary| {
        s.seizures_per_replicate
            .iter()
            .map(|&c| c as f64)
            .collect::<Vec<_>>()
    };
    let periods = |runs: &[SimResult]| {
        runs.iter()
            .map(|r| r.periods.len() as f64)
            .collect::<Vec<_>>()
    };
    Ok(PolicyComparison {
        spec: spec.clone(),
        seizure_test: mann_whitney_one_tailed(&counts(&sa), &counts(&sb), spec.alternative)?,
        period_test: mann_whitney_one_tailed(
            &periods(&runs_a),
            &periods(&runs_b),
            spec.alternative,
        )?,
        a: sa,
        b: sb,
    })
}

/// [`compare_policies`] on a dedicated pool of `workers` threads.
pub fn compare_policies_with_workers(
    model: &SeizureModelConfig,
    a: &Policy,
    b: &Policy,
    spec: &ComparisonSpec,
    workers: usize,
) -> Result<PolicyComparison> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::config(format!("thread pool: {e}")))?;
    pool.install(|| compare_policies(model, a, b, spec))
}

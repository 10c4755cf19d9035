use std::io::Write;

use chrono::NaiveDateTime;
use serde::{Serialize, Serializer};

use super::{
    group_periods, mann_whitney_one_tailed, summarize_periods, Alternative, DiaryEvent,
    MannWhitneyResult, OccurrencePeriod, PeriodSummary,
};
use crate::error::{Error, Result};

pub const INSUFFICIENT_DATA: &str = "insufficient data";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterruptionRate {
    pub attempts: usize,
    pub successes: usize,
    /// `None` when nothing was attempted; serialized as `"undefined"`.
    #[serde(serialize_with = "rate_or_undefined")]
    pub rate: Option<f64>,
}

fn rate_or_undefined<S: Serializer>(
    rate: &Option<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match rate {
        Some(r) => s.serialize_f64(*r),
        None => s.serialize_str("undefined"),
    }
}

pub fn interruption_rate(events: &[DiaryEvent]) -> InterruptionRate {
    let attempts = events.iter().filter(|e| e.interruption_attempted).count();
    let successes = events
        .iter()
        .filter(|e| e.interruption_attempted && e.interruption_success)
        .count();
    let rate = (attempts > 0).then(|| successes as f64 / attempts as f64);
    InterruptionRate {
        attempts,
        successes,
        rate,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum TestOutcome {
    Done(MannWhitneyResult),
    Skipped { skipped: &'static str },
}

impl TestOutcome {
    pub fn result(&self) -> Option<&MannWhitneyResult> {
        match self {
            TestOutcome::Done(r) => Some(r),
            TestOutcome::Skipped { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochReport {
    pub label: String,
    pub n_events: usize,
    pub periods: usize,
    pub summary: PeriodSummary,
    pub interruption: InterruptionRate,
}

/// Everything `stats` reports about a diary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiaryReport {
    pub gap_threshold_h: f64,
    pub split: Option<NaiveDateTime>,
    pub alternative: Alternative,
    pub test_method_rule: String,
    pub epochs: Vec<EpochReport>,
    pub seizures_per_period_test: TestOutcome,
    pub duration_test: TestOutcome,
    pub interruption: InterruptionRate,
}

fn epoch(
    label: &str,
    events: &[DiaryEvent],
    gap_h: f64,
) -> Result<(EpochReport, Vec<OccurrencePeriod>)> {
    let periods = group_periods(events, gap_h)?;
    let report = EpochReport {
        label: label.to_string(),
        n_events: events.len(),
        periods: periods.len(),
        summary: summarize_periods(&periods)?,
        interruption: interruption_rate(events),
    };
    Ok((report, periods))
}

/// Summarizes a sorted diary. With a `split`, events before it form the
/// "pre" epoch (sample x) and the rest the "post" epoch (sample y), and both
/// period metrics are compared with a one-tailed Mann-Whitney test.
pub fn diary_report(
    events: &[DiaryEvent],
    gap_threshold_h: f64,
    split: Option<NaiveDateTime>,
    alternative: Alternative,
) -> Result<DiaryReport> {
    if events.is_empty() {
        return Err(Error::input("diary has no events"));
    }
    let skipped = TestOutcome::Skipped {
        skipped: INSUFFICIENT_DATA,
    };
    let (epochs, tests) = match split {
        None => {
            let (all, _) = epoch("all", events, gap_threshold_h)?;
            (vec![all], (skipped.clone(), skipped))
        }
        Some(at) => {
            let cut = events.partition_point(|e| e.timestamp < at);
            let (pre, post) = events.split_at(cut);
            for (side, evs) in [("pre", pre), ("post", post)] {
                if evs.is_empty() {
                    return Err(Error::input(format!("{side}-split epoch has no events")));
                }
            }
            let (pre_r, pre_p) = epoch("pre", pre, gap_threshold_h)?;
            let (post_r, post_p) = epoch("post", post, gap_threshold_h)?;
            let counts = |ps: &[OccurrencePeriod]| {
                ps.iter()
                    .map(|p| p.seizure_count() as f64)
                    .collect::<Vec<_>>()
            };
            let durations =
                |ps: &[OccurrencePeriod]| ps.iter().map(|p| p.duration_h).collect::<Vec<_>>();
            let tests = if pre_p.len() + post_p.len() < 3 {
                (skipped.clone(), skipped)
            } else {
                (
                    TestOutcome::Done(mann_whitney_one_tailed(
                        &counts(&pre_p),
                        &counts(&post_p),
                        alternative,
                    )?),
                    TestOutcome::Done(mann_whitney_one_tailed(
                        &durations(&pre_p),
                        &durations(&post_p),
                        alternative,
                    )?),
                )
            };
            (vec![pre_r, post_r], tests)
        }
    };
    Ok(DiaryReport {
        gap_threshold_h,
        split,
        alternative,
        test_method_rule: format!(
            "exact_enumeration when n + m <= {} and no ties, else normal_approx_tie_corrected",
            super::EXACT_MAX_TOTAL
        ),
        epochs,
        seizures_per_period_test: tests.0,
        duration_test: tests.1,
        interruption: interruption_rate(events),
    })
}

pub fn write_report_json<W: Write>(report: &DiaryReport, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)?;
    Ok(())
}

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use super::DiaryEvent;
use crate::error::{Error, Result};

/// A period closes after this many hours without a seizure.
pub const DEFAULT_GAP_HOURS: f64 = 24.0;

/// Isolated seizure or cluster of seizures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PeriodKind {
    #[serde(rename = "IS")]
    Isolated,
    #[serde(rename = "CS")]
    Cluster,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccurrencePeriod {
    pub events: Vec<DiaryEvent>,
    pub start: NaiveDateTime,
    pub end: NaiveDateTime,
    pub duration_h: f64,
    pub kind: PeriodKind,
}

impl OccurrencePeriod {
    fn from_events(events: Vec<DiaryEvent>) -> Self {
        let start = events[0].timestamp;
        let end = events[events.len() - 1].timestamp;
        let kind = if events.len() == 1 {
            PeriodKind::Isolated
        } else {
            PeriodKind::Cluster
        };
        Self {
            duration_h: hours_between(start, end),
            start,
            end,
            kind,
            events,
        }
    }

    pub fn seizure_count(&self) -> usize {
        self.events.len()
    }
}

pub(crate) fn hours_between(a: NaiveDateTime, b: NaiveDateTime) -> f64 {
    (b - a).num_milliseconds() as f64 / 3_600_000.0
}

/// Splits sorted events into occurrence periods: consecutive events closer
/// than `gap_threshold_h` share a period.
pub fn group_periods(events: &[DiaryEvent], gap_threshold_h: f64) -> Result<Vec<OccurrencePeriod>> {
    if !(gap_threshold_h.is_finite() && gap_threshold_h > 0.0) {
        return Err(Error::config(format!(
            "gap threshold must be positive, got {gap_threshold_h}"
        )));
    }
    if events.windows(2).any(|w| w[1].timestamp < w[0].timestamp) {
        return Err(Error::input("diary events are not sorted by timestamp"));
    }

    let mut periods = Vec::new();
    let mut current: Vec<DiaryEvent> = Vec::new();
    for e in events {
        if let Some(last) = current.last() {
            if hours_between(last.timestamp, e.timestamp) >= gap_threshold_h {
                periods.push(OccurrencePeriod::from_events(std::mem::take(&mut current)));
            }
        }
        current.push(e.clone());
    }
    if !current.is_empty() {
        periods.push(OccurrencePeriod::from_events(current));
    }
    Ok(periods)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    /// Sample SD; a single value gets sd 0. `values` must be non-empty.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self {
            mean: mean.clamp(min, max),
            sd,
            min,
            max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodSummary {
    pub n_periods: usize,
    pub seizures_per_period: Stats,
    pub duration_h: Stats,
    /// False when there is only one period and the reported sd of 0 is a
    /// placeholder.
    pub sd_defined: bool,
}

pub fn summarize_periods(periods: &[OccurrencePeriod]) -> Result<PeriodSummary> {
    if periods.is_empty() {
        return Err(Error::input("no occurrence periods to summarize"));
    }
    let counts: Vec<f64> = periods.iter().map(|p| p.seizure_count() as f64).collect();
    let durations: Vec<f64> = periods.iter().map(|p| p.duration_h).collect();
    Ok(PeriodSummary {
        n_periods: periods.len(),
        seizures_per_period: Stats::of(&counts),
        duration_h: Stats::of(&durations),
        sd_defined: periods.len() > 1,
    })
}

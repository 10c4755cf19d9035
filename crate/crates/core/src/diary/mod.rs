//! Seizure-diary statistics: occurrence periods, summaries, one-tailed
//! Mann-Whitney tests and carer interruption rates.

mod events;
mod mannwhitney;
mod periods;
mod report;

pub use events::parse_timestamp;
pub use events::{parse_diary, write_diary_csv, DiaryEvent, DIARY_HEADER};
pub use mannwhitney::{
    mann_whitney_one_tailed, Alternative, MannWhitneyResult, TestMethod, EXACT_MAX_TOTAL,
};
pub use periods::{
    group_periods, summarize_periods, OccurrencePeriod, PeriodKind, PeriodSummary, Stats,
    DEFAULT_GAP_HOURS,
};
pub use report::{
    diary_report, interruption_rate, write_report_json, DiaryReport, EpochReport, InterruptionRate,
    TestOutcome, INSUFFICIENT_DATA,
};

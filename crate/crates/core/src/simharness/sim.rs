use std::collections::VecDeque;
use std::io::Write;

use chrono::{Duration, NaiveDateTime, NaiveTime, Timelike};
use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::entrain::FactorTable;
use super::{ModelOverrides, ProgramAssessment, SeizureModelConfig};
use crate::diary::{
    group_periods, interruption_rate, write_diary_csv, DiaryEvent, InterruptionRate,
    OccurrencePeriod,
};
use crate::error::{Error, Result};
use crate::scheduler::{
    hhmm, secs, Activity, AdaptiveConfig, ClockSchedule, Controller, DeviceMode, ScheduleRun,
};
use crate::streams;

const DAY_S: f64 = 86_400.0;
/// A run producing more seizures per day than this is treated as a diverged
/// (supercritical) process.
const MAX_SEIZURES_PER_DAY: usize = 1_000;

/// Daily clock window in which the patient is at rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestWindow {
    #[serde(with = "hhmm")]
    pub start: NaiveTime,
    #[serde(with = "hhmm")]
    pub end: NaiveTime,
}

impl RestWindow {
    pub fn new(start: NaiveTime, end: NaiveTime) -> Self {
        Self { start, end }
    }

    fn contains(&self, tod_s: f64) -> bool {
        let (a, b) = (tod(self.start), tod(self.end));
        if a <= b {
            tod_s >= a && tod_s < b
        } else {
            tod_s >= a || tod_s < b
        }
    }
}

fn tod(t: NaiveTime) -> f64 {
    t.num_seconds_from_midnight() as f64 + t.nanosecond() as f64 * 1e-9
}

/// Daily activity pattern standing in for an accelerometer: the patient is
/// still inside the rest windows and moving otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivityProfile {
    pub rest_windows: Vec<RestWindow>,
}

impl Default for ActivityProfile {
    /// Asleep 22:00 to 06:30.
    fn default() -> Self {
        let hm = |h, m| NaiveTime::from_hms_opt(h, m, 0).expect("valid clock time");
        Self {
            rest_windows: vec![RestWindow::new(hm(22, 0), hm(6, 30))],
        }
    }
}

impl ActivityProfile {
    pub fn always_active() -> Self {
        Self {
            rest_windows: Vec::new(),
        }
    }

    pub fn is_resting(&self, tod_s: f64) -> bool {
        let tod_s = tod_s.rem_euclid(DAY_S);
        self.rest_windows.iter().any(|w| w.contains(tod_s))
    }

    /// Offset (seconds, > 0) from `tod_s` to the next window edge.
    fn until_next_edge(&self, tod_s: f64) -> Option<f64> {
        let tod_s = tod_s.rem_euclid(DAY_S);
        self.rest_windows
            .iter()
            .flat_map(|w| [tod(w.start), tod(w.end)])
            .map(|b| {
                let d = (b - tod_s).rem_euclid(DAY_S);
                if d == 0.0 {
                    DAY_S
                } else {
                    d
                }
            })
            .min_by(f64::total_cmp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TapPolicy {
    #[default]
    None,
    /// The carer notices every seizure and taps the device after
    /// `delay_s` seconds.
    TapOnSeizure { delay_s: f64 },
}

/// Everything that differs between the arms of a comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Policy {
    pub name: String,
    pub schedule: ClockSchedule,
    pub adaptive: AdaptiveConfig,
    pub activity: ActivityProfile,
    pub tap_policy: TapPolicy,
    pub overrides: ModelOverrides,
}

impl Default for Policy {
    fn default() -> Self {
        Self {
            name: "default".into(),
            schedule: ClockSchedule::default(),
            adaptive: AdaptiveConfig::default(),
            activity: ActivityProfile::default(),
            tap_policy: TapPolicy::None,
            overrides: ModelOverrides::default(),
        }
    }
}

impl Policy {
    pub fn named(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        self.adaptive.validate()?;
        if let TapPolicy::TapOnSeizure { delay_s } = self.tap_policy {
            if !(delay_s >= 0.0 && delay_s.is_finite()) {
                return Err(Error::config("tap delay must be >= 0"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeizureRecord {
    pub timestamp: NaiveDateTime,
    pub during_mode: DeviceMode,
    pub program_label: String,
    pub interruption_attempted: bool,
    pub interruption_success: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub policy: String,
    pub seed: u64,
    pub days: u32,
    pub start: NaiveDateTime,
    pub end: NaiveDateTime,
    pub gap_threshold_h: f64,
    pub seizures: Vec<SeizureRecord>,
    pub interruption: InterruptionRate,
    pub periods: Vec<OccurrencePeriod>,
    pub factors: Vec<ProgramAssessment>,
    pub stimulation: ScheduleRun,
}

impl SimResult {
    pub fn diary_events(&self) -> Vec<DiaryEvent> {
        self.seizures.iter().map(to_diary).collect()
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn write_diary_csv<W: Write>(&self, out: W) -> Result<()> {
        write_diary_csv(&self.diary_events(), out)
    }
}

fn to_diary(s: &SeizureRecord) -> DiaryEvent {
    DiaryEvent {
        timestamp: s.timestamp,
        is_status_epilepticus: false,
        interruption_attempted: s.interruption_attempted,
        interruption_success: s.interruption_success,
        note: format!("{}", s.during_mode),
    }
}

/// Model with overrides applied plus the program factor table.
#[derive(Debug, Clone)]
pub(crate) struct PreparedPolicy<'a> {
    pub policy: &'a Policy,
    pub model: SeizureModelConfig,
    pub table: FactorTable,
}

impl<'a> PreparedPolicy<'a> {
    pub fn new(model: &SeizureModelConfig, policy: &'a Policy) -> Result<Self> {
        policy.validate()?;
        let model = policy.overrides.apply(model);
        model.validate()?;
        let a = &policy.adaptive;
        let programs = policy
            .schedule
            .segments
            .iter()
            .map(|s| &s.basal_program)
            .chain([&a.sleep_program, &a.boost_program, &a.fallback_program]);
        let table = FactorTable::build(programs, &model)?;
        Ok(Self {
            policy,
            model,
            table,
        })
    }
}

/// Run the seizure process against the stimulation controller for `days`
/// days from `start`, seeded by `model.seed`.
pub fn simulate_days(
    days: u32,
    start: NaiveDateTime,
    model: &SeizureModelConfig,
    policy: &Policy,
) -> Result<SimResult> {
    let prepared = PreparedPolicy::new(model, policy)?;
    simulate_prepared(days, start, &prepared, prepared.model.seed)
}

/// Smallest grid index `k >= 1` with `k * w >= t`.
fn ceil_grid(t: f64, w: f64) -> u64 {
    let k = (t / w - 1e-9).ceil();
    k.max(1.0) as u64
}

pub(crate) fn simulate_prepared(
    days: u32,
    start: NaiveDateTime,
    prep: &PreparedPolicy<'_>,
    seed: u64,
) -> Result<SimResult> {
    if days == 0 {
        return Err(Error::config("days must be >= 1"));
    }
    let (model, policy) = (&prep.model, prep.policy);
    let end_s = days as f64 * DAY_S;
    let end = start + Duration::days(days as i64);
    let w = policy.adaptive.activity_window_s;
    let start_tod = tod(start.time());
    let at = |t: f64| start + secs(t);

    let mut ctl = Controller::new(start, &policy.schedule, &policy.adaptive)?;
    let mut arrivals = streams::stream(seed, &[1]);
    let mut outcomes = streams::stream(seed, &[2]);

    let activity_at = |k: u64| {
        let t = k as f64 * w;
        let rest = &policy.activity;
        if rest.is_resting(start_tod + t) && rest.is_resting(start_tod + t - w) {
            Activity::Inactive
        } else {
            Activity::Active
        }
    };
    // Next decision instant at which an input or the controller can change.
    let next_instant = |ctl: &Controller<'_>, k_done: u64, taps: &VecDeque<f64>| -> u64 {
        if k_done == 0 {
            return 1;
        }
        let now = k_done as f64 * w;
        let mut k = u64::MAX;
        if let Some(t) = ctl.next_autonomous_change() {
            let t = (t - start).num_microseconds().unwrap_or(i64::MAX) as f64 * 1e-6;
            k = k.min(ceil_grid(t, w).max(k_done + 1));
        }
        if let Some(d) = policy.activity.until_next_edge(start_tod + now) {
            k = k.min(ceil_grid(now + d, w));
        }
        if let Some(d) = policy.activity.until_next_edge(start_tod + now - w) {
            k = k.min(ceil_grid(now - w + d + w, w));
        }
        if let Some(&tap) = taps.front() {
            k = k.min(ceil_grid(tap, w).max(k_done + 1));
        }
        k
    };

    let mut seizures = Vec::new();
    let mut taps: VecDeque<f64> = VecDeque::new();
    let mut k_done = 0u64;
    let mut t = 0.0f64;
    let mut excitation = 0.0f64;
    let decay = model.cluster_decay_per_h / 3600.0;
    let base = model.base_rate_per_s();
    let max_circadian = model.circadian_profile.iter().copied().fold(0.0, f64::max);
    let max_seizures = MAX_SEIZURES_PER_DAY * days as usize;

    loop {
        let k_next = next_instant(&ctl, k_done, &taps);
        let t_instant = if k_next == u64::MAX {
            f64::INFINITY
        } else {
            k_next as f64 * w
        };
        let seg_end = t_instant.min(end_s);
        // Between decision instants only the clock hour and the decaying
        // excitation change the rate, so the peak circadian multiplier and
        // the current excitation bound it.
        let rate0 = base * prep.table.factor(&ctl.state().active_program);
        let bound = rate0 * max_circadian * (1.0 + excitation);
        let candidate = if bound > 0.0 {
            t + Exp::new(bound)
                .expect("positive rate")
                .sample(&mut arrivals)
        } else {
            f64::INFINITY
        };

        if candidate < seg_end {
            excitation *= (-decay * (candidate - t)).exp();
            t = candidate;
            let hour = ((start_tod + t) / 3600.0).floor().rem_euclid(24.0) as usize;
            let rate = rate0 * model.circadian_profile[hour] * (1.0 + excitation);
            let u: f64 = arrivals.random();
            if u * bound > rate {
                continue;
            }
            let state = ctl.state();
            let attempted = match policy.tap_policy {
                TapPolicy::None => false,
                TapPolicy::TapOnSeizure { delay_s } => {
                    let tap = t + delay_s;
                    if tap < end_s {
                        taps.push_back(tap);
                    }
                    true
                }
            };
            let success = outcomes.random::<f64>() < model.interruption_success_prob && attempted;
            let stamp = at(t.floor());
            seizures.push(SeizureRecord {
                timestamp: stamp,
                during_mode: state.mode,
                program_label: state.active_program.label.clone(),
                interruption_attempted: attempted,
                interruption_success: success,
            });
            if !success {
                excitation += model.cluster_gain;
            }
            if seizures.len() > max_seizures {
                return Err(Error::config(
                    "seizure process diverged; lower cluster_gain or raise cluster_decay_per_h",
                ));
            }
            continue;
        }

        excitation *= (-decay * (seg_end - t)).exp();
        t = seg_end;
        if t >= end_s {
            break;
        }
        if t == t_instant {
            let mut tap = false;
            while taps.front().is_some_and(|&x| x <= t_instant) {
                taps.pop_front();
                tap = true;
            }
            ctl.step(at(t_instant), activity_at(k_next), tap)?;
            k_done = k_next;
        }
    }

    let diary: Vec<DiaryEvent> = seizures.iter().map(to_diary).collect();
    Ok(SimResult {
        policy: policy.name.clone(),
        seed,
        days,
        start,
        end,
        gap_threshold_h: model.gap_threshold_h,
        interruption: interruption_rate(&diary),
        periods: group_periods(&diary, model.gap_threshold_h)?,
        seizures,
        factors: prep.table.entries().to_vec(),
        stimulation: ctl.finish(end),
    })
}

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use super::config::secs;
use super::state::classify_samples;
use super::{
    detect_taps, engage_fallback, step_state, Activity, AdaptiveConfig, Cause, ClockSchedule,
    DeviceMode, DeviceState, LogEntry, StimProgram,
};
use crate::error::{Error, Result};
use crate::telemetry::AccelTrace;

pub type EventLog = Vec<LogEntry>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelinePoint {
    pub timestamp: NaiveDateTime,
    pub mode: DeviceMode,
    pub program: StimProgram,
}

/// Log plus piecewise-constant stimulation timeline over `[start, end)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRun {
    pub start: NaiveDateTime,
    pub end: NaiveDateTime,
    pub log: EventLog,
    pub timeline: Vec<TimelinePoint>,
}

impl ScheduleRun {
    /// Timeline point in force at `t`.
    pub fn point_at(&self, t: NaiveDateTime) -> Option<&TimelinePoint> {
        if t < self.start || t >= self.end {
            return None;
        }
        self.timeline.iter().rev().find(|p| p.timestamp <= t)
    }

    /// `(mode, entered, left)` for every timeline piece.
    pub fn dwells(&self) -> Vec<(DeviceMode, NaiveDateTime, NaiveDateTime)> {
        self.timeline
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let until = self.timeline.get(i + 1).map_or(self.end, |n| n.timestamp);
                (p.mode, p.timestamp, until)
            })
            .collect()
    }
}

/// Stateful wrapper around [`step_state`] that records the log and
/// timeline. One instance per device; calls must be time-ordered.
#[derive(Debug, Clone)]
pub struct Controller<'a> {
    schedule: &'a ClockSchedule,
    config: &'a AdaptiveConfig,
    state: DeviceState,
    start: NaiveDateTime,
    log: EventLog,
    timeline: Vec<TimelinePoint>,
}

impl<'a> Controller<'a> {
    pub fn new(
        start: NaiveDateTime,
        schedule: &'a ClockSchedule,
        config: &'a AdaptiveConfig,
    ) -> Result<Self> {
        schedule.validate()?;
        config.validate()?;
        let state = DeviceState::initial(start, schedule);
        let timeline = vec![TimelinePoint {
            timestamp: start,
            mode: state.mode,
            program: state.active_program.clone(),
        }];
        Ok(Self {
            schedule,
            config,
            state,
            start,
            log: Vec::new(),
            timeline,
        })
    }

    pub fn state(&self) -> &DeviceState {
        &self.state
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn step(
        &mut self,
        now: NaiveDateTime,
        activity: Activity,
        tap: bool,
    ) -> Result<Option<&LogEntry>> {
        let (next, entry) =
            step_state(&self.state, now, activity, tap, self.schedule, self.config)?;
        self.state = next;
        Ok(entry.map(|e| self.record(e)))
    }

    pub fn engage_fallback(&mut self, now: NaiveDateTime) -> Option<&LogEntry> {
        if self.state.mode == DeviceMode::Fallback {
            return None;
        }
        let from = self.state.mode;
        self.state = engage_fallback(&self.state, self.config, now);
        let entry = LogEntry {
            timestamp: now,
            from,
            to: DeviceMode::Fallback,
            cause: Cause::FallbackEngaged,
            program: self.state.active_program.clone(),
        };
        Some(self.record(entry))
    }

    fn record(&mut self, entry: LogEntry) -> &LogEntry {
        let last = self.timeline.last().expect("timeline starts non-empty");
        if last.program != entry.program || last.mode != entry.to {
            self.timeline.push(TimelinePoint {
                timestamp: entry.timestamp,
                mode: entry.to,
                program: entry.program.clone(),
            });
        }
        self.log.push(entry);
        self.log.last().expect("just pushed")
    }

    /// Earliest time after the last update at which the state can change
    /// with unchanged inputs (schedule boundary, boost expiry, sleep entry).
    pub fn next_autonomous_change(&self) -> Option<NaiveDateTime> {
        if self.state.mode == DeviceMode::Fallback {
            return None;
        }
        let mut t = self.schedule.next_boundary(self.state.updated_at);
        if self.state.mode == DeviceMode::Boost {
            t = t.min(self.state.mode_entered_at + self.config.boost_duration());
        }
        if let Some(since) = self.state.inactivity_since {
            if self.state.mode != DeviceMode::SleepMode {
                t = t.min(since + self.config.inactivity());
            }
        }
        Some(t.max(self.state.updated_at))
    }

    pub fn finish(self, end: NaiveDateTime) -> ScheduleRun {
        let timeline = if end > self.start {
            self.timeline
        } else {
            Vec::new()
        };
        ScheduleRun {
            start: self.start,
            end,
            log: self.log,
            timeline,
        }
    }
}

/// Fold the controller over decision instants `start + k * period`,
/// `k >= 1`, with the period equal to the activity window.
///
/// Without a trace the patient is taken to be permanently active.
pub fn run_schedule(
    accel: Option<&AccelTrace>,
    schedule: &ClockSchedule,
    config: &AdaptiveConfig,
    start: NaiveDateTime,
    duration_s: f64,
) -> Result<ScheduleRun> {
    run_schedule_with(accel, schedule, config, start, duration_s, None)
}

/// [`run_schedule`] with the fallback program engaged at `fallback_at`.
pub fn run_schedule_with(
    accel: Option<&AccelTrace>,
    schedule: &ClockSchedule,
    config: &AdaptiveConfig,
    start: NaiveDateTime,
    duration_s: f64,
    fallback_at: Option<NaiveDateTime>,
) -> Result<ScheduleRun> {
    if !(duration_s >= 0.0 && duration_s.is_finite()) {
        return Err(Error::config("duration must be >= 0"));
    }
    let mut ctl = Controller::new(start, schedule, config)?;
    let end = start + secs(duration_s);
    if duration_s == 0.0 {
        return Ok(ctl.finish(end));
    }
    let window = config.decision_period();
    if let Some(tr) = accel {
        let slack = secs(1.0 / tr.sample_rate);
        if tr.start_time > start || tr.end_time() + slack < end {
            return Err(Error::input(format!(
                "accelerometer trace {} .. {} does not cover {start} .. {end}",
                tr.start_time,
                tr.end_time()
            )));
        }
    }
    let taps = accel.map(|tr| detect_taps(tr, config)).unwrap_or_default();
    let mut next_tap = 0;
    let steps = (duration_s / config.activity_window_s + 1e-9).floor() as i64;

    for k in 1..=steps {
        let now = start + secs(k as f64 * config.activity_window_s);
        let prev = now - window;
        if let Some(at) = fallback_at {
            if at <= now {
                ctl.engage_fallback(at.max(ctl.state().updated_at));
            }
        }
        let activity = match accel {
            None => Activity::Active,
            Some(tr) => classify_samples(
                tr.window(prev.max(tr.start_time), now),
                tr.sample_rate,
                config,
            )?,
        };
        let mut tap = false;
        while next_tap < taps.len() && taps[next_tap] <= now {
            tap |= taps[next_tap] > prev;
            next_tap += 1;
        }
        ctl.step(now, activity, tap)?;
    }
    if let Some(at) = fallback_at {
        if at < end {
            ctl.engage_fallback(at.max(ctl.state().updated_at));
        }
    }
    Ok(ctl.finish(end))
}

use std::fmt;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use super::config::secs;
use super::{AdaptiveConfig, ClockSchedule, DayPhase, StimProgram};
use crate::error::{Error, Result};
use crate::telemetry::AccelTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeviceMode {
    BasalDay,
    BasalNight,
    SleepMode,
    Boost,
    Fallback,
}

impl fmt::Display for DeviceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activity {
    Active,
    Inactive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cause {
    ScheduleBoundary,
    InactivityElapsed,
    ActivityResumed,
    Tap,
    BoostExpired,
    FallbackEngaged,
}

impl fmt::Display for Cause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cause::ScheduleBoundary => "schedule_boundary",
            Cause::InactivityElapsed => "inactivity_elapsed",
            Cause::ActivityResumed => "activity_resumed",
            Cause::Tap => "tap",
            Cause::BoostExpired => "boost_expired",
            Cause::FallbackEngaged => "fallback_engaged",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub timestamp: NaiveDateTime,
    pub from: DeviceMode,
    pub to: DeviceMode,
    pub cause: Cause,
    pub program: StimProgram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceState {
    pub mode: DeviceMode,
    pub mode_entered_at: NaiveDateTime,
    pub active_program: StimProgram,
    /// Start of the current inactivity run, if any.
    pub inactivity_since: Option<NaiveDateTime>,
    pub last_tap_at: Option<NaiveDateTime>,
    /// Time of the last update; steps must not go back past it.
    pub updated_at: NaiveDateTime,
}

impl DeviceState {
    /// Basal state dictated by the schedule at `now`.
    pub fn initial(now: NaiveDateTime, schedule: &ClockSchedule) -> Self {
        let (mode, program) = basal(schedule, now);
        Self {
            mode,
            mode_entered_at: now,
            active_program: program,
            inactivity_since: None,
            last_tap_at: None,
            updated_at: now,
        }
    }
}

fn basal(schedule: &ClockSchedule, now: NaiveDateTime) -> (DeviceMode, StimProgram) {
    let seg = schedule.segment_at(now.time());
    let mode = match seg.phase {
        DayPhase::Day => DeviceMode::BasalDay,
        DayPhase::Night => DeviceMode::BasalNight,
    };
    (mode, seg.basal_program.clone())
}

/// Population standard deviation of the acceleration magnitude.
pub fn magnitude_stddev(samples: &[[f64; 3]]) -> f64 {
    let n = samples.len() as f64;
    let mags: Vec<f64> = samples
        .iter()
        .map(|s| (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt())
        .collect();
    let mean = mags.iter().sum::<f64>() / n;
    (mags.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / n).sqrt()
}

pub(crate) fn classify_samples(
    samples: &[[f64; 3]],
    sample_rate: f64,
    config: &AdaptiveConfig,
) -> Result<Activity> {
    // Allow half a sample of slack for windows cut from a longer trace.
    let span = (samples.len() as f64 + 0.5) / sample_rate;
    if samples.len() < 2 || span < config.activity_window_s {
        return Err(Error::input(format!(
            "activity window of {} samples spans less than {} s",
            samples.len(),
            config.activity_window_s
        )));
    }
    Ok(
        if magnitude_stddev(samples) <= config.activity_stddev_threshold_g {
            Activity::Inactive
        } else {
            Activity::Active
        },
    )
}

/// Inactive iff the magnitude standard deviation is at or below threshold.
pub fn classify_activity(window: &AccelTrace, config: &AdaptiveConfig) -> Result<Activity> {
    classify_samples(&window.samples, window.sample_rate, config)
}

/// Timestamps where the tap axis reaches the threshold, debounced.
pub fn detect_taps(trace: &AccelTrace, config: &AdaptiveConfig) -> Vec<NaiveDateTime> {
    let axis = config.tap_axis.index();
    let debounce = secs(config.tap_debounce_s);
    let mut taps: Vec<NaiveDateTime> = Vec::new();
    for (i, s) in trace.samples.iter().enumerate() {
        if s[axis] < config.tap_threshold_g {
            continue;
        }
        let t = trace.time_of(i);
        if taps.last().is_some_and(|&last| t - last < debounce) {
            continue;
        }
        taps.push(t);
    }
    taps
}

/// Advance the controller to `now`.
///
/// Priority is Boost > SleepMode > Basal. A tap enters (or restarts) Boost;
/// Boost holds for `boost_duration` and then yields to whatever activity and
/// schedule dictate. Fallback ignores every input.
pub fn step_state(
    state: &DeviceState,
    now: NaiveDateTime,
    activity: Activity,
    tap: bool,
    schedule: &ClockSchedule,
    config: &AdaptiveConfig,
) -> Result<(DeviceState, Option<LogEntry>)> {
    if now < state.updated_at || now < state.mode_entered_at {
        return Err(Error::input(format!(
            "time moved backwards: {now} is before {}",
            state.updated_at
        )));
    }
    let mut next = state.clone();
    next.updated_at = now;
    if state.mode == DeviceMode::Fallback {
        return Ok((next, None));
    }

    match activity {
        Activity::Inactive => {
            if next.inactivity_since.is_none() {
                // The whole classification window was already still.
                next.inactivity_since = Some(now - config.decision_period());
            }
        }
        Activity::Active => next.inactivity_since = None,
    }

    let segment = schedule.segment_at(now.time());
    let sleep_allowed = config.sleep_mode_at_night || segment.phase == DayPhase::Day;
    let inactive_long_enough = next
        .inactivity_since
        .is_some_and(|since| now - since >= config.inactivity());

    let (mode, program, cause) = if tap {
        next.last_tap_at = Some(now);
        next.mode_entered_at = now;
        (DeviceMode::Boost, config.boost_program.clone(), Cause::Tap)
    } else if state.mode == DeviceMode::Boost
        && now - state.mode_entered_at < config.boost_duration()
    {
        return Ok((next, None));
    } else if inactive_long_enough && sleep_allowed {
        let cause = if state.mode == DeviceMode::Boost {
            Cause::BoostExpired
        } else {
            Cause::InactivityElapsed
        };
        (DeviceMode::SleepMode, config.sleep_program.clone(), cause)
    } else {
        let (mode, program) = basal(schedule, now);
        let cause = match state.mode {
            DeviceMode::Boost => Cause::BoostExpired,
            DeviceMode::SleepMode if activity == Activity::Active => Cause::ActivityResumed,
            _ => Cause::ScheduleBoundary,
        };
        (mode, program, cause)
    };

    if mode == state.mode && program == state.active_program {
        return Ok((next, None));
    }
    let entry = LogEntry {
        timestamp: now,
        from: state.mode,
        to: mode,
        cause,
        program: program.clone(),
    };
    next.mode = mode;
    next.active_program = program;
    next.mode_entered_at = now;
    Ok((next, Some(entry)))
}

/// Switch to the open-loop fallback program. Idempotent.
pub fn engage_fallback(
    state: &DeviceState,
    config: &AdaptiveConfig,
    now: NaiveDateTime,
) -> DeviceState {
    if state.mode == DeviceMode::Fallback {
        return state.clone();
    }
    DeviceState {
        mode: DeviceMode::Fallback,
        mode_entered_at: now,
        active_program: config.fallback_program.clone(),
        inactivity_since: None,
        last_tap_at: state.last_tap_at,
        updated_at: now.max(state.updated_at),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::telemetry::{synth_accel, AccelEvent};
    use chrono::{Duration, NaiveDate};

    fn at(h: u32, m: u32, s: u32) -> NaiveDateTime {
        NaiveDate::from_ymd_opt(2026, 6, 1)
            .unwrap()
            .and_hms_opt(h, m, s)
            .unwrap()
    }

    fn trace(samples: Vec<[f64; 3]>) -> AccelTrace {
        AccelTrace {
            sample_rate: 50.0,
            samples,
            start_time: at(12, 0, 0),
        }
    }

    #[test]
    fn still_window_is_inactive() {
        let cfg = AdaptiveConfig::default();
        let tr = trace(vec![[0.0, 0.0, 1.0]; 500]);
        assert_eq!(classify_activity(&tr, &cfg).unwrap(), Activity::Inactive);
    }

    #[test]
    fn walking_window_is_active() {
        let cfg = AdaptiveConfig::default();
        let tr = synth_accel(
            &[AccelEvent::active(0.0, 10.0)],
            10.0,
            50.0,
            3,
            at(12, 0, 0),
        )
        .unwrap();
        // 0.3 g gait on z alone already gives sd ~0.21 g >> 0.05 g
        assert!(magnitude_stddev(&tr.samples) > 0.15);
        assert_eq!(classify_activity(&tr, &cfg).unwrap(), Activity::Active);
    }

    #[test]
    fn threshold_is_inclusive() {
        let tr = synth_accel(&[], 10.0, 50.0, 8, at(12, 0, 0)).unwrap();
        let sd = magnitude_stddev(&tr.samples);
        let mut cfg = AdaptiveConfig {
            activity_stddev_threshold_g: sd,
            ..Default::default()
        };
        assert_eq!(classify_activity(&tr, &cfg).unwrap(), Activity::Inactive);
        cfg.activity_stddev_threshold_g = sd * (1.0 - 1e-12);
        assert_eq!(classify_activity(&tr, &cfg).unwrap(), Activity::Active);
    }

    #[test]
    fn short_window_rejected() {
        let cfg = AdaptiveConfig::default();
        let tr = trace(vec![[0.0, 0.0, 1.0]; 100]);
        assert!(matches!(classify_activity(&tr, &cfg), Err(Error::Input(_))));
    }

    #[test]
    fn tap_threshold_and_debounce() {
        let cfg = AdaptiveConfig::default();
        let mut s = vec![[0.0, 0.0, 1.0]; 500];
        s[100][2] = 7.5;
        assert_eq!(detect_taps(&trace(s.clone()), &cfg), vec![at(12, 0, 2)]);

        s[100][2] = 6.0;
        assert!(detect_taps(&trace(s.clone()), &cfg).is_empty());

        // 8 g at 2.0 s and 2.5 s; the second falls inside the 2 s debounce.
        s[100][2] = 8.0;
        s[125][2] = 8.0;
        assert_eq!(detect_taps(&trace(s.clone()), &cfg).len(), 1);
        // A third spike 2.5 s after the first is outside it.
        s[225][2] = 8.0;
        assert_eq!(detect_taps(&trace(s), &cfg).len(), 2);
    }

    #[test]
    fn tap_on_x_axis_ignored_by_default() {
        let cfg = AdaptiveConfig::default();
        let mut s = vec![[0.0, 0.0, 1.0]; 100];
        s[10][0] = 9.0;
        assert!(detect_taps(&trace(s), &cfg).is_empty());
    }

    #[test]
    fn night_basal_unchanged_while_active() {
        let schedule = ClockSchedule::default();
        let cfg = AdaptiveConfig::default();
        let s0 = DeviceState::initial(at(23, 0, 0), &schedule);
        assert_eq!(s0.mode, DeviceMode::BasalNight);
        assert_eq!(s0.active_program.amplitude_ma, 0.7);
        let (s1, e) =
            step_state(&s0, at(23, 0, 10), Activity::Active, false, &schedule, &cfg).unwrap();
        assert!(e.is_none());
        assert_eq!(s1.mode, DeviceMode::BasalNight);
        assert_eq!(s1.active_program, s0.active_program);
    }

    #[test]
    fn four_minutes_of_inactivity_enter_sleep() {
        let schedule = ClockSchedule::default();
        let cfg = AdaptiveConfig::default();
        let mut s = DeviceState::initial(at(14, 0, 0), &schedule);
        assert_eq!(s.active_program.amplitude_ma, 0.5);
        let mut entered = None;
        for k in 1..=30 {
            let now = at(14, 0, 0) + Duration::seconds(10 * k);
            let (n, e) = step_state(&s, now, Activity::Inactive, false, &schedule, &cfg).unwrap();
            if let Some(e) = e {
                assert_eq!(e.cause, Cause::InactivityElapsed);
                entered.get_or_insert(now);
            }
            s = n;
        }
        // First inactive window covers 14:00:00-14:00:10, so 4 min elapse at 14:04:00.
        assert_eq!(entered, Some(at(14, 4, 0)));
        assert_eq!(s.mode, DeviceMode::SleepMode);
        assert_eq!(s.active_program.amplitude_ma, 1.3);
        assert_eq!(s.active_program.frequency_hz, 13.0);

        let (s, e) =
            step_state(&s, at(14, 6, 0), Activity::Active, false, &schedule, &cfg).unwrap();
        assert_eq!(e.unwrap().cause, Cause::ActivityResumed);
        assert_eq!(s.mode, DeviceMode::BasalDay);
    }

    #[test]
    fn tap_boosts_then_expires() {
        let schedule = ClockSchedule::default();
        let cfg = AdaptiveConfig::default();
        let s = DeviceState::initial(at(10, 0, 0), &schedule);
        let (s, e) =
            step_state(&s, at(10, 0, 10), Activity::Active, true, &schedule, &cfg).unwrap();
        let e = e.unwrap();
        assert_eq!((e.to, e.cause), (DeviceMode::Boost, Cause::Tap));
        assert_eq!(s.active_program.frequency_hz, 130.0);
        assert_eq!(s.active_program.amplitude_ma, 1.5);
        assert_eq!(
            s.active_program.electrode_mode,
            super::super::ElectrodeMode::Bipolar
        );

        let (s, e) =
            step_state(&s, at(10, 1, 0), Activity::Active, false, &schedule, &cfg).unwrap();
        assert!(e.is_none(), "50 s into a 60 s boost");
        // A second tap restarts the timer without a log entry.
        let (s, e) = step_state(&s, at(10, 1, 5), Activity::Active, true, &schedule, &cfg).unwrap();
        assert!(e.is_none());
        let (s, e) =
            step_state(&s, at(10, 2, 0), Activity::Active, false, &schedule, &cfg).unwrap();
        assert!(e.is_none());
        let (s, e) =
            step_state(&s, at(10, 2, 10), Activity::Active, false, &schedule, &cfg).unwrap();
        assert_eq!(e.unwrap().cause, Cause::BoostExpired);
        assert_eq!(s.mode, DeviceMode::BasalDay);
    }

    #[test]
    fn tap_beats_inactivity() {
        let schedule = ClockSchedule::default();
        let cfg = AdaptiveConfig::default();
        let mut s = DeviceState::initial(at(14, 0, 0), &schedule);
        s.inactivity_since = Some(at(13, 55, 0));
        let (s, e) =
            step_state(&s, at(14, 0, 0), Activity::Inactive, true, &schedule, &cfg).unwrap();
        assert_eq!(e.unwrap().to, DeviceMode::Boost);
        assert_eq!(s.mode, DeviceMode::Boost);
    }

    #[test]
    fn night_sleep_can_be_suppressed() {
        let schedule = ClockSchedule::default();
        let cfg = AdaptiveConfig {
            sleep_mode_at_night: false,
            ..Default::default()
        };
        let mut s = DeviceState::initial(at(23, 0, 0), &schedule);
        s.inactivity_since = Some(at(22, 0, 0));
        let (s, e) = step_state(
            &s,
            at(23, 0, 10),
            Activity::Inactive,
            false,
            &schedule,
            &cfg,
        )
        .unwrap();
        assert!(e.is_none());
        assert_eq!(s.mode, DeviceMode::BasalNight);
    }

    #[test]
    fn backwards_time_rejected() {
        let schedule = ClockSchedule::default();
        let cfg = AdaptiveConfig::default();
        let s = DeviceState::initial(at(10, 0, 0), &schedule);
        let r = step_state(&s, at(9, 59, 50), Activity::Active, false, &schedule, &cfg);
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn fallback_is_idempotent_and_absorbing() {
        let schedule = ClockSchedule::default();
        let cfg = AdaptiveConfig::default();
        let s = DeviceState::initial(at(10, 0, 0), &schedule);
        let (boost, _) =
            step_state(&s, at(10, 0, 10), Activity::Active, true, &schedule, &cfg).unwrap();
        let f1 = engage_fallback(&boost, &cfg, at(10, 0, 20));
        assert_eq!(f1.mode, DeviceMode::Fallback);
        assert_eq!(f1.active_program, cfg.fallback_program);
        let f2 = engage_fallback(&f1, &cfg, at(10, 0, 30));
        assert_eq!((f2.mode, &f2.active_program), (f1.mode, &f1.active_program));

        let (f3, e) =
            step_state(&f2, at(10, 5, 0), Activity::Inactive, true, &schedule, &cfg).unwrap();
        assert!(e.is_none());
        assert_eq!(f3.mode, DeviceMode::Fallback);
    }

    #[test]
    fn fallback_from_night_sleep_ignores_schedule() {
        let schedule = ClockSchedule::default();
        let cfg = AdaptiveConfig::default();
        let mut s = DeviceState::initial(at(2, 0, 0), &schedule);
        s.inactivity_since = Some(at(1, 0, 0));
        let (sleep, _) =
            step_state(&s, at(2, 0, 10), Activity::Inactive, false, &schedule, &cfg).unwrap();
        assert_eq!(sleep.mode, DeviceMode::SleepMode);
        let f = engage_fallback(&sleep, &cfg, at(2, 0, 20));
        assert_eq!(f.active_program, cfg.fallback_program);
        let (later, _) =
            step_state(&f, at(8, 0, 0), Activity::Active, false, &schedule, &cfg).unwrap();
        assert_eq!(later.active_program, cfg.fallback_program);
    }
}

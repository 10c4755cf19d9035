use chrono::Duration;
use serde::{Deserialize, Serialize};

use super::StimProgram;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Activity- and tap-driven adaptation on top of the clock schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaptiveConfig {
    pub inactivity_minutes: f64,
    /// Classification window and decision period, seconds.
    pub activity_window_s: f64,
    pub activity_stddev_threshold_g: f64,
    pub tap_axis: Axis,
    pub tap_threshold_g: f64,
    pub tap_debounce_s: f64,
    pub sleep_program: StimProgram,
    pub boost_program: StimProgram,
    pub boost_duration_s: f64,
    pub fallback_program: StimProgram,
    /// Whether sustained inactivity during night segments also enters sleep
    /// mode.
    pub sleep_mode_at_night: bool,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self {
            inactivity_minutes: 4.0,
            activity_window_s: 10.0,
            activity_stddev_threshold_g: 0.05,
            tap_axis: Axis::Z,
            tap_threshold_g: 7.0,
            tap_debounce_s: 2.0,
            sleep_program: StimProgram::sleep(),
            boost_program: StimProgram::boost(),
            boost_duration_s: 60.0,
            fallback_program: StimProgram::fallback(),
            sleep_mode_at_night: true,
        }
    }
}

impl AdaptiveConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("inactivity_minutes", self.inactivity_minutes),
            ("activity_window_s", self.activity_window_s),
            (
                "activity_stddev_threshold_g",
                self.activity_stddev_threshold_g,
            ),
            ("tap_threshold_g", self.tap_threshold_g),
            ("tap_debounce_s", self.tap_debounce_s),
            ("boost_duration_s", self.boost_duration_s),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be > 0, got {v}")));
            }
        }
        self.sleep_program.validate()?;
        self.boost_program.validate()?;
        self.fallback_program.validate()?;
        Ok(())
    }

    pub fn decision_period(&self) -> Duration {
        secs(self.activity_window_s)
    }

    pub fn inactivity(&self) -> Duration {
        secs(self.inactivity_minutes * 60.0)
    }

    pub fn boost_duration(&self) -> Duration {
        secs(self.boost_duration_s)
    }
}

pub(crate) fn secs(s: f64) -> Duration {
    Duration::microseconds((s * 1e6).round() as i64)
}

use chrono::{Duration, NaiveDateTime, NaiveTime, Timelike};
use serde::{Deserialize, Serialize};

use super::StimProgram;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DayPhase {
    Day,
    Night,
}

/// `HH:MM` (de)serialization for times of day.
pub(crate) mod hhmm {
    use chrono::NaiveTime;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &NaiveTime, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.format("%H:%M").to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<NaiveTime, D::Error> {
        let s = String::deserialize(d)?;
        NaiveTime::parse_from_str(&s, "%H:%M")
            .map_err(|e| D::Error::custom(format!("bad time of day '{s}': {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSegment {
    #[serde(with = "hhmm")]
    pub start: NaiveTime,
    #[serde(default = "default_phase")]
    pub phase: DayPhase,
    pub basal_program: StimProgram,
}

fn default_phase() -> DayPhase {
    DayPhase::Day
}

/// Daily basal programs. Each segment runs from its start until the next
/// segment's start; the last segment wraps past midnight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClockSchedule {
    pub segments: Vec<ScheduleSegment>,
}

impl Default for ClockSchedule {
    /// Day 07:00-21:00 at 0.5 mA, night otherwise at 0.7 mA.
    fn default() -> Self {
        Self::day_night(
            NaiveTime::from_hms_opt(7, 0, 0).unwrap(),
            NaiveTime::from_hms_opt(21, 0, 0).unwrap(),
            StimProgram::basal_day(),
            StimProgram::basal_night(),
        )
    }
}

impl ClockSchedule {
    pub fn day_night(
        day_start: NaiveTime,
        night_start: NaiveTime,
        day: StimProgram,
        night: StimProgram,
    ) -> Self {
        let mut segments = vec![
            ScheduleSegment {
                start: day_start,
                phase: DayPhase::Day,
                basal_program: day,
            },
            ScheduleSegment {
                start: night_start,
                phase: DayPhase::Night,
                basal_program: night,
            },
        ];
        segments.sort_by_key(|s| s.start);
        Self { segments }
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::config(
                "schedule has no segments and does not cover 24 h",
            ));
        }
        for pair in self.segments.windows(2) {
            if pair[1].start <= pair[0].start {
                return Err(Error::config(format!(
                    "schedule segment starts must strictly ascend ({} then {})",
                    pair[0].start.format("%H:%M"),
                    pair[1].start.format("%H:%M")
                )));
            }
        }
        for s in &self.segments {
            if s.start.second() != 0 || s.start.nanosecond() != 0 {
                return Err(Error::config("segment starts must be whole minutes"));
            }
            s.basal_program.validate()?;
        }
        Ok(())
    }

    pub fn segment_at(&self, t: NaiveTime) -> &ScheduleSegment {
        self.segments
            .iter()
            .rev()
            .find(|s| s.start <= t)
            .unwrap_or_else(|| self.segments.last().expect("validated schedule"))
    }

    /// First segment boundary strictly after `after`.
    pub fn next_boundary(&self, after: NaiveDateTime) -> NaiveDateTime {
        let date = after.date();
        (0..=1)
            .flat_map(|d| {
                let day = date + Duration::days(d);
                self.segments.iter().map(move |s| day.and_time(s.start))
            })
            .find(|&b| b > after)
            .expect("a boundary exists within two days")
    }
}

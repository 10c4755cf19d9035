use std::io::{Read, Write};

use serde::de::DeserializeOwned;

use super::{AdaptiveConfig, ClockSchedule, LogEntry, TimelinePoint};
use crate::error::Result;
use crate::format::sig;

const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%S%.3f";

fn read_json<T: DeserializeOwned, R: Read>(input: R) -> Result<T> {
    Ok(serde_json::from_reader(input)?)
}

pub fn read_schedule<R: Read>(input: R) -> Result<ClockSchedule> {
    let schedule: ClockSchedule = read_json(input)?;
    schedule.validate()?;
    Ok(schedule)
}

/// Missing fields take their defaults.
pub fn read_adaptive_config<R: Read>(input: R) -> Result<AdaptiveConfig> {
    let config: AdaptiveConfig = read_json(input)?;
    config.validate()?;
    Ok(config)
}

/// `timestamp,from,to,cause,program_label`
pub fn write_event_log_csv<W: Write>(log: &[LogEntry], mut out: W) -> Result<()> {
    writeln!(out, "timestamp,from,to,cause,program_label")?;
    for e in log {
        writeln!(
            out,
            "{},{},{},{},{}",
            e.timestamp.format(TIMESTAMP_FORMAT),
            e.from,
            e.to,
            e.cause,
            e.program.label
        )?;
    }
    Ok(())
}

/// `timestamp,mode,program_label,frequency_hz,pulse_width_us,amplitude_ma,electrode_mode`
pub fn write_timeline_csv<W: Write>(timeline: &[TimelinePoint], mut out: W) -> Result<()> {
    writeln!(
        out,
        "timestamp,mode,program_label,frequency_hz,pulse_width_us,amplitude_ma,electrode_mode"
    )?;
    for p in timeline {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.timestamp.format(TIMESTAMP_FORMAT),
            p.mode,
            p.program.label,
            sig(p.program.frequency_hz, 9),
            sig(p.program.pulse_width_us, 9),
            sig(p.program.amplitude_ma, 9),
            p.program.electrode_mode
        )?;
    }
    Ok(())
}

//! Three-layer chronotherapy controller.
//!
//! 1. A clock schedule sets the basal program (day and night rates).
//! 2. Sustained inactivity raises stimulation to the sleep-mode program.
//! 3. A tap on the device triggers a high-frequency boost burst.
//!
//! A fallback program overrides all three and stays until the device is
//! reconfigured.

mod config;
mod io;
mod program;
mod run;
mod schedule;
mod state;

pub(crate) use config::secs;
pub use config::{AdaptiveConfig, Axis};
pub use io::{read_adaptive_config, read_schedule, write_event_log_csv, write_timeline_csv};
pub use program::{ElectrodeMode, StimProgram};
pub use run::{run_schedule, run_schedule_with, Controller, EventLog, ScheduleRun, TimelinePoint};
pub(crate) use schedule::hhmm;
pub use schedule::{ClockSchedule, DayPhase, ScheduleSegment};
pub use state::{
    classify_activity, detect_taps, engage_fallback, magnitude_stddev, step_state, Activity, Cause,
    DeviceMode, DeviceState, LogEntry,
};

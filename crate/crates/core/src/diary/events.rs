use std::io::{Read, Write};

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DIARY_HEADER: [&str; 5] = [
    "timestamp",
    "se",
    "interruption_attempted",
    "interruption_success",
    "note",
];

const WRITE_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";
const READ_FORMATS: [&str; 4] = [
    "%Y-%m-%dT%H:%M:%S%.f",
    "%Y-%m-%d %H:%M:%S%.f",
    "%Y-%m-%dT%H:%M",
    "%Y-%m-%d %H:%M",
];

/// One carer-recorded seizure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiaryEvent {
    pub timestamp: NaiveDateTime,
    pub is_status_epilepticus: bool,
    pub interruption_attempted: bool,
    pub interruption_success: bool,
    #[serde(default)]
    pub note: String,
}

impl DiaryEvent {
    pub fn new(timestamp: NaiveDateTime) -> Self {
        Self {
            timestamp,
            is_status_epilepticus: false,
            interruption_attempted: false,
            interruption_success: false,
            note: String::new(),
        }
    }

    pub fn with_interruption(mut self, attempted: bool, success: bool) -> Self {
        self.interruption_attempted = attempted;
        self.interruption_success = success;
        self
    }
}

/// Accepts `YYYY-MM-DDTHH:MM[:SS[.fff]]`, with `T` or a space.
pub fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    READ_FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
}

fn parse_flag(s: &str, column: &str, line: u64) -> Result<bool> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(Error::Parse {
            line,
            message: format!("{column} must be 0 or 1, got {s:?}"),
        }),
    }
}

/// Reads a diary CSV. Events come back sorted by timestamp; equal timestamps
/// keep their file order.
pub fn parse_diary<R: Read>(input: R) -> Result<Vec<DiaryEvent>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);

    let header = rdr.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().ne(DIARY_HEADER.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`", DIARY_HEADER.join(",")),
        });
    }

    let mut events = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != DIARY_HEADER.len() {
            return Err(Error::Parse {
                line,
                message: format!(
                    "expected {} fields, found {}",
                    DIARY_HEADER.len(),
                    record.len()
                ),
            });
        }
        let timestamp = parse_timestamp(&record[0]).ok_or_else(|| Error::Parse {
            line,
            message: format!("bad timestamp {:?}", &record[0]),
        })?;
        let event = DiaryEvent {
            timestamp,
            is_status_epilepticus: parse_flag(&record[1], "se", line)?,
            interruption_attempted: parse_flag(&record[2], "interruption_attempted", line)?,
            interruption_success: parse_flag(&record[3], "interruption_success", line)?,
            note: record[4].to_string(),
        };
        if event.interruption_success && !event.interruption_attempted {
            return Err(Error::Validation {
                line,
                message: "interruption_success=1 without interruption_attempted".into(),
            });
        }
        events.push(event);
    }
    events.sort_by_key(|e| e.timestamp);
    Ok(events)
}

pub fn write_diary_csv<W: Write>(events: &[DiaryEvent], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DIARY_HEADER)?;
    let flag = |b: bool| if b { "1" } else { "0" };
    for e in events {
        w.write_record([
            e.timestamp.format(WRITE_FORMAT).to_string().as_str(),
            flag(e.is_status_epilepticus),
            flag(e.interruption_attempted),
            flag(e.interruption_success),
            e.note.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

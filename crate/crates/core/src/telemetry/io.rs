use std::io::{Read, Write};

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use super::{AccelTrace, PowerSpectrum, TimeSeries};
use crate::error::{Error, Result};
use crate::format::sig;

/// JSON sidecar of a trace CSV: the absolute start time lives here, the CSV
/// carries seconds from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub kind: String,
    pub start_time: NaiveDateTime,
    pub sample_rate: f64,
    pub samples: usize,
}

impl TraceMeta {
    pub fn for_lfp(ts: &TimeSeries) -> Self {
        Self {
            kind: "lfp".into(),
            start_time: ts.start_time,
            sample_rate: ts.sample_rate,
            samples: ts.samples.len(),
        }
    }

    pub fn for_accel(tr: &AccelTrace) -> Self {
        Self {
            kind: "accel".into(),
            start_time: tr.start_time,
            sample_rate: tr.sample_rate,
            samples: tr.samples.len(),
        }
    }
}

pub fn write_lfp_csv<W: Write>(ts: &TimeSeries, mut out: W) -> Result<()> {
    writeln!(out, "t,v")?;
    for (i, v) in ts.samples.iter().enumerate() {
        writeln!(out, "{},{}", sig(i as f64 / ts.sample_rate, 12), sig(*v, 9))?;
    }
    Ok(())
}

pub fn write_accel_csv<W: Write>(tr: &AccelTrace, mut out: W) -> Result<()> {
    writeln!(out, "t,x,y,z")?;
    for (i, s) in tr.samples.iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{}",
            sig(i as f64 / tr.sample_rate, 12),
            sig(s[0], 9),
            sig(s[1], 9),
            sig(s[2], 9)
        )?;
    }
    Ok(())
}

pub fn write_spectrum_csv<W: Write>(ps: &PowerSpectrum, mut out: W) -> Result<()> {
    writeln!(out, "frequency_hz,power")?;
    for (f, p) in ps.freqs.iter().zip(&ps.power) {
        writeln!(out, "{},{}", sig(*f, 9), sig(*p, 9))?;
    }
    Ok(())
}

fn read_columns<R: Read>(input: R, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != header {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header {}", header.join(",")),
        });
    }
    let mut rows = Vec::new();
    let mut last_t = f64::NEG_INFINITY;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let row = (0..header.len())
            .map(|i| {
                record
                    .get(i)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::Parse {
                        line,
                        message: format!("bad number in column {i}"),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        if row[0] < last_t {
            return Err(Error::Parse {
                line,
                message: "time column goes backwards".into(),
            });
        }
        last_t = row[0];
        rows.push(row);
    }
    Ok(rows)
}

fn check_rate(meta: &TraceMeta) -> Result<()> {
    if !(meta.sample_rate > 0.0) {
        return Err(Error::config("trace sample rate must be > 0"));
    }
    Ok(())
}

/// Read a `t,v` CSV at the sidecar's sample rate.
pub fn read_lfp_csv<R: Read>(input: R, meta: &TraceMeta) -> Result<TimeSeries> {
    check_rate(meta)?;
    let samples = read_columns(input, &["t", "v"])?
        .into_iter()
        .map(|r| r[1])
        .collect();
    Ok(TimeSeries {
        sample_rate: meta.sample_rate,
        samples,
        start_time: meta.start_time,
    })
}

/// Read a `t,x,y,z` CSV. Samples are assumed uniformly spaced at the
/// sidecar's rate; the `t` column is only checked for order.
pub fn read_accel_csv<R: Read>(input: R, meta: &TraceMeta) -> Result<AccelTrace> {
    check_rate(meta)?;
    let samples = read_columns(input, &["t", "x", "y", "z"])?
        .into_iter()
        .map(|r| [r[1], r[2], r[3]])
        .collect();
    Ok(AccelTrace {
        sample_rate: meta.sample_rate,
        samples,
        start_time: meta.start_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::telemetry::{synth_accel, AccelEvent};

    #[test]
    fn accel_csv_round_trip_within_print_precision() {
        let t0 = chrono::NaiveDate::from_ymd_opt(2026, 3, 1)
            .unwrap()
            .and_hms_opt(8, 0, 0)
            .unwrap();
        let tr = synth_accel(
            &[AccelEvent::active(0.0, 2.0), AccelEvent::tap(3.0, 7.5)],
            4.0,
            50.0,
            1,
            t0,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_accel_csv(&tr, &mut buf).unwrap();
        let back = read_accel_csv(buf.as_slice(), &TraceMeta::for_accel(&tr)).unwrap();
        assert_eq!(back.samples.len(), tr.samples.len());
        for (a, b) in back.samples.iter().zip(&tr.samples) {
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() <= 1e-8 * b[k].abs().max(1.0));
            }
        }
    }

    #[test]
    fn lfp_csv_round_trip() {
        let ts = TimeSeries {
            sample_rate: 4.0,
            samples: vec![0.5, -1.25, 3.0],
            start_time: chrono::NaiveDateTime::default(),
        };
        let mut buf = Vec::new();
        write_lfp_csv(&ts, &mut buf).unwrap();
        assert_eq!(
            read_lfp_csv(buf.as_slice(), &TraceMeta::for_lfp(&ts)).unwrap(),
            ts
        );
    }

    #[test]
    fn malformed_row_reports_line() {
        let meta = TraceMeta {
            kind: "accel".into(),
            start_time: chrono::NaiveDateTime::default(),
            sample_rate: 50.0,
            samples: 2,
        };
        let text = "t,x,y,z\n0,0,0,1\n0.02,zero,0,1\n";
        match read_accel_csv(text.as_bytes(), &meta) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}

use std::f64::consts::TAU;

use chrono::{Duration, NaiveDateTime};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::streams;

/// Per-axis sensor noise at rest, g.
const REST_NOISE_G: f64 = 0.005;
/// Gait oscillation used for active intervals.
const GAIT_HZ: f64 = 2.0;
const GAIT_AMPLITUDE_G: f64 = 0.3;
const GAIT_NOISE_G: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccelTrace {
    pub sample_rate: f64,
    /// (x, y, z) in g.
    pub samples: Vec<[f64; 3]>,
    pub start_time: NaiveDateTime,
}

impl AccelTrace {
    pub fn time_of(&self, index: usize) -> NaiveDateTime {
        self.start_time + seconds(index as f64 / self.sample_rate)
    }

    pub fn end_time(&self) -> NaiveDateTime {
        self.time_of(self.samples.len())
    }

    /// Samples whose timestamps fall in `[from, to)`.
    pub fn window(&self, from: NaiveDateTime, to: NaiveDateTime) -> &[[f64; 3]] {
        let idx = |t: NaiveDateTime| -> usize {
            let s = (t - self.start_time).num_microseconds().unwrap_or(i64::MAX) as f64 / 1e6;
            ((s * self.sample_rate).ceil().max(0.0) as usize).min(self.samples.len())
        };
        let (a, b) = (idx(from), idx(to));
        &self.samples[a..b.max(a)]
    }
}

pub(crate) fn seconds(s: f64) -> Duration {
    Duration::microseconds((s * 1e6).round() as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AccelKind {
    Active,
    Inactive,
    /// Single-sample z spike at the start of the interval.
    Tap {
        magnitude_g: f64,
    },
}

/// An interval `[start_s, end_s)` relative to the trace start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccelEvent {
    pub start_s: f64,
    pub end_s: f64,
    #[serde(flatten)]
    pub kind: AccelKind,
}

impl AccelEvent {
    pub fn active(start_s: f64, end_s: f64) -> Self {
        Self {
            start_s,
            end_s,
            kind: AccelKind::Active,
        }
    }

    pub fn inactive(start_s: f64, end_s: f64) -> Self {
        Self {
            start_s,
            end_s,
            kind: AccelKind::Inactive,
        }
    }

    pub fn tap(at_s: f64, magnitude_g: f64) -> Self {
        Self {
            start_s: at_s,
            end_s: at_s,
            kind: AccelKind::Tap { magnitude_g },
        }
    }
}

/// Render an accelerometer trace of `duration` seconds. Time not covered by
/// any event is at rest.
pub fn synth_accel(
    events: &[AccelEvent],
    duration: f64,
    sample_rate: f64,
    seed: u64,
    start_time: NaiveDateTime,
) -> Result<AccelTrace> {
    if !(sample_rate > 0.0) || !(duration >= 0.0) {
        return Err(Error::config("sample rate must be > 0 and duration >= 0"));
    }
    let mut prev_end = f64::NEG_INFINITY;
    for e in events {
        if !(e.start_s >= 0.0 && e.end_s >= e.start_s) {
            return Err(Error::input(format!(
                "bad interval [{}, {})",
                e.start_s, e.end_s
            )));
        }
        if e.start_s < prev_end {
            return Err(Error::input(format!(
                "interval starting at {} s overlaps the previous one ending at {prev_end} s",
                e.start_s
            )));
        }
        if e.end_s > duration {
            return Err(Error::input(format!(
                "interval ends at {} s past the trace end",
                e.end_s
            )));
        }
        prev_end = e.end_s;
    }

    let n = (duration * sample_rate).round() as usize;
    let mut rng = streams::stream(seed, &[2]);
    let rest = Normal::new(0.0, REST_NOISE_G).expect("valid sigma");
    let mut samples: Vec<[f64; 3]> = (0..n)
        .map(|_| {
            [
                rest.sample(&mut rng),
                rest.sample(&mut rng),
                1.0 + rest.sample(&mut rng),
            ]
        })
        .collect();

    let index = |s: f64| ((s * sample_rate).round() as usize).min(n);
    let gait = Normal::new(0.0, GAIT_NOISE_G).expect("valid sigma");
    for (k, e) in events.iter().enumerate() {
        match e.kind {
            AccelKind::Inactive => {}
            AccelKind::Active => {
                let phase = TAU * streams::uniform(seed, &[3, k as u64]);
                let mut rng = streams::stream(seed, &[4, k as u64]);
                let (a, b) = (index(e.start_s), index(e.end_s));
                for (i, sample) in samples.iter_mut().enumerate().take(b).skip(a) {
                    let t = i as f64 / sample_rate;
                    let s = (TAU * GAIT_HZ * t + phase).sin();
                    sample[0] += 0.5 * GAIT_AMPLITUDE_G * s + gait.sample(&mut rng);
                    sample[1] += gait.sample(&mut rng);
                    sample[2] += GAIT_AMPLITUDE_G * s + gait.sample(&mut rng);
                }
            }
            AccelKind::Tap { magnitude_g } => {
                let i = index(e.start_s);
                if i < n {
                    samples[i][2] = magnitude_g;
                }
            }
        }
    }
    Ok(AccelTrace {
        sample_rate,
        samples,
        start_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t0() -> NaiveDateTime {
        chrono::NaiveDate::from_ymd_opt(2026, 1, 1)
            .unwrap()
            .and_hms_opt(12, 0, 0)
            .unwrap()
    }

    fn axis_sd(samples: &[[f64; 3]], axis: usize) -> f64 {
        let n = samples.len() as f64;
        let m = samples.iter().map(|s| s[axis]).sum::<f64>() / n;
        (samples.iter().map(|s| (s[axis] - m).powi(2)).sum::<f64>() / n).sqrt()
    }

    #[test]
    fn single_tap_gives_one_spike() {
        let tr = synth_accel(&[AccelEvent::tap(5.0, 7.5)], 20.0, 50.0, 1, t0()).unwrap();
        assert_eq!(tr.samples.iter().filter(|s| s[2] >= 7.0).count(), 1);
        assert_eq!(tr.samples[250][2], 7.5);
    }

    #[test]
    fn resting_trace_is_quiet() {
        let tr = synth_accel(&[AccelEvent::inactive(0.0, 60.0)], 60.0, 50.0, 2, t0()).unwrap();
        for axis in 0..3 {
            assert!(axis_sd(&tr.samples, axis) < 0.05);
        }
    }

    #[test]
    fn overlapping_intervals_rejected() {
        let ev = [
            AccelEvent::active(0.0, 10.0),
            AccelEvent::inactive(5.0, 20.0),
        ];
        assert!(matches!(
            synth_accel(&ev, 30.0, 50.0, 1, t0()),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn window_selects_half_open_range() {
        let tr = synth_accel(&[], 10.0, 50.0, 1, t0()).unwrap();
        assert_eq!(tr.window(t0(), t0() + Duration::seconds(2)).len(), 100);
        assert_eq!(
            tr.window(t0() + Duration::seconds(9), t0() + Duration::seconds(20))
                .len(),
            50
        );
        assert_eq!(tr.end_time(), t0() + Duration::seconds(10));
    }

    #[test]
    fn deterministic_per_seed() {
        let ev = [AccelEvent::active(1.0, 4.0), AccelEvent::tap(6.0, 8.0)];
        let a = synth_accel(&ev, 10.0, 50.0, 9, t0()).unwrap();
        let b = synth_accel(&ev, 10.0, 50.0, 9, t0()).unwrap();
        assert_eq!(a, b);
    }
}

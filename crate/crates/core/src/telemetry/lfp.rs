use std::f64::consts::TAU;

use chrono::NaiveDateTime;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{num_complex::Complex64, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::streams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub sample_rate: f64,
    pub samples: Vec<f64>,
    pub start_time: NaiveDateTime,
}

impl TimeSeries {
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn variance(&self) -> f64 {
        let n = self.samples.len() as f64;
        let mean = self.samples.iter().sum::<f64>() / n;
        self.samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LfpState {
    Restful,
    Active,
    Seizure,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LfpComponent {
    pub frequency_hz: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticLfpSpec {
    pub state: LfpState,
    pub components: Vec<LfpComponent>,
    /// Background power falls as `1 / f^noise_exponent`.
    pub noise_exponent: f64,
    /// Standard deviation of the background.
    pub noise_gain: f64,
}

impl SyntheticLfpSpec {
    /// Alert rest: a 13 Hz thalamocortical rhythm over a 1/f background.
    pub fn restful() -> Self {
        Self {
            state: LfpState::Restful,
            components: vec![LfpComponent {
                frequency_hz: 13.0,
                amplitude: 1.0,
            }],
            noise_exponent: 1.0,
            noise_gain: 0.5,
        }
    }

    pub fn active() -> Self {
        Self {
            state: LfpState::Active,
            components: vec![
                LfpComponent {
                    frequency_hz: 13.0,
                    amplitude: 0.5,
                },
                LfpComponent {
                    frequency_hz: 21.0,
                    amplitude: 0.4,
                },
            ],
            noise_exponent: 1.0,
            noise_gain: 0.6,
        }
    }

    /// Ictal activity dominated by a 2 Hz rhythm.
    pub fn seizure() -> Self {
        Self {
            state: LfpState::Seizure,
            components: vec![
                LfpComponent {
                    frequency_hz: 2.0,
                    amplitude: 3.0,
                },
                LfpComponent {
                    frequency_hz: 13.0,
                    amplitude: 0.3,
                },
            ],
            noise_exponent: 1.0,
            noise_gain: 0.5,
        }
    }

    pub fn preset(state: LfpState) -> Self {
        match state {
            LfpState::Restful => Self::restful(),
            LfpState::Active => Self::active(),
            LfpState::Seizure => Self::seizure(),
        }
    }
}

/// Sum of sinusoids plus 1/f-shaped Gaussian noise.
pub fn synth_lfp(
    spec: &SyntheticLfpSpec,
    duration: f64,
    sample_rate: f64,
    seed: u64,
    start_time: NaiveDateTime,
) -> Result<TimeSeries> {
    if !(duration > 0.0) || !(sample_rate > 0.0) {
        return Err(Error::config("duration and sample rate must be > 0"));
    }
    let nyquist = sample_rate / 2.0;
    for c in &spec.components {
        if !(c.frequency_hz > 0.0 && c.frequency_hz < nyquist) {
            return Err(Error::config(format!(
                "component at {} Hz is outside (0, {nyquist}) Hz",
                c.frequency_hz
            )));
        }
    }
    if !(spec.noise_gain >= 0.0) {
        return Err(Error::config("noise gain must be >= 0"));
    }
    let n = (duration * sample_rate).round() as usize;
    if n < 2 {
        return Err(Error::config("trace needs at least two samples"));
    }

    let mut samples = if spec.noise_gain > 0.0 {
        pink_noise(n, spec.noise_exponent, seed)
            .into_iter()
            .map(|v| v * spec.noise_gain)
            .collect()
    } else {
        vec![0.0; n]
    };
    for (k, c) in spec.components.iter().enumerate() {
        let phase = TAU * streams::uniform(seed, &[0, k as u64]);
        let w = TAU * c.frequency_hz / sample_rate;
        for (i, s) in samples.iter_mut().enumerate() {
            *s += c.amplitude * (w * i as f64 + phase).sin();
        }
    }
    Ok(TimeSeries {
        sample_rate,
        samples,
        start_time,
    })
}

/// Unit-variance noise whose power spectrum falls as `1 / f^exponent`.
fn pink_noise(n: usize, exponent: f64, seed: u64) -> Vec<f64> {
    let mut rng = streams::stream(seed, &[1]);
    let mut buf: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    buf[0] = Complex64::new(0.0, 0.0);
    for (k, b) in buf.iter_mut().enumerate().skip(1) {
        // bin k and n-k share |f|
        let f = k.min(n - k) as f64;
        *b *= f.powf(-exponent / 2.0);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let out: Vec<f64> = buf.iter().map(|c| c.re).collect();
    let mean = out.iter().sum::<f64>() / n as f64;
    let sd = (out.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
    if sd == 0.0 {
        return vec![0.0; n];
    }
    out.into_iter().map(|v| (v - mean) / sd).collect()
}

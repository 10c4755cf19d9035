use std::f64::consts::TAU;

use rustfft::{num_complex::Complex64, FftPlanner};
use serde::{Deserialize, Serialize};

use super::TimeSeries;
use crate::error::{Error, Result};

pub const DEFAULT_PROMINENCE_RATIO: f64 = 4.0;

/// Half-width, in bins, of the neighbourhood used as a peak's baseline.
const BASELINE_HALF_WIDTH: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSpectrum {
    pub freqs: Vec<f64>,
    /// One-sided power spectral density, units^2 / Hz.
    pub power: Vec<f64>,
    pub resolution: f64,
}

impl PowerSpectrum {
    /// Sum of `power * resolution`.
    pub fn total_power(&self) -> f64 {
        self.power.iter().sum::<f64>() * self.resolution
    }

    /// Frequency of the largest non-DC bin.
    pub fn peak_frequency(&self) -> Option<f64> {
        self.power
            .iter()
            .enumerate()
            .skip(1)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| self.freqs[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub frequency_hz: f64,
    pub power: f64,
}

fn hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.5 - 0.5 * (TAU * n as f64 / len as f64).cos())
        .collect()
}

/// Welch estimate: Hann-windowed periodograms averaged over overlapping
/// segments, one-sided, density-scaled.
///
/// Each segment's mean is removed before windowing and its power is booked
/// to the DC bin directly, so a constant input puts everything at 0 Hz and
/// the spectrum integrates to the mean-square of the input.
pub fn welch_psd(
    ts: &TimeSeries,
    segment_length: usize,
    overlap_fraction: f64,
) -> Result<PowerSpectrum> {
    if !(0.0..1.0).contains(&overlap_fraction) {
        return Err(Error::input(format!(
            "overlap fraction {overlap_fraction} outside [0, 1)"
        )));
    }
    if segment_length < 2 {
        return Err(Error::input("segment length must be at least 2"));
    }
    if ts.samples.len() < segment_length {
        return Err(Error::input(format!(
            "series of {} samples is shorter than one segment of {segment_length}",
            ts.samples.len()
        )));
    }
    let fs = ts.sample_rate;
    let window = hann(segment_length);
    let window_power: f64 = window.iter().map(|w| w * w).sum();
    let hop = ((segment_length as f64 * (1.0 - overlap_fraction)).round() as usize).max(1);
    let n_bins = segment_length / 2 + 1;
    let resolution = fs / segment_length as f64;

    let fft = FftPlanner::new().plan_fft_forward(segment_length);
    let mut acc = vec![0.0; n_bins];
    let mut segments = 0usize;
    let mut buf = vec![Complex64::new(0.0, 0.0); segment_length];
    let mut start = 0;
    while start + segment_length <= ts.samples.len() {
        let seg = &ts.samples[start..start + segment_length];
        let mean = seg.iter().sum::<f64>() / segment_length as f64;
        for ((b, &x), &w) in buf.iter_mut().zip(seg).zip(&window) {
            *b = Complex64::new((x - mean) * w, 0.0);
        }
        fft.process(&mut buf);
        for (k, a) in acc.iter_mut().enumerate() {
            let mut p = buf[k].norm_sqr() / (fs * window_power);
            let nyquist_bin = segment_length.is_multiple_of(2) && k == segment_length / 2;
            if k > 0 && !nyquist_bin {
                p *= 2.0;
            }
            *a += p;
        }
        acc[0] = acc[0] - buf[0].norm_sqr() / (fs * window_power) + mean * mean / resolution;
        segments += 1;
        start += hop;
    }
    let power = acc.into_iter().map(|p| p / segments as f64).collect();
    let freqs = (0..n_bins).map(|k| k as f64 * resolution).collect();
    Ok(PowerSpectrum {
        freqs,
        power,
        resolution,
    })
}

/// Local maxima inside `band` that stand `min_prominence_ratio` times above
/// the median of their neighbourhood, strongest first.
pub fn dominant_peaks(
    ps: &PowerSpectrum,
    band: [f64; 2],
    min_prominence_ratio: f64,
) -> Result<Vec<Peak>> {
    let n = ps.power.len();
    if n < 3 {
        return Err(Error::input("spectrum too short for peak picking"));
    }
    let top = ps.freqs[n - 1];
    if !(band[0] <= band[1]) || band[0] < 0.0 || band[1] > top + ps.resolution / 2.0 {
        return Err(Error::input(format!(
            "band {band:?} outside the spectrum [0, {top}] Hz"
        )));
    }
    let in_band: Vec<usize> = (0..n)
        .filter(|&i| ps.freqs[i] >= band[0] && ps.freqs[i] <= band[1])
        .collect();
    if in_band.is_empty() {
        return Err(Error::input(format!(
            "band {band:?} contains no frequency bins"
        )));
    }

    let p = &ps.power;
    let mut peaks: Vec<Peak> = in_band
        .into_iter()
        .filter(|&i| {
            let left_ok = i == 0 || p[i] > p[i - 1];
            let right_ok = i + 1 == n || p[i] >= p[i + 1];
            left_ok && right_ok && (i > 0 || p[1] < p[0])
        })
        .filter(|&i| {
            let lo = i.saturating_sub(BASELINE_HALF_WIDTH);
            let hi = (i + BASELINE_HALF_WIDTH).min(n - 1);
            let mut window: Vec<f64> = p[lo..=hi].to_vec();
            window.sort_by(f64::total_cmp);
            let median = window[window.len() / 2];
            p[i] > min_prominence_ratio * median
        })
        .map(|i| Peak {
            frequency_hz: ps.freqs[i],
            power: p[i],
        })
        .collect();
    peaks.sort_by(|a, b| b.power.total_cmp(&a.power));
    Ok(peaks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::telemetry::{synth_lfp, LfpComponent, LfpState, SyntheticLfpSpec};
    use chrono::NaiveDateTime;

    fn t0() -> NaiveDateTime {
        chrono::NaiveDate::from_ymd_opt(2026, 1, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap()
    }

    fn series(samples: Vec<f64>, rate: f64) -> TimeSeries {
        TimeSeries {
            sample_rate: rate,
            samples,
            start_time: t0(),
        }
    }

    #[test]
    fn constant_series_is_all_dc() {
        let ps = welch_psd(&series(vec![2.0; 1024], 250.0), 256, 0.5).unwrap();
        assert!(ps.power[0] > 0.0);
        assert!(ps.power[1..].iter().all(|&p| p.abs() < 1e-20));
        assert!((ps.total_power() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn short_series_rejected() {
        assert!(matches!(
            welch_psd(&series(vec![0.0; 100], 250.0), 256, 0.5),
            Err(Error::Input(_))
        ));
        assert!(welch_psd(&series(vec![0.0; 300], 250.0), 256, 1.0).is_err());
    }

    #[test]
    fn resolution_and_bins() {
        let ps = welch_psd(&series(vec![0.0; 2000], 250.0), 512, 0.5).unwrap();
        assert_eq!(ps.freqs.len(), 257);
        assert!((ps.resolution - 250.0 / 512.0).abs() < 1e-15);
        assert_eq!(ps.freqs[256], 125.0);
    }

    /// Independent check: direct O(n^2) DFT of one windowed segment.
    #[test]
    fn single_segment_matches_direct_dft() {
        let rate = 100.0;
        let x: Vec<f64> = (0..64)
            .map(|i| (0.3 * i as f64).sin() + 0.1 * (i % 7) as f64)
            .collect();
        let ps = welch_psd(&series(x.clone(), rate), 64, 0.0).unwrap();
        let mean = x.iter().sum::<f64>() / 64.0;
        let w = hann(64);
        let wp: f64 = w.iter().map(|v| v * v).sum();
        for k in 1..32 {
            let (mut re, mut im) = (0.0, 0.0);
            for (n, (&xv, &wv)) in x.iter().zip(&w).enumerate() {
                let ang = -TAU * (k * n) as f64 / 64.0;
                re += (xv - mean) * wv * ang.cos();
                im += (xv - mean) * wv * ang.sin();
            }
            let expected = 2.0 * (re * re + im * im) / (rate * wp);
            assert!((ps.power[k] - expected).abs() < 1e-10 * expected.max(1.0));
        }
    }

    #[test]
    fn sine_peak_is_at_its_frequency() {
        let rate = 250.0;
        let x: Vec<f64> = (0..2000)
            .map(|i| (TAU * 13.0 * i as f64 / rate).sin())
            .collect();
        let ps = welch_psd(&series(x, rate), 512, 0.5).unwrap();
        let f = ps.peak_frequency().unwrap();
        assert!((f - 13.0).abs() <= ps.resolution / 2.0 + 1e-9, "{f}");
        // Unit sine: variance 0.5.
        assert!((ps.total_power() - 0.5).abs() < 0.05);
    }

    #[test]
    fn flat_spectrum_has_no_peaks() {
        let ps = PowerSpectrum {
            freqs: (0..100).map(|k| k as f64 * 0.5).collect(),
            power: vec![1.0; 100],
            resolution: 0.5,
        };
        assert!(dominant_peaks(&ps, [1.0, 40.0], 4.0).unwrap().is_empty());
    }

    #[test]
    fn empty_band_rejected() {
        let ps = PowerSpectrum {
            freqs: (0..100).map(|k| k as f64 * 0.5).collect(),
            power: vec![1.0; 100],
            resolution: 0.5,
        };
        assert!(matches!(
            dominant_peaks(&ps, [10.1, 10.2], 4.0),
            Err(Error::Input(_))
        ));
        assert!(dominant_peaks(&ps, [10.0, 80.0], 4.0).is_err());
    }

    #[test]
    fn two_components_ordered_by_amplitude() {
        let spec = SyntheticLfpSpec {
            state: LfpState::Seizure,
            components: vec![
                LfpComponent {
                    frequency_hz: 2.0,
                    amplitude: 2.0,
                },
                LfpComponent {
                    frequency_hz: 13.0,
                    amplitude: 0.7,
                },
            ],
            noise_exponent: 1.0,
            noise_gain: 0.3,
        };
        let ts = synth_lfp(&spec, 32.0, 250.0, 4, t0()).unwrap();
        let ps = welch_psd(&ts, 512, 0.5).unwrap();
        let peaks = dominant_peaks(&ps, [1.0, 20.0], DEFAULT_PROMINENCE_RATIO).unwrap();
        assert!(peaks.len() >= 2, "{peaks:?}");
        assert!((peaks[0].frequency_hz - 2.0).abs() <= ps.resolution);
        assert!((peaks[1].frequency_hz - 13.0).abs() <= ps.resolution);
    }
}

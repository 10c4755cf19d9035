//! Sine circle map: a phase oscillator with natural frequency `f0` kicked by
//! periodic pulses at frequency `fs`,
//!
//! ```text
//! theta' = theta + 2 pi (f0 / fs) + I sin(theta)
//! ```
//!
//! Phases are never reduced modulo 2 pi. The winding number of a trial is
//! read from the cumulative phase advance over `n_pulses` kicks.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::streams;

pub const DEFAULT_PULSES: usize = 50;
pub const DEFAULT_TRIALS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleMapConfig {
    /// Natural frequency of the oscillator, Hz.
    pub f0: f64,
    /// Stimulation (driver) frequency, Hz.
    pub fs: f64,
    /// Dimensionless stimulation amplitude `I`.
    pub coupling: f64,
    pub n_pulses: usize,
    pub n_trials: usize,
    pub seed: u64,
}

impl CircleMapConfig {
    pub fn new(f0: f64, fs: f64, coupling: f64) -> Self {
        Self {
            f0,
            fs,
            coupling,
            n_pulses: DEFAULT_PULSES,
            n_trials: DEFAULT_TRIALS,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_pulses(mut self, n_pulses: usize) -> Self {
        self.n_pulses = n_pulses;
        self
    }

    pub fn with_trials(mut self, n_trials: usize) -> Self {
        self.n_trials = n_trials;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f0 > 0.0 && self.f0.is_finite()) {
            return Err(Error::config(format!(
                "natural frequency must be > 0, got {}",
                self.f0
            )));
        }
        if !(self.fs > 0.0 && self.fs.is_finite()) {
            return Err(Error::config(format!(
                "stimulation frequency must be > 0, got {}",
                self.fs
            )));
        }
        if !(self.coupling >= 0.0 && self.coupling.is_finite()) {
            return Err(Error::config(format!(
                "coupling must be >= 0, got {}",
                self.coupling
            )));
        }
        if self.n_pulses == 0 {
            return Err(Error::config("n_pulses must be >= 1"));
        }
        if self.n_trials == 0 {
            return Err(Error::config("n_trials must be >= 1"));
        }
        Ok(())
    }

    /// Phase advance per pulse in the absence of stimulation, radians.
    #[inline]
    fn free_advance(&self) -> f64 {
        TAU * (self.f0 / self.fs)
    }
}

/// Unwrapped phases `theta_0 ..= theta_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTrajectory {
    pub phases: Vec<f64>,
}

impl PhaseTrajectory {
    pub fn winding(&self) -> f64 {
        let n = self.phases.len() - 1;
        (self.phases[n] - self.phases[0]) / (TAU * n as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindingEstimate {
    pub mean: f64,
    /// Population standard deviation of `per_trial`.
    pub std_dev: f64,
    pub per_trial: Vec<f64>,
}

/// One application of the map. The result is not wrapped.
pub fn step(theta: f64, config: &CircleMapConfig) -> Result<f64> {
    config.validate()?;
    Ok(advance(theta, config.free_advance(), config.coupling))
}

#[inline(always)]
fn advance(theta: f64, free: f64, coupling: f64) -> f64 {
    theta + free + coupling * theta.sin()
}

/// Iterate `n_pulses` kicks from `theta0`.
pub fn trajectory(theta0: f64, config: &CircleMapConfig) -> Result<PhaseTrajectory> {
    config.validate()?;
    let free = config.free_advance();
    let mut phases = Vec::with_capacity(config.n_pulses + 1);
    let mut theta = theta0;
    phases.push(theta);
    for _ in 0..config.n_pulses {
        theta = advance(theta, free, config.coupling);
        phases.push(theta);
    }
    Ok(PhaseTrajectory { phases })
}

/// Initial phase of trial `trial` out of `n_trials`.
///
/// Trial `t` draws uniformly inside the stratum `[2 pi t / T, 2 pi (t + 1) / T)`
/// from its own counter-based stream, so the trial set as a whole is spread
/// uniformly over the circle.
pub fn initial_phase(seed: u64, trial: usize, n_trials: usize) -> f64 {
    let u = streams::uniform(seed, &[trial as u64]);
    TAU * (trial as f64 + u) / n_trials as f64
}

/// Winding number averaged over `n_trials` initial phases.
pub fn winding_number(config: &CircleMapConfig) -> Result<WindingEstimate> {
    config.validate()?;
    let free = config.free_advance();
    let scale = TAU * config.n_pulses as f64;
    let per_trial: Vec<f64> = (0..config.n_trials)
        .map(|t| {
            let theta0 = initial_phase(config.seed, t, config.n_trials);
            let mut theta = theta0;
            for _ in 0..config.n_pulses {
                theta = advance(theta, free, config.coupling);
            }
            (theta - theta0) / scale
        })
        .collect();
    let n = per_trial.len() as f64;
    let mean = per_trial.iter().sum::<f64>() / n;
    let var = per_trial.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / n;
    Ok(WindingEstimate {
        mean,
        std_dev: var.sqrt(),
        per_trial,
    })
}

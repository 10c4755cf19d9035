//! Arnold-tongue sweeps over the sine circle map.
//!
//! Two planes are supported: stimulation frequency against amplitude at a
//! fixed natural frequency, and natural frequency against *equivalent*
//! amplitude at a fixed stimulation frequency. Equivalent amplitude scales
//! the coupling by `f0 / f_max`, so the actual coupling of a cell in the
//! second plane is `eq * f_max / f0`.

mod io;
mod lock;
mod regions;
mod select;

pub use io::{read_grid_json, write_grid_csv, write_grid_json};
pub use lock::{classify_lock, RationalLock};
pub use regions::{tongue_regions, TongueRegion};
pub use select::LockWidth;
pub use select::{
    evaluate_candidate, select_stim_frequency, CandidateReport, Selection, SelectionContext,
    StimFrequencyChoice,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circlemap::{self, CircleMapConfig, DEFAULT_PULSES, DEFAULT_TRIALS};
use crate::error::{Error, Result};
use crate::streams;

pub const DEFAULT_MAX_Q: u64 = 6;

/// Default lock tolerance: half the winding resolution of an `n_pulses` run.
pub fn default_tolerance(n_pulses: usize) -> f64 {
    1.0 / (2.0 * n_pulses as f64)
}

/// Uniformly spaced axis with inclusive endpoints.
///
/// A single-step axis is allowed when `min == max`; it holds one value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl SweepAxis {
    pub fn new(min: f64, max: f64, steps: usize) -> Self {
        Self { min, max, steps }
    }

    pub fn single(value: f64) -> Self {
        Self {
            min: value,
            max: value,
            steps: 1,
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::config(format!("{name} axis bounds must be finite")));
        }
        match self.steps {
            0 => Err(Error::config(format!(
                "{name} axis needs at least one step"
            ))),
            1 if self.min != self.max => Err(Error::config(format!(
                "{name} axis with one step needs min == max"
            ))),
            1 => Ok(()),
            _ if self.min >= self.max => Err(Error::config(format!(
                "{name} axis needs min < max, got [{}, {}]",
                self.min, self.max
            ))),
            _ => Ok(()),
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.steps <= 1 {
            return self.min;
        }
        if i + 1 == self.steps {
            return self.max;
        }
        self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64
    }

    pub fn spacing(&self) -> f64 {
        if self.steps <= 1 {
            0.0
        } else {
            (self.max - self.min) / (self.steps - 1) as f64
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.steps).map(move |i| self.value(i))
    }

    /// Index of the grid value closest to `v`.
    pub fn nearest_index(&self, v: f64) -> usize {
        if self.steps <= 1 {
            return 0;
        }
        let t = ((v - self.min) / self.spacing()).round();
        t.clamp(0.0, (self.steps - 1) as f64) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridMode {
    /// x = stimulation frequency (Hz), y = coupling; natural frequency fixed.
    FsVsAmplitude,
    /// x = natural frequency (Hz), y = equivalent amplitude; stimulation
    /// frequency fixed.
    F0VsEquivalentAmplitude,
}

/// Everything needed to compute a tongue grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub mode: GridMode,
    pub x_axis: SweepAxis,
    pub y_axis: SweepAxis,
    /// f0 in `FsVsAmplitude` mode, fs in `F0VsEquivalentAmplitude` mode.
    pub fixed_frequency: f64,
    /// Reference frequency of the equivalent-amplitude transform.
    pub f_max: Option<f64>,
    pub n_pulses: usize,
    pub n_trials: usize,
    pub seed: u64,
}

impl GridSpec {
    pub fn fs_vs_amplitude(f0: f64, fs_axis: SweepAxis, coupling_axis: SweepAxis) -> Self {
        Self {
            mode: GridMode::FsVsAmplitude,
            x_axis: fs_axis,
            y_axis: coupling_axis,
            fixed_frequency: f0,
            f_max: None,
            n_pulses: DEFAULT_PULSES,
            n_trials: DEFAULT_TRIALS,
            seed: 0,
        }
    }

    pub fn f0_vs_equivalent_amplitude(
        fs: f64,
        f0_axis: SweepAxis,
        eq_axis: SweepAxis,
        f_max: f64,
    ) -> Self {
        Self {
            mode: GridMode::F0VsEquivalentAmplitude,
            x_axis: f0_axis,
            y_axis: eq_axis,
            fixed_frequency: fs,
            f_max: Some(f_max),
            n_pulses: DEFAULT_PULSES,
            n_trials: DEFAULT_TRIALS,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.x_axis.validate("x")?;
        self.y_axis.validate("y")?;
        if !(self.x_axis.min > 0.0) {
            return Err(Error::config("frequency axis must be strictly positive"));
        }
        if !(self.y_axis.min >= 0.0) {
            return Err(Error::config("amplitude axis must be non-negative"));
        }
        if !(self.fixed_frequency > 0.0 && self.fixed_frequency.is_finite()) {
            return Err(Error::config("fixed frequency must be > 0"));
        }
        if self.n_pulses == 0 || self.n_trials == 0 {
            return Err(Error::config("n_pulses and n_trials must be >= 1"));
        }
        if self.mode == GridMode::F0VsEquivalentAmplitude {
            let f_max = self
                .f_max
                .ok_or_else(|| Error::config("equivalent-amplitude grid requires f_max"))?;
            if !(f_max > 0.0) {
                return Err(Error::config("f_max must be > 0"));
            }
            if f_max < self.x_axis.max {
                return Err(Error::config(format!(
                    "f_max {f_max} is below the natural-frequency axis maximum {}",
                    self.x_axis.max
                )));
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.y_axis.steps
    }

    pub fn cols(&self) -> usize {
        self.x_axis.steps
    }

    /// Circle-map configuration of cell `(row, col)`, including its seed.
    pub fn cell_config(&self, row: usize, col: usize) -> CircleMapConfig {
        let x = self.x_axis.value(col);
        let y = self.y_axis.value(row);
        let (f0, fs, coupling) = match self.mode {
            GridMode::FsVsAmplitude => (self.fixed_frequency, x, y),
            GridMode::F0VsEquivalentAmplitude => {
                let f_max = self.f_max.unwrap_or(self.x_axis.max);
                (
                    x,
                    self.fixed_frequency,
                    coupling_from_equivalent(y, x, f_max),
                )
            }
        };
        CircleMapConfig {
            f0,
            fs,
            coupling,
            n_pulses: self.n_pulses,
            n_trials: self.n_trials,
            seed: cell_seed(self.seed, row * self.cols() + col),
        }
    }
}

/// Seed of the cell with row-major index `index`.
pub fn cell_seed(seed: u64, index: usize) -> u64 {
    streams::derive(seed, &[index as u64])
}

/// A filled grid of mean winding numbers, row-major with `y` as the row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TongueGrid {
    pub spec: GridSpec,
    pub winding: Vec<f64>,
}

impl TongueGrid {
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.winding[row * self.spec.cols() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let c = self.spec.cols();
        &self.winding[row * c..(row + 1) * c]
    }

    /// Lock of every cell, row-major.
    pub fn classify(&self, max_q: u64, tol: f64) -> Vec<Option<RationalLock>> {
        self.winding
            .iter()
            .map(|&w| classify_lock(w, max_q, tol))
            .collect()
    }
}

/// Coupling scaled by `f0 / f_max`.
pub fn equivalent_amplitude(coupling: f64, f0: f64, f_max: f64) -> Result<f64> {
    check_transform(coupling, f0, f_max)?;
    Ok(coupling * f0 / f_max)
}

/// Inverse of [`equivalent_amplitude`].
pub fn actual_coupling(equivalent: f64, f0: f64, f_max: f64) -> Result<f64> {
    check_transform(equivalent, f0, f_max)?;
    Ok(coupling_from_equivalent(equivalent, f0, f_max))
}

fn coupling_from_equivalent(equivalent: f64, f0: f64, f_max: f64) -> f64 {
    equivalent * f_max / f0
}

fn check_transform(amplitude: f64, f0: f64, f_max: f64) -> Result<()> {
    if !(f0 > 0.0) || !(f_max > 0.0) {
        return Err(Error::config(format!(
            "equivalent amplitude needs f0 > 0 and f_max > 0, got f0={f0}, f_max={f_max}"
        )));
    }
    if !(amplitude >= 0.0) {
        return Err(Error::config("amplitude must be non-negative"));
    }
    Ok(())
}

/// Fill a grid using the global rayon pool.
pub fn sweep(spec: &GridSpec) -> Result<TongueGrid> {
    spec.validate()?;
    let cols = spec.cols();
    let winding = (0..spec.rows() * cols)
        .into_par_iter()
        .map(|idx| {
            let cfg = spec.cell_config(idx / cols, idx % cols);
            circlemap::winding_number(&cfg).map(|w| w.mean)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(TongueGrid {
        spec: spec.clone(),
        winding,
    })
}

/// Fill a grid on a dedicated pool of `workers` threads.
pub fn sweep_with_workers(spec: &GridSpec, workers: usize) -> Result<TongueGrid> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::config(format!("thread pool: {e}")))?;
    pool.install(|| sweep(spec))
}

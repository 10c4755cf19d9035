use std::path::PathBuf;

use chrono::NaiveDateTime;
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use chronostim::diary::Alternative;
use chronostim::telemetry::LfpState;
use chronostim::tongues::GridMode;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_START: &str = "2026-01-01T00:00:00";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    /// x = stimulation frequency, y = coupling I, natural frequency fixed
    FsVsAmplitude,
    /// x = natural frequency, y = equivalent amplitude, stimulation frequency fixed
    F0VsEquivalent,
}

impl From<ModeArg> for GridMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::FsVsAmplitude => GridMode::FsVsAmplitude,
            ModeArg::F0VsEquivalent => GridMode::F0VsEquivalentAmplitude,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlternativeArg {
    XLess,
    XGreater,
}

impl From<AlternativeArg> for Alternative {
    fn from(a: AlternativeArg) -> Self {
        match a {
            AlternativeArg::XLess => Alternative::XLess,
            AlternativeArg::XGreater => Alternative::XGreater,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateArg {
    Restful,
    Active,
    Seizure,
}

impl From<StateArg> for LfpState {
    fn from(s: StateArg) -> Self {
        match s {
            StateArg::Restful => LfpState::Restful,
            StateArg::Active => LfpState::Active,
            StateArg::Seizure => LfpState::Seizure,
        }
    }
}

fn default_start() -> NaiveDateTime {
    DEFAULT_START.parse().expect("valid default start")
}

/// Winding-number sweep over a parameter plane.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct TongueArgs {
    #[arg(long, value_enum, default_value = "fs-vs-amplitude")]
    pub mode: ModeArg,
    /// Natural frequency in fs-vs-amplitude mode
    #[arg(long, default_value_t = 13.0)]
    pub f0_hz: f64,
    /// Stimulation frequency in f0-vs-equivalent mode
    #[arg(long, default_value_t = 13.0)]
    pub fs_hz: f64,
    /// Frequency axis [default: 6 (fs mode) or 1 (f0 mode)]
    #[arg(long)]
    pub x_min_hz: Option<f64>,
    /// [default: 30 (fs mode) or 26 (f0 mode)]
    #[arg(long)]
    pub x_max_hz: Option<f64>,
    /// [default: 241 (fs mode) or 251 (f0 mode)]
    #[arg(long)]
    pub x_steps: Option<usize>,
    /// Amplitude axis [default: 0 (fs mode) or 0.05 (f0 mode)]
    #[arg(long)]
    pub i_min: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub i_max: f64,
    /// [default: 101 (fs mode) or 96 (f0 mode)]
    #[arg(long)]
    pub i_steps: Option<usize>,
    /// Reference frequency of the equivalent-amplitude transform
    #[arg(long, default_value_t = 26.0)]
    pub f_max_hz: f64,
    #[arg(long, default_value_t = 50)]
    pub pulses: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 6)]
    pub max_q: u64,
    /// Lock tolerance [default: 1 / (2 * pulses)]
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value = "tongue.csv")]
    pub out: PathBuf,
    /// Heatmap with tongue outlines
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Region report (JSON)
    #[arg(long)]
    pub regions: Option<PathBuf>,
    /// Resolved-configuration file [default: next to --out]
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

impl TongueArgs {
    /// Fill mode-dependent defaults.
    pub fn resolve(&mut self) {
        let fs_mode = self.mode == ModeArg::FsVsAmplitude;
        let pick = |fs: f64, f0: f64| if fs_mode { fs } else { f0 };
        self.x_min_hz.get_or_insert(pick(6.0, 1.0));
        self.x_max_hz.get_or_insert(pick(30.0, 26.0));
        self.x_steps.get_or_insert(if fs_mode { 241 } else { 251 });
        self.i_min.get_or_insert(pick(0.0, 0.05));
        self.i_steps.get_or_insert(if fs_mode { 101 } else { 96 });
        self.tol
            .get_or_insert(chronostim::tongues::default_tolerance(self.pulses));
    }
}

/// Pick a stimulation frequency that entrains the healthy rhythm.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SelectArgs {
    /// Healthy rhythm; measured from a synthetic restful trace when absent
    #[arg(long)]
    pub healthy_hz: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub band_low_hz: f64,
    #[arg(long, default_value_t = 3.0)]
    pub band_high_hz: f64,
    #[arg(long, default_value_t = 10.0)]
    pub candidates_min_hz: f64,
    #[arg(long, default_value_t = 16.0)]
    pub candidates_max_hz: f64,
    #[arg(long, default_value_t = 7)]
    pub candidates_steps: usize,
    /// Equivalent amplitude at which candidates are judged
    #[arg(long, default_value_t = 0.5)]
    pub eq_amplitude: f64,
    #[arg(long, default_value_t = 6)]
    pub max_q: u64,
    /// Band locks must be narrower than this fraction of the 1:1 width
    #[arg(long, default_value_t = 0.1)]
    pub narrowness_ratio: f64,
    #[arg(long, default_value_t = 1.0)]
    pub f0_min_hz: f64,
    #[arg(long, default_value_t = 26.0)]
    pub f0_max_hz: f64,
    #[arg(long, default_value_t = 251)]
    pub f0_steps: usize,
    #[arg(long, default_value_t = 26.0)]
    pub f_max_hz: f64,
    #[arg(long, default_value_t = 50)]
    pub pulses: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Lock tolerance [default: 1 / (2 * pulses)]
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Length of the synthetic restful trace
    #[arg(long, default_value_t = 120.0)]
    pub lfp_seconds: f64,
    #[arg(long, default_value_t = 250.0)]
    pub lfp_rate_hz: f64,
    #[arg(long, default_value_t = 512)]
    pub segment: usize,
    #[arg(long, default_value_t = 0.5)]
    pub overlap: f64,
    #[arg(long, default_value_t = 8.0)]
    pub peak_band_low_hz: f64,
    #[arg(long, default_value_t = 20.0)]
    pub peak_band_high_hz: f64,
    #[arg(long, default_value = "selection.json")]
    pub out: PathBuf,
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

impl SelectArgs {
    pub fn resolve(&mut self) {
        self.tol
            .get_or_insert(chronostim::tongues::default_tolerance(self.pulses));
    }
}

/// Power spectrum and dominant peaks of a field-potential trace.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PsdArgs {
    /// `t,v` CSV; synthesized when absent
    #[arg(long)]
    pub lfp: Option<PathBuf>,
    /// JSON sidecar of --lfp [default: <lfp>.meta.json]
    #[arg(long)]
    pub lfp_meta: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "restful")]
    pub state: StateArg,
    #[arg(long, default_value_t = 60.0)]
    pub seconds: f64,
    #[arg(long, default_value_t = 250.0)]
    pub rate_hz: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 512)]
    pub segment: usize,
    #[arg(long, default_value_t = 0.5)]
    pub overlap: f64,
    #[arg(long, default_value_t = 1.0)]
    pub band_low_hz: f64,
    #[arg(long, default_value_t = 40.0)]
    pub band_high_hz: f64,
    #[arg(long, default_value_t = 4.0)]
    pub prominence: f64,
    #[arg(long, default_value = "spectrum.csv")]
    pub out: PathBuf,
    /// Peak list (JSON)
    #[arg(long)]
    pub peaks: Option<PathBuf>,
    /// Also write the synthetic trace (CSV plus .meta.json)
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
}

/// Run the stimulation controller over an accelerometer record.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    /// Clock schedule JSON [default: day 07:00, night 21:00]
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    /// Adaptive configuration JSON; missing fields take defaults
    #[arg(long)]
    pub adaptive: Option<PathBuf>,
    /// `t,x,y,z` CSV
    #[arg(long, conflicts_with = "profile")]
    pub accel: Option<PathBuf>,
    /// JSON sidecar of --accel [default: <accel>.meta.json]
    #[arg(long)]
    pub accel_meta: Option<PathBuf>,
    /// JSON list of activity/tap events to synthesize a trace from
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long, default_value_t = 50.0)]
    pub accel_rate_hz: f64,
    #[arg(long)]
    pub tap_threshold_g: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = DEFAULT_START)]
    pub start: NaiveDateTime,
    #[arg(long, default_value_t = 86_400.0)]
    pub duration_s: f64,
    /// Engage the fallback program at this time
    #[arg(long)]
    pub fallback_at: Option<NaiveDateTime>,
    #[arg(long, default_value = "events.csv")]
    pub log: PathBuf,
    #[arg(long, default_value = "timeline.csv")]
    pub timeline: PathBuf,
    #[arg(long, default_value = "rose.svg")]
    pub rose: PathBuf,
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
}

/// Synthetic seizure process under one or two stimulation policies.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct HarnessArgs {
    #[arg(long, default_value_t = 30)]
    pub days: u32,
    /// Seizure model JSON; missing fields take defaults
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Policy JSON [default: built-in schedule and adaptive settings]
    #[arg(long)]
    pub policy_a: Option<PathBuf>,
    /// Second policy; compared against A [default: same as A]
    #[arg(long)]
    pub policy_b: Option<PathBuf>,
    /// Replicates per policy; runs a comparison when given
    #[arg(long)]
    pub reps: Option<usize>,
    /// Carer taps the device this long after every seizure (both policies)
    #[arg(long)]
    pub tap_delay_s: Option<f64>,
    #[arg(long, value_enum, default_value = "x-less")]
    pub alternative: AlternativeArg,
    #[arg(long, default_value = DEFAULT_START)]
    pub start: NaiveDateTime,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = "harness.json")]
    pub out: PathBuf,
    /// Diary CSV of a single run
    #[arg(long)]
    pub diary: Option<PathBuf>,
    /// Stimulation rose of a single run
    #[arg(long)]
    pub rose: Option<PathBuf>,
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Occurrence periods, Mann-Whitney tests and interruption rate of a diary.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct StatsArgs {
    /// Diary CSV; repeat to merge several files
    #[arg(long, required = true)]
    pub diary: Vec<PathBuf>,
    /// Seizure-free hours that close an occurrence period
    #[arg(long, default_value_t = chronostim::diary::DEFAULT_GAP_HOURS)]
    pub gap_hours: f64,
    /// Events before this time form the "pre" epoch (sample x)
    #[arg(long)]
    pub split: Option<NaiveDateTime>,
    #[arg(long, value_enum, default_value = "x-greater")]
    pub alternative: AlternativeArg,
    /// Report JSON [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
}

pub fn start_default() -> NaiveDateTime {
    default_start()
}

//! Synthetic field-potential and accelerometer traces, Welch spectra and
//! dominant-rhythm extraction.

mod accel;
mod io;
mod lfp;
mod psd;

pub use accel::{synth_accel, AccelEvent, AccelKind, AccelTrace};
pub use io::{
    read_accel_csv, read_lfp_csv, write_accel_csv, write_lfp_csv, write_spectrum_csv, TraceMeta,
};
pub use lfp::{synth_lfp, LfpComponent, LfpState, SyntheticLfpSpec, TimeSeries};
pub use psd::{dominant_peaks, welch_psd, Peak, PowerSpectrum, DEFAULT_PROMINENCE_RATIO};

pub const DEFAULT_LFP_RATE_HZ: f64 = 250.0;
pub const DEFAULT_ACCEL_RATE_HZ: f64 = 50.0;

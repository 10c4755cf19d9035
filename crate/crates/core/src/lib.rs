//! Entrainment analysis and multi-scale chronotherapy scheduling for
//! neurostimulation.
//!
//! * [`circlemap`] iterates the sine circle map and estimates winding numbers.
//! * [`tongues`] sweeps winding numbers over parameter planes, classifies
//!   Arnold tongues and picks stimulation frequencies that entrain a healthy
//!   rhythm while avoiding pathological subharmonics.
//! * [`telemetry`] synthesizes field-potential and accelerometer traces and
//!   estimates power spectra.
//! * [`scheduler`] is the circadian / activity / tap-boost control state
//!   machine.
//! * [`diary`] groups seizure diaries into occurrence periods and runs
//!   one-tailed Mann-Whitney tests.
//! * [`simharness`] couples the scheduler to a stochastic seizure process for
//!   policy comparison.
//! * [`render`] draws tongue heatmaps and 24 h stimulation roses as SVG.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circlemap;
pub mod diary;
pub mod error;
pub mod format;
pub mod render;
pub mod scheduler;
pub mod simharness;
pub mod streams;
pub mod telemetry;
pub mod tongues;

pub use error::{Error, Result};

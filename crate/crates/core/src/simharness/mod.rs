//! Synthetic seizure process driven by the stimulation controller.
//!
//! This is a modeling layer for exercising the control loop end to end and
//! comparing policies; its effect sizes are configuration, not estimates.
//! Seizures arrive as a thinned inhomogeneous Poisson process with
//! Hawkes-style self-excitation whose rate is scaled by an entrainment
//! factor read off the Arnold-tongue structure of the program in force.

mod compare;
mod entrain;
mod model;
mod sim;

pub use compare::{
    compare_policies, compare_policies_with_workers, replicate_seed, ComparisonSpec,
    PolicyComparison, PolicySummary,
};
pub use entrain::{assess_program, entrainment_factor, ProgramAssessment};
pub use model::{ModelOverrides, SeizureModelConfig, TongueParams};
pub use sim::{
    simulate_days, ActivityProfile, Policy, RestWindow, SeizureRecord, SimResult, TapPolicy,
};

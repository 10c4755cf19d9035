use serde::{Deserialize, Serialize};

use crate::diary::DEFAULT_GAP_HOURS;
use crate::error::{Error, Result};
use crate::tongues::{SelectionContext, DEFAULT_MAX_Q};

/// How stimulation programs are judged against the tongue structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TongueParams {
    pub healthy_f0_hz: f64,
    pub pathological_band_hz: [f64; 2],
    /// Equivalent amplitude per mA of stimulation current.
    pub ma_to_equivalent: f64,
    pub max_q: u64,
    /// A band lock at least this fraction of the 1:1 width counts as harmful.
    pub narrowness_ratio: f64,
    pub context: SelectionContext,
}

impl Default for TongueParams {
    fn default() -> Self {
        Self {
            healthy_f0_hz: 12.0,
            pathological_band_hz: [2.0, 3.0],
            ma_to_equivalent: 0.6,
            max_q: DEFAULT_MAX_Q,
            narrowness_ratio: 0.1,
            context: SelectionContext::default(),
        }
    }
}

/// Rate model of the synthetic seizure process.
///
/// Rate = base × circadian(hour) × entrainment(program) × (1 + excitation),
/// where each seizure adds `cluster_gain` to the excitation, which then
/// decays at `cluster_decay_per_h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeizureModelConfig {
    pub base_rate_per_day: f64,
    /// Multiplier for each clock hour, 00 to 23.
    pub circadian_profile: [f64; 24],
    pub cluster_gain: f64,
    pub cluster_decay_per_h: f64,
    pub entrainment_protective: f64,
    pub entrainment_harmful: f64,
    pub interruption_success_prob: f64,
    pub gap_threshold_h: f64,
    pub tongue: TongueParams,
    pub seed: u64,
}

impl Default for SeizureModelConfig {
    fn default() -> Self {
        Self {
            base_rate_per_day: 0.15,
            circadian_profile: [1.0; 24],
            cluster_gain: 30.0,
            cluster_decay_per_h: 0.5,
            entrainment_protective: 0.5,
            entrainment_harmful: 2.0,
            interruption_success_prob: 0.64,
            gap_threshold_h: DEFAULT_GAP_HOURS,
            tongue: TongueParams::default(),
            seed: 42,
        }
    }
}

impl SeizureModelConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !finite_nonneg(self.base_rate_per_day) {
            return Err(Error::config("base_rate_per_day must be >= 0"));
        }
        if let Some(h) = self
            .circadian_profile
            .iter()
            .position(|&m| !(m > 0.0 && m.is_finite()))
        {
            return Err(Error::config(format!(
                "circadian multiplier for hour {h} must be > 0"
            )));
        }
        if !finite_nonneg(self.cluster_gain) {
            return Err(Error::config("cluster_gain must be >= 0"));
        }
        if !(self.cluster_decay_per_h > 0.0 && self.cluster_decay_per_h.is_finite()) {
            return Err(Error::config("cluster_decay_per_h must be > 0"));
        }
        if !(self.entrainment_protective > 0.0 && self.entrainment_protective <= 1.0) {
            return Err(Error::config("entrainment_protective must be in (0, 1]"));
        }
        if !(self.entrainment_harmful >= 1.0 && self.entrainment_harmful.is_finite()) {
            return Err(Error::config("entrainment_harmful must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.interruption_success_prob) {
            return Err(Error::config("interruption_success_prob must be in [0, 1]"));
        }
        if !(self.gap_threshold_h > 0.0 && self.gap_threshold_h.is_finite()) {
            return Err(Error::config("gap_threshold_h must be > 0"));
        }
        let t = &self.tongue;
        if !(t.ma_to_equivalent >= 0.0 && t.ma_to_equivalent.is_finite()) {
            return Err(Error::config("ma_to_equivalent must be >= 0"));
        }
        if !(t.narrowness_ratio > 0.0) || t.max_q == 0 {
            return Err(Error::config("narrowness_ratio must be > 0 and max_q >= 1"));
        }
        Ok(())
    }

    pub fn base_rate_per_s(&self) -> f64 {
        self.base_rate_per_day / 86_400.0
    }
}

/// Per-policy changes to the shared model. Unset fields keep the base value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelOverrides {
    pub base_rate_per_day: Option<f64>,
    pub circadian_profile: Option<[f64; 24]>,
    pub cluster_gain: Option<f64>,
    pub cluster_decay_per_h: Option<f64>,
    pub entrainment_protective: Option<f64>,
    pub entrainment_harmful: Option<f64>,
    pub interruption_success_prob: Option<f64>,
}

impl ModelOverrides {
    pub fn apply(&self, base: &SeizureModelConfig) -> SeizureModelConfig {
        let mut m = base.clone();
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { m.$f = v; } )* };
        }
        set!(
            base_rate_per_day,
            circadian_profile,
            cluster_gain,
            cluster_decay_per_h,
            entrainment_protective,
            entrainment_harmful,
            interruption_success_prob
        );
        m
    }
}

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElectrodeMode {
    Bipolar,
    Monopolar,
}

impl fmt::Display for ElectrodeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ElectrodeMode::Bipolar => "bipolar",
            ElectrodeMode::Monopolar => "monopolar",
        })
    }
}

/// One stimulation setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StimProgram {
    pub frequency_hz: f64,
    pub pulse_width_us: f64,
    pub amplitude_ma: f64,
    pub electrode_mode: ElectrodeMode,
    pub label: String,
}

impl StimProgram {
    pub fn new(
        label: impl Into<String>,
        frequency_hz: f64,
        pulse_width_us: f64,
        amplitude_ma: f64,
        electrode_mode: ElectrodeMode,
    ) -> Self {
        Self {
            frequency_hz,
            pulse_width_us,
            amplitude_ma,
            electrode_mode,
            label: label.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frequency_hz > 0.0 && self.frequency_hz.is_finite()) {
            return Err(Error::config(format!(
                "program '{}': frequency must be > 0",
                self.label
            )));
        }
        if !(self.pulse_width_us > 0.0 && self.pulse_width_us.is_finite()) {
            return Err(Error::config(format!(
                "program '{}': pulse width must be > 0",
                self.label
            )));
        }
        if !(self.amplitude_ma >= 0.0 && self.amplitude_ma.is_finite()) {
            return Err(Error::config(format!(
                "program '{}': amplitude must be >= 0",
                self.label
            )));
        }
        Ok(())
    }

    /// Daytime basal rate: 13 Hz at a reduced 0.5 mA.
    pub fn basal_day() -> Self {
        Self::new("basal_day", 13.0, 350.0, 0.5, ElectrodeMode::Monopolar)
    }

    /// Night-time basal rate: 13 Hz at 0.7 mA.
    pub fn basal_night() -> Self {
        Self::new("basal_night", 13.0, 350.0, 0.7, ElectrodeMode::Monopolar)
    }

    /// Sleep mode: 13 Hz / 350 us / 1.3 mA entrainment.
    pub fn sleep() -> Self {
        Self::new("sleep", 13.0, 350.0, 1.3, ElectrodeMode::Monopolar)
    }

    /// Carer-triggered burst: 130 Hz / 90 us / 1.5 mA bipolar.
    pub fn boost() -> Self {
        Self::new("boost", 130.0, 90.0, 1.5, ElectrodeMode::Bipolar)
    }

    /// Open-loop setting the device reverts to.
    pub fn fallback() -> Self {
        Self::new("fallback", 13.0, 350.0, 1.3, ElectrodeMode::Monopolar)
    }
}

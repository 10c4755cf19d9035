use serde::{Deserialize, Serialize};

use super::SeizureModelConfig;
use crate::error::Result;
use crate::scheduler::StimProgram;
use crate::tongues::evaluate_candidate;

/// How one stimulation program sits in the tongue structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgramAssessment {
    pub label: String,
    pub frequency_hz: f64,
    pub amplitude_ma: f64,
    pub equivalent_amplitude: f64,
    pub healthy_entrained: bool,
    pub band_locked: bool,
    pub factor: f64,
}

pub fn assess_program(
    program: &StimProgram,
    model: &SeizureModelConfig,
) -> Result<ProgramAssessment> {
    program.validate()?;
    let t = &model.tongue;
    let eq = program.amplitude_ma * t.ma_to_equivalent;
    let mut out = ProgramAssessment {
        label: program.label.clone(),
        frequency_hz: program.frequency_hz,
        amplitude_ma: program.amplitude_ma,
        equivalent_amplitude: eq,
        healthy_entrained: false,
        band_locked: false,
        factor: 1.0,
    };
    if eq == 0.0 {
        return Ok(out);
    }
    let report = evaluate_candidate(
        program.frequency_hz,
        t.healthy_f0_hz,
        t.pathological_band_hz,
        eq,
        t.max_q,
        t.narrowness_ratio,
        &t.context,
    )?;
    let limit = t.narrowness_ratio * report.one_to_one_width_hz;
    out.healthy_entrained = report.healthy_lock_ok;
    out.band_locked = report.band_locks.iter().any(|l| l.width_hz >= limit);
    out.factor = if out.band_locked {
        model.entrainment_harmful
    } else if out.healthy_entrained {
        model.entrainment_protective
    } else {
        1.0
    };
    Ok(out)
}

/// Seizure-rate multiplier of `program`: protective when it entrains the
/// healthy rhythm 1:1, harmful when a lock of width at least the configured
/// fraction of the 1:1 width reaches into the pathological band (harmful
/// wins), 1 otherwise.
pub fn entrainment_factor(program: &StimProgram, model: &SeizureModelConfig) -> Result<f64> {
    assess_program(program, model).map(|a| a.factor)
}

/// Assessments keyed by program settings, computed once per policy.
#[derive(Debug, Clone, Default)]
pub(crate) struct FactorTable {
    entries: Vec<ProgramAssessment>,
}

impl FactorTable {
    pub fn build<'a>(
        programs: impl IntoIterator<Item = &'a StimProgram>,
        model: &SeizureModelConfig,
    ) -> Result<Self> {
        let mut table = Self::default();
        for p in programs {
            if table.find(p).is_none() {
                table.entries.push(assess_program(p, model)?);
            }
        }
        Ok(table)
    }

    fn find(&self, p: &StimProgram) -> Option<&ProgramAssessment> {
        self.entries.iter().find(|a| {
            a.frequency_hz == p.frequency_hz
                && a.amplitude_ma == p.amplitude_ma
                && a.label == p.label
        })
    }

    pub fn factor(&self, p: &StimProgram) -> f64 {
        self.find(p)
            .expect("every reachable program is assessed")
            .factor
    }

    pub fn entries(&self) -> &[ProgramAssessment] {
        &self.entries
    }
}

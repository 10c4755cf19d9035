use serde::{Deserialize, Serialize};

use super::{
    classify_lock, default_tolerance, sweep, tongue_regions, GridSpec, RationalLock, SweepAxis,
};
use crate::circlemap::{self, CircleMapConfig, DEFAULT_PULSES, DEFAULT_TRIALS};
use crate::error::{Error, Result};
use crate::streams;

/// Natural-frequency plane used to judge each candidate stimulation
/// frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionContext {
    pub f0_axis: SweepAxis,
    pub f_max: f64,
    pub n_pulses: usize,
    pub n_trials: usize,
    /// Lock tolerance; `None` means half the winding resolution.
    pub tol: Option<f64>,
    pub seed: u64,
}

impl Default for SelectionContext {
    fn default() -> Self {
        Self {
            f0_axis: SweepAxis::new(1.0, 26.0, 251),
            f_max: 26.0,
            n_pulses: DEFAULT_PULSES,
            n_trials: DEFAULT_TRIALS,
            tol: None,
            seed: 0,
        }
    }
}

impl SelectionContext {
    pub fn tolerance(&self) -> f64 {
        self.tol.unwrap_or_else(|| default_tolerance(self.n_pulses))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LockWidth {
    pub lock: RationalLock,
    pub width_hz: f64,
    /// Natural-frequency span of the run, Hz (cell centres).
    pub f0_low: f64,
    pub f0_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub fs: f64,
    pub healthy_winding: f64,
    pub healthy_lock_ok: bool,
    pub one_to_one_width_hz: f64,
    /// Every lock run whose natural-frequency span meets the pathological band.
    pub band_locks: Vec<LockWidth>,
    pub admissible: bool,
    pub rejections: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StimFrequencyChoice {
    pub chosen_fs: f64,
    pub healthy_lock_ok: bool,
    pub offending_locks: Vec<LockWidth>,
    pub rationale: String,
    pub candidates: Vec<CandidateReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Selection {
    Chosen(StimFrequencyChoice),
    NoSafeFrequency { candidates: Vec<CandidateReport> },
}

impl Selection {
    pub fn chosen(&self) -> Option<&StimFrequencyChoice> {
        match self {
            Selection::Chosen(c) => Some(c),
            Selection::NoSafeFrequency { .. } => None,
        }
    }
}

fn check_band(healthy_peak: f64, band: [f64; 2]) -> Result<()> {
    if !(band[0] < band[1]) || !(band[0] >= 0.0) {
        return Err(Error::config(format!("invalid pathological band {band:?}")));
    }
    if !(healthy_peak > 0.0) {
        return Err(Error::config("healthy peak must be > 0"));
    }
    if healthy_peak >= band[0] && healthy_peak <= band[1] {
        return Err(Error::config(format!(
            "healthy peak {healthy_peak} Hz lies inside the pathological band {band:?}"
        )));
    }
    Ok(())
}

/// Judge one stimulation frequency at one equivalent amplitude.
pub fn evaluate_candidate(
    fs: f64,
    healthy_peak: f64,
    band: [f64; 2],
    eval_equiv_amplitude: f64,
    max_q: u64,
    narrowness_ratio: f64,
    ctx: &SelectionContext,
) -> Result<CandidateReport> {
    check_band(healthy_peak, band)?;
    if !(fs > 0.0) {
        return Err(Error::config(format!(
            "candidate frequency must be > 0, got {fs}"
        )));
    }
    let tol = ctx.tolerance();
    let spec = GridSpec {
        n_pulses: ctx.n_pulses,
        n_trials: ctx.n_trials,
        seed: streams::derive(ctx.seed, &[fs.to_bits()]),
        ..GridSpec::f0_vs_equivalent_amplitude(
            fs,
            ctx.f0_axis,
            SweepAxis::single(eval_equiv_amplitude),
            ctx.f_max,
        )
    };
    let grid = sweep(&spec)?;
    let regions = tongue_regions(&grid, max_q, tol);

    let healthy = CircleMapConfig {
        f0: healthy_peak,
        fs,
        coupling: eval_equiv_amplitude * ctx.f_max / healthy_peak,
        n_pulses: ctx.n_pulses,
        n_trials: ctx.n_trials,
        seed: streams::derive(ctx.seed, &[fs.to_bits(), healthy_peak.to_bits()]),
    };
    let healthy_winding = circlemap::winding_number(&healthy)?.mean;
    let healthy_lock_ok =
        classify_lock(healthy_winding, max_q, tol).is_some_and(|l| l.is_one_to_one());

    let one_to_one_width_hz = regions
        .iter()
        .filter(|r| r.lock.is_one_to_one())
        .map(|r| r.width_by_row[0])
        .fold(0.0, f64::max);

    let dx = spec.x_axis.spacing();
    let mut band_locks = Vec::new();
    for region in &regions {
        for (a, b) in region.row_runs(0) {
            let (lo, hi) = (spec.x_axis.value(a), spec.x_axis.value(b));
            if hi >= band[0] && lo <= band[1] {
                band_locks.push(LockWidth {
                    lock: region.lock,
                    width_hz: (b - a + 1) as f64 * dx,
                    f0_low: lo,
                    f0_high: hi,
                });
            }
        }
    }
    band_locks.sort_by(|a, b| a.f0_low.total_cmp(&b.f0_low));

    let mut rejections = Vec::new();
    if !healthy_lock_ok {
        rejections.push(format!(
            "healthy rhythm {healthy_peak} Hz not 1:1 entrained (winding {healthy_winding:.4})"
        ));
    }
    if one_to_one_width_hz == 0.0 {
        rejections.push("no 1:1 tongue at the evaluation amplitude".to_string());
    }
    let limit = narrowness_ratio * one_to_one_width_hz;
    for lw in &band_locks {
        if lw.width_hz >= limit {
            rejections.push(format!(
                "{} tongue at {:.2}-{:.2} Hz is {:.2} Hz wide (limit {:.3} Hz)",
                lw.lock, lw.f0_low, lw.f0_high, lw.width_hz, limit
            ));
        }
    }

    Ok(CandidateReport {
        fs,
        healthy_winding,
        healthy_lock_ok,
        one_to_one_width_hz,
        band_locks,
        admissible: rejections.is_empty(),
        rejections,
    })
}

/// Pick the admissible stimulation frequency closest to the healthy rhythm.
///
/// A candidate is admissible when the healthy rhythm is 1:1 entrained at the
/// evaluation amplitude and every lock meeting the pathological band is
/// narrower than `narrowness_ratio` times the 1:1 tongue on the same row.
pub fn select_stim_frequency(
    healthy_peak: f64,
    pathological_band: [f64; 2],
    candidates: &SweepAxis,
    eval_equiv_amplitude: f64,
    max_q: u64,
    narrowness_ratio: f64,
    ctx: &SelectionContext,
) -> Result<Selection> {
    check_band(healthy_peak, pathological_band)?;
    candidates.validate("candidate")?;
    if !(candidates.min > 0.0) {
        return Err(Error::config("candidate frequencies must be > 0"));
    }
    if !(narrowness_ratio > 0.0) {
        return Err(Error::config("narrowness ratio must be > 0"));
    }
    let reports = candidates
        .values()
        .map(|fs| {
            evaluate_candidate(
                fs,
                healthy_peak,
                pathological_band,
                eval_equiv_amplitude,
                max_q,
                narrowness_ratio,
                ctx,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let best = reports.iter().filter(|r| r.admissible).min_by(|a, b| {
        (a.fs - healthy_peak)
            .abs()
            .total_cmp(&(b.fs - healthy_peak).abs())
            .then(a.fs.total_cmp(&b.fs))
    });
    Ok(match best {
        Some(r) => Selection::Chosen(StimFrequencyChoice {
            chosen_fs: r.fs,
            healthy_lock_ok: r.healthy_lock_ok,
            offending_locks: r.band_locks.clone(),
            rationale: format!(
                "{} Hz entrains {} Hz 1:1 (1:1 tongue {:.2} Hz wide at equivalent amplitude {}); \
                 {} lock run(s) meet the {:?} Hz band, all narrower than {} x the 1:1 width",
                r.fs,
                healthy_peak,
                r.one_to_one_width_hz,
                eval_equiv_amplitude,
                r.band_locks.len(),
                pathological_band,
                narrowness_ratio
            ),
            candidates: reports.clone(),
        }),
        None => Selection::NoSafeFrequency {
            candidates: reports,
        },
    })
}

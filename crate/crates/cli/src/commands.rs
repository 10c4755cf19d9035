use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use chronostim::diary::{diary_report, parse_diary, write_report_json, DiaryEvent};
use chronostim::render::{timeline_rose_svg, tongue_heatmap_svg};
use chronostim::scheduler::{
    read_adaptive_config, read_schedule, run_schedule_with, write_event_log_csv,
    write_timeline_csv, AdaptiveConfig, ClockSchedule,
};
use chronostim::simharness::{
    compare_policies, simulate_days, ComparisonSpec, Policy, SeizureModelConfig, TapPolicy,
};
use chronostim::telemetry::{
    dominant_peaks, read_accel_csv, read_lfp_csv, synth_accel, synth_lfp, welch_psd, write_lfp_csv,
    write_spectrum_csv, AccelEvent, SyntheticLfpSpec, TimeSeries, TraceMeta,
    DEFAULT_PROMINENCE_RATIO,
};
use chronostim::tongues::{
    select_stim_frequency, sweep, tongue_regions, write_grid_csv, GridSpec, RationalLock,
    Selection, SelectionContext, SweepAxis,
};
use chronostim::{Error, Result};

use crate::args::*;

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(open(path)?)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn finish<W: Write>(mut w: W) -> Result<()> {
    w.flush()?;
    Ok(())
}

/// `<path minus extension>.<suffix>`
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    path.with_extension(suffix)
}

fn meta_path(data: &Path, explicit: &Option<PathBuf>) -> PathBuf {
    explicit
        .clone()
        .unwrap_or_else(|| sibling(data, "meta.json"))
}

#[derive(Serialize)]
struct RegionLine {
    lock: RationalLock,
    area: usize,
    max_width: f64,
}

pub fn tongue(a: &TongueArgs) -> Result<()> {
    let x_axis = SweepAxis::new(
        a.x_min_hz.unwrap_or(6.0),
        a.x_max_hz.unwrap_or(30.0),
        a.x_steps.unwrap_or(241),
    );
    let y_axis = SweepAxis::new(a.i_min.unwrap_or(0.0), a.i_max, a.i_steps.unwrap_or(101));
    let base = match a.mode {
        ModeArg::FsVsAmplitude => GridSpec::fs_vs_amplitude(a.f0_hz, x_axis, y_axis),
        ModeArg::F0VsEquivalent => {
            GridSpec::f0_vs_equivalent_amplitude(a.fs_hz, x_axis, y_axis, a.f_max_hz)
        }
    };
    let spec = GridSpec {
        n_pulses: a.pulses,
        n_trials: a.trials,
        ..base
    }
    .with_seed(a.seed);
    let tol = a
        .tol
        .unwrap_or_else(|| chronostim::tongues::default_tolerance(a.pulses));

    let grid = sweep(&spec)?;
    finish({
        let mut w = create(&a.out)?;
        write_grid_csv(&grid, &mut w)?;
        w
    })?;

    let regions = tongue_regions(&grid, a.max_q, tol);
    let lines: Vec<RegionLine> = regions
        .iter()
        .map(|r| RegionLine {
            lock: r.lock,
            area: r.area,
            max_width: r.width_by_row.iter().copied().fold(0.0, f64::max),
        })
        .collect();
    println!("lock  area  max_width");
    for l in lines.iter().take(12) {
        println!(
            "{:<5} {:>5} {:>10.4}",
            l.lock.to_string(),
            l.area,
            l.max_width
        );
    }
    if let Some(path) = &a.regions {
        write_json(path, &lines)?;
    }
    if let Some(path) = &a.svg {
        write_text(path, &tongue_heatmap_svg(&grid, a.max_q, tol))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SelectOutput {
    healthy_peak_hz: f64,
    healthy_source: &'static str,
    pathological_band_hz: [f64; 2],
    selection: Selection,
}

fn healthy_from_trace(a: &SelectArgs) -> Result<f64> {
    let ts = synth_lfp(
        &SyntheticLfpSpec::restful(),
        a.lfp_seconds,
        a.lfp_rate_hz,
        a.seed,
        start_default(),
    )?;
    let ps = welch_psd(&ts, a.segment, a.overlap)?;
    let peaks = dominant_peaks(
        &ps,
        [a.peak_band_low_hz, a.peak_band_high_hz],
        DEFAULT_PROMINENCE_RATIO,
    )?;
    peaks
        .first()
        .map(|p| p.frequency_hz)
        .ok_or_else(|| Error::Input("no dominant rhythm found in the restful trace".into()))
}

pub fn select(a: &SelectArgs) -> Result<()> {
    let (healthy, source) = match a.healthy_hz {
        Some(h) => (h, "flag"),
        None => (healthy_from_trace(a)?, "measured"),
    };
    let ctx = SelectionContext {
        f0_axis: SweepAxis::new(a.f0_min_hz, a.f0_max_hz, a.f0_steps),
        f_max: a.f_max_hz,
        n_pulses: a.pulses,
        n_trials: a.trials,
        tol: a.tol,
        seed: a.seed,
    };
    let band = [a.band_low_hz, a.band_high_hz];
    let candidates = SweepAxis::new(a.candidates_min_hz, a.candidates_max_hz, a.candidates_steps);
    let selection = select_stim_frequency(
        healthy,
        band,
        &candidates,
        a.eq_amplitude,
        a.max_q,
        a.narrowness_ratio,
        &ctx,
    )?;
    match selection.chosen() {
        Some(c) => println!(
            "chosen {} Hz for healthy rhythm {healthy} Hz ({source})",
            c.chosen_fs
        ),
        None => println!("no admissible stimulation frequency for healthy rhythm {healthy} Hz"),
    }
    write_json(
        &a.out,
        &SelectOutput {
            healthy_peak_hz: healthy,
            healthy_source: source,
            pathological_band_hz: band,
            selection,
        },
    )
}

pub fn psd(a: &PsdArgs) -> Result<()> {
    let ts: TimeSeries = match &a.lfp {
        Some(path) => {
            let meta: TraceMeta = read_json(&meta_path(path, &a.lfp_meta))?;
            read_lfp_csv(open(path)?, &meta)?
        }
        None => synth_lfp(
            &SyntheticLfpSpec::preset(a.state.into()),
            a.seconds,
            a.rate_hz,
            a.seed,
            start_default(),
        )?,
    };
    if let Some(path) = &a.trace_out {
        finish({
            let mut w = create(path)?;
            write_lfp_csv(&ts, &mut w)?;
            w
        })?;
        write_json(&sibling(path, "meta.json"), &TraceMeta::for_lfp(&ts))?;
    }
    let ps = welch_psd(&ts, a.segment, a.overlap)?;
    finish({
        let mut w = create(&a.out)?;
        write_spectrum_csv(&ps, &mut w)?;
        w
    })?;
    let peaks = dominant_peaks(&ps, [a.band_low_hz, a.band_high_hz], a.prominence)?;
    for p in &peaks {
        println!("peak {:.3} Hz power {:.6e}", p.frequency_hz, p.power);
    }
    if let Some(path) = &a.peaks {
        write_json(path, &peaks)?;
    }
    Ok(())
}

pub fn simulate(a: &SimulateArgs) -> Result<()> {
    let schedule = match &a.schedule {
        Some(p) => read_schedule(open(p)?)?,
        None => ClockSchedule::default(),
    };
    let mut config = match &a.adaptive {
        Some(p) => read_adaptive_config(open(p)?)?,
        None => AdaptiveConfig::default(),
    };
    if let Some(g) = a.tap_threshold_g {
        config.tap_threshold_g = g;
        config.validate()?;
    }
    let trace = if let Some(path) = &a.accel {
        let meta: TraceMeta = read_json(&meta_path(path, &a.accel_meta))?;
        Some(read_accel_csv(open(path)?, &meta)?)
    } else if let Some(path) = &a.profile {
        let events: Vec<AccelEvent> = read_json(path)?;
        Some(synth_accel(
            &events,
            a.duration_s,
            a.accel_rate_hz,
            a.seed,
            a.start,
        )?)
    } else {
        None
    };
    let run = run_schedule_with(
        trace.as_ref(),
        &schedule,
        &config,
        a.start,
        a.duration_s,
        a.fallback_at,
    )?;
    finish({
        let mut w = create(&a.log)?;
        write_event_log_csv(&run.log, &mut w)?;
        w
    })?;
    finish({
        let mut w = create(&a.timeline)?;
        write_timeline_csv(&run.timeline, &mut w)?;
        w
    })?;
    write_text(&a.rose, &timeline_rose_svg(&run))?;
    println!(
        "{} transitions, {} timeline segments",
        run.log.len(),
        run.timeline.len()
    );
    Ok(())
}

fn load_policy(path: &Option<PathBuf>, name: &str, tap_delay_s: Option<f64>) -> Result<Policy> {
    let mut policy = match path {
        Some(p) => read_json::<Policy>(p)?,
        None => Policy::named(name),
    };
    if let Some(delay_s) = tap_delay_s {
        policy.tap_policy = TapPolicy::TapOnSeizure { delay_s };
    }
    Ok(policy)
}

pub fn harness(a: &HarnessArgs) -> Result<()> {
    let model = match &a.model {
        Some(p) => read_json::<SeizureModelConfig>(p)?,
        None => SeizureModelConfig::default(),
    }
    .with_seed(a.seed);
    model.validate()?;
    let policy_a = load_policy(&a.policy_a, "a", a.tap_delay_s)?;

    match a.reps {
        None => {
            if a.policy_b.is_some() {
                return Err(Error::Config("--policy-b needs --reps".into()));
            }
            let result = simulate_days(a.days, a.start, &model, &policy_a)?;
            let mut w = create(&a.out)?;
            result.write_json(&mut w)?;
            finish(w)?;
            if let Some(path) = &a.diary {
                let mut w = create(path)?;
                result.write_diary_csv(&mut w)?;
                finish(w)?;
            }
            if let Some(path) = &a.rose {
                write_text(path, &timeline_rose_svg(&result.stimulation))?;
            }
            println!(
                "{} seizures in {} periods over {} days",
                result.seizures.len(),
                result.periods.len(),
                result.days
            );
        }
        Some(n_reps) => {
            if a.diary.is_some() || a.rose.is_some() {
                return Err(Error::Config(
                    "--diary and --rose apply to single runs only".into(),
                ));
            }
            let policy_b = match &a.policy_b {
                Some(_) => load_policy(&a.policy_b, "b", a.tap_delay_s)?,
                None => Policy {
                    name: "b".into(),
                    ..policy_a.clone()
                },
            };
            let spec = ComparisonSpec {
                days: a.days,
                start: a.start,
                n_reps,
                seed: a.seed,
                alternative: a.alternative.into(),
            };
            let c = compare_policies(&model, &policy_a, &policy_b, &spec)?;
            println!(
                "{}: {:.3} ± {:.3} seizures; {}: {:.3} ± {:.3}; one-tailed p = {:.4}",
                c.a.name,
                c.a.seizures.mean,
                c.a.seizures.sd,
                c.b.name,
                c.b.seizures.mean,
                c.b.seizures.sd,
                c.seizure_test.p_one_tailed
            );
            write_json(&a.out, &c)?;
        }
    }
    Ok(())
}

pub fn stats(a: &StatsArgs) -> Result<()> {
    let mut events: Vec<DiaryEvent> = Vec::new();
    for path in &a.diary {
        events.extend(parse_diary(open(path)?)?);
    }
    events.sort_by_key(|e| e.timestamp);
    let report = diary_report(&events, a.gap_hours, a.split, a.alternative.into())?;
    match &a.out {
        Some(path) => {
            let mut w = create(path)?;
            write_report_json(&report, &mut w)?;
            finish(w)
        }
        None => {
            let mut buf = Vec::new();
            write_report_json(&report, &mut buf)?;
            match std::io::stdout().lock().write_all(&buf) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => Ok(r?),
            }
        }
    }
}

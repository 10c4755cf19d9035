//! One test per acceptance criterion. Each prints a single PASS/FAIL line
//! and fails when its criterion does.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration as Elapsed, Instant};

use chrono::{Duration, NaiveDateTime};
use chronostim::circlemap::{winding_number, CircleMapConfig};
use chronostim::diary::{
    interruption_rate, mann_whitney_one_tailed, Alternative, DiaryEvent, TestMethod,
};
use chronostim::scheduler::{
    run_schedule_with, step_state, Activity, AdaptiveConfig, Cause, ClockSchedule, DeviceMode,
    DeviceState, ElectrodeMode, StimProgram,
};
use chronostim::simharness::{
    assess_program, compare_policies, simulate_days, ComparisonSpec, Policy, SeizureModelConfig,
};
use chronostim::streams;
use chronostim::telemetry::{
    dominant_peaks, synth_accel, synth_lfp, welch_psd, AccelEvent, SyntheticLfpSpec,
};
use chronostim::tongues::{
    classify_lock, evaluate_candidate, select_stim_frequency, sweep_with_workers, tongue_regions,
    write_grid_csv, GridSpec, RationalLock, SelectionContext, SweepAxis, TongueGrid,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

const N: usize = 50;
const TOL: f64 = 1.0 / (2.0 * N as f64);
const SEED: u64 = 42;

/// Written straight to the stderr handle so the line shows without
/// `--nocapture`.
fn say(line: &str) {
    let _ = writeln!(std::io::stderr(), "{line}");
}

fn report(id: u32, name: &str, ok: bool, detail: String) {
    say(&format!(
        "criterion {id:>2} {} {name}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    ));
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

fn secs(d: Elapsed) -> f64 {
    d.as_secs_f64()
}

fn fig2a_spec() -> GridSpec {
    GridSpec::fs_vs_amplitude(
        13.0,
        SweepAxis::new(6.0, 30.0, 241),
        SweepAxis::new(0.0, 1.0, 101),
    )
    .with_seed(SEED)
}

fn one_to_one_width(regions: &[chronostim::tongues::TongueRegion], row: usize) -> f64 {
    regions
        .iter()
        .filter(|r| r.lock.is_one_to_one())
        .map(|r| r.width_by_row[row])
        .fold(0.0, f64::max)
}

fn csv(grid: &TongueGrid) -> Vec<u8> {
    let mut buf = Vec::new();
    write_grid_csv(grid, &mut buf).unwrap();
    buf
}

#[test]
fn c01_zero_coupling_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let t = Instant::now();
    let mut worst = 0.0f64;
    for i in 0..1000u64 {
        let f0 = rng.random_range(0.1..100.0);
        let fs = rng.random_range(0.1..100.0);
        let w = winding_number(&CircleMapConfig::new(f0, fs, 0.0).with_seed(i))
            .unwrap()
            .mean;
        worst = worst.max((w - f0 / fs).abs());
    }
    let elapsed = secs(t.elapsed());
    report(
        1,
        "zero-coupling law",
        worst <= 1e-12 && elapsed < 1.0,
        format!("max |winding - f0/fs| = {worst:.2e} over 1000 pairs in {elapsed:.3} s"),
    );
}

#[test]
fn c02_c03_fig2a_grid() {
    let spec = fig2a_spec();
    let t = Instant::now();
    let grid = sweep_with_workers(&spec, 1).unwrap();
    let elapsed = secs(t.elapsed());
    let regions = tongue_regions(&grid, 6, TOL);

    let mut area_by_lock: BTreeMap<(u64, u64), usize> = BTreeMap::new();
    for r in &regions {
        *area_by_lock.entry((r.lock.p, r.lock.q)).or_default() += r.area;
    }
    let one = area_by_lock.get(&(1, 1)).copied().unwrap_or(0);
    let runner_up = area_by_lock
        .iter()
        .filter(|(k, _)| **k != (1, 1))
        .map(|(_, a)| *a)
        .max()
        .unwrap_or(0);
    let largest_ok = regions[0].lock.is_one_to_one() && one > runner_up;

    let lock_at =
        |fs: f64, r: usize| classify_lock(grid.at(r, spec.x_axis.nearest_index(fs)), 6, TOL);
    let rows_where = |lo: f64, hi: f64| {
        (0..spec.rows()).filter(move |&r| {
            let i = spec.y_axis.value(r);
            i >= lo - 1e-9 && i <= hi + 1e-9
        })
    };
    let bad_b: Vec<f64> = rows_where(0.2, 1.0)
        .filter(|&r| lock_at(13.0, r) != Some(RationalLock::new(1, 1)))
        .map(|r| spec.y_axis.value(r))
        .collect();
    let bad_c: Vec<f64> = rows_where(0.2, 0.6)
        .filter(|&r| lock_at(6.5, r) != Some(RationalLock::new(2, 1)))
        .map(|r| spec.y_axis.value(r))
        .collect();
    report(
        2,
        "Fig 2A reproduction",
        largest_ok && bad_b.is_empty() && bad_c.is_empty() && elapsed < 60.0,
        format!(
            "1:1 area {one} vs next {runner_up}; fs=13 off-1:1 rows {bad_b:?}; fs=6.5 off-2:1 rows {bad_c:?}; sweep {elapsed:.1} s single worker"
        ),
    );

    let dx = spec.x_axis.spacing();
    let widths: Vec<f64> = (0..spec.rows())
        .map(|r| one_to_one_width(&regions, r))
        .collect();
    let drops: Vec<(f64, f64, f64)> = widths
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] < w[0] - dx - 1e-9)
        .map(|(r, w)| (spec.y_axis.value(r + 1), w[0], w[1]))
        .collect();
    report(
        3,
        "1:1 width monotone in I",
        drops.is_empty(),
        format!(
            "width {:.2} Hz at I=0 to {:.2} Hz at I=1, {} drops beyond one cell ({dx} Hz) {drops:?}",
            widths[0],
            widths[spec.rows() - 1],
            drops.len()
        ),
    );
}

#[test]
fn c04_fig2c_narrow_subharmonics() {
    let spec = GridSpec::f0_vs_equivalent_amplitude(
        13.0,
        SweepAxis::new(1.0, 26.0, 251),
        SweepAxis::new(0.05, 1.0, 96),
        26.0,
    )
    .with_seed(SEED);
    let t = Instant::now();
    let grid = sweep_with_workers(&spec, 1).unwrap();
    let regions = tongue_regions(&grid, 6, TOL);
    let elapsed = secs(t.elapsed());
    let in_band = |c: usize| (2.0..=3.0).contains(&spec.x_axis.value(c));
    let width_in_band = |q: u64, row: usize| {
        regions
            .iter()
            .filter(|r| r.lock == RationalLock::new(1, q))
            .map(|r| r.row_width_where(row, in_band))
            .fold(0.0, f64::max)
    };
    let mut checked = 0;
    let mut failing = Vec::new();
    for row in 0..spec.rows() {
        let w11 = one_to_one_width(&regions, row);
        if w11 == 0.0 {
            continue;
        }
        checked += 1;
        let (w5, w6) = (width_in_band(5, row), width_in_band(6, row));
        let limit = 0.1 * w11;
        if !(w5 < limit && w6 < limit) {
            failing.push(format!(
                "eq {:.2}: 1:1 {w11:.2} Hz, 1:5 {w5:.2} Hz, 1:6 {w6:.2} Hz, limit {limit:.3} Hz",
                spec.y_axis.value(row)
            ));
        }
    }
    for line in &failing {
        say(&format!("    {line}"));
    }
    report(
        4,
        "Fig 2C narrow-tongue check",
        failing.is_empty() && elapsed < 90.0,
        format!(
            "{} of {checked} rows exceed 0.1 x the 1:1 width; {elapsed:.1} s",
            failing.len()
        ),
    );
}

#[test]
fn c05_selection_pipeline() {
    let t = Instant::now();
    let t0: NaiveDateTime = "2026-03-01T12:00:00".parse().unwrap();
    let lfp = synth_lfp(&SyntheticLfpSpec::restful(), 120.0, 250.0, SEED, t0).unwrap();
    let ps = welch_psd(&lfp, 512, 0.5).unwrap();
    let measured = dominant_peaks(&ps, [8.0, 20.0], 4.0).unwrap()[0].frequency_hz;
    let candidates = SweepAxis::new(10.0, 16.0, 7);
    let nearest = candidates
        .values()
        .min_by(|a, b| (a - measured).abs().total_cmp(&(b - measured).abs()))
        .unwrap();
    let ctx = SelectionContext::default();
    let sel = select_stim_frequency(measured, [2.0, 3.0], &candidates, 0.5, 6, 0.1, &ctx).unwrap();
    let chosen = sel.chosen().map(|c| c.chosen_fs);
    let at_twelve = evaluate_candidate(13.0, 12.0, [2.0, 3.0], 0.5, 6, 0.1, &ctx).unwrap();
    let elapsed = secs(t.elapsed());
    report(
        5,
        "select_stim_frequency pipeline",
        nearest == 13.0 && chosen == Some(13.0) && at_twelve.admissible && elapsed < 120.0,
        format!(
            "measured peak {measured:.2} Hz, nearest candidate {nearest}, chosen {chosen:?}; 13 Hz for a 12 Hz rhythm admissible: {}; {elapsed:.1} s",
            at_twelve.admissible
        ),
    );
}

#[test]
fn c06_mann_whitney_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut compared, mut worst) = (0, 0.0f64);
    for _ in 0..500 {
        let n = rng.random_range(1..=5);
        let m = rng.random_range(1..=5);
        let data: Vec<f64> = (0..n + m).map(|_| rng.random_range(0..30) as f64).collect();
        let mut sorted = data.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let (x, y) = data.split_at(n);
        for alt in [Alternative::XLess, Alternative::XGreater] {
            let r = mann_whitney_one_tailed(x, y, alt).unwrap();
            assert_eq!(r.method, TestMethod::ExactEnumeration);
            worst = worst.max((r.p_one_tailed - common::brute_mwu_p(x, y, alt)).abs());
        }
        compared += 1;
    }
    let examples: [(&[f64], &[f64], f64); 3] = [
        (&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], 0.05),
        (&[1.0], &[2.0], 0.5),
        (&[1.0, 3.0], &[2.0, 4.0], 1.0 / 3.0),
    ];
    let examples_ok = examples.iter().all(|(x, y, p)| {
        mann_whitney_one_tailed(x, y, Alternative::XLess)
            .unwrap()
            .p_one_tailed
            == *p
    });
    report(
        6,
        "Mann-Whitney oracle equivalence",
        worst <= 1e-12 && examples_ok && compared > 0,
        format!("{compared} tie-free datasets of 500, max |p - oracle| = {worst:.1e}; examples exact: {examples_ok}"),
    );
}

#[test]
fn c07_scheduler_scenarios() {
    let schedule = ClockSchedule::default();
    let cfg = AdaptiveConfig::default();
    let mut notes = Vec::new();

    let night: NaiveDateTime = "2026-03-01T23:00:00".parse().unwrap();
    let s = DeviceState::initial(night, &schedule);
    let (next, entry) = step_state(
        &s,
        night + Duration::seconds(10),
        Activity::Active,
        false,
        &schedule,
        &cfg,
    )
    .unwrap();
    let night_ok = next.mode == DeviceMode::BasalNight
        && next.active_program.amplitude_ma == 0.7
        && entry.is_none();
    notes.push(format!(
        "night basal {} mA",
        next.active_program.amplitude_ma
    ));

    // active until 14:00, still afterwards; tap at 14:30 while resting, fallback at 15:00
    let start: NaiveDateTime = "2026-03-01T13:00:00".parse().unwrap();
    let events = [
        AccelEvent::active(0.0, 3600.0),
        AccelEvent::tap(5400.0, 7.5),
        AccelEvent::active(6000.0, 6600.0),
        AccelEvent::tap(6900.0, 8.0),
    ];
    let trace = synth_accel(&events, 10_800.0, 50.0, SEED, start).unwrap();
    let fallback_at = start + Duration::hours(2);
    let run = run_schedule_with(
        Some(&trace),
        &schedule,
        &cfg,
        start,
        10_800.0,
        Some(fallback_at),
    )
    .unwrap();

    let sleep = run.log.iter().find(|e| e.to == DeviceMode::SleepMode);
    let latency = sleep
        .map(|e| (e.timestamp - (start + Duration::hours(1))).num_milliseconds() as f64 / 1000.0);
    let window = cfg.activity_window_s;
    let sleep_ok = sleep.is_some_and(|e| {
        e.program == StimProgram::new("sleep", 13.0, 350.0, 1.3, ElectrodeMode::Monopolar)
    }) && latency.is_some_and(|l| (240.0..=240.0 + window).contains(&l));
    notes.push(format!("sleep latency {latency:?} s"));

    let boost = run.log.iter().find(|e| e.to == DeviceMode::Boost);
    let boost_ok = boost.is_some_and(|e| {
        e.cause == Cause::Tap
            && e.program == StimProgram::new("boost", 130.0, 90.0, 1.5, ElectrodeMode::Bipolar)
    });
    notes.push(format!("boost at {:?}", boost.map(|e| e.timestamp)));

    let fb_idx = run
        .log
        .iter()
        .position(|e| e.cause == Cause::FallbackEngaged);
    let absorbed = fb_idx == Some(run.log.len() - 1)
        && run
            .timeline
            .last()
            .is_some_and(|p| p.mode == DeviceMode::Fallback && p.timestamp == fallback_at);
    notes.push(format!(
        "{} transitions, fallback last: {absorbed}",
        run.log.len()
    ));

    report(
        7,
        "scheduler scenario suite",
        night_ok && sleep_ok && boost_ok && absorbed,
        notes.join("; "),
    );
}

#[test]
fn c08_interruption_rate() {
    let t0: NaiveDateTime = "2026-02-01T00:00:00".parse().unwrap();
    let events: Vec<DiaryEvent> = (0..22)
        .map(|i| DiaryEvent {
            interruption_attempted: true,
            interruption_success: i < 14,
            ..DiaryEvent::new(t0 + Duration::hours(30 * i))
        })
        .collect();
    let rate = interruption_rate(&events).rate.unwrap_or(f64::NAN);
    report(
        8,
        "interruption rate",
        (rate - 0.636).abs() <= 0.001,
        format!("14 of 22 gives {rate:.4}"),
    );
}

#[test]
fn c09_determinism() {
    let spec = fig2a_spec();
    let a = csv(&sweep_with_workers(&spec, 1).unwrap());
    let b = csv(&sweep_with_workers(&spec, 1).unwrap());
    let c = csv(&sweep_with_workers(&spec, 8).unwrap());
    let grid_ok = a == b && a == c;

    let model = SeizureModelConfig::default().with_seed(SEED);
    let policy = Policy::named("default");
    let start: NaiveDateTime = "2026-01-01T00:00:00".parse().unwrap();
    let json = |threads| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let r = pool
            .install(|| simulate_days(60, start, &model, &policy))
            .unwrap();
        let mut buf = Vec::new();
        r.write_json(&mut buf).unwrap();
        buf
    };
    let (j1, j1b, j8) = (json(1), json(1), json(8));
    let sim_ok = j1 == j1b && j1 == j8;
    report(
        9,
        "determinism",
        grid_ok && sim_ok,
        format!("tongue CSV ({} bytes) identical: {grid_ok}; SimResult JSON ({} bytes) identical: {sim_ok}", a.len(), j1.len()),
    );
}

fn neutral_policy() -> Policy {
    let mut p = Policy::named("neutral");
    for seg in &mut p.schedule.segments {
        seg.basal_program.amplitude_ma = 0.0;
    }
    p.adaptive.sleep_program.amplitude_ma = 0.0;
    p.adaptive.fallback_program.amplitude_ma = 0.0;
    p
}

/// Common factor of every non-boost program, which the policies here are
/// built to have.
fn uniform_factor(policy: &Policy, model: &SeizureModelConfig) -> f64 {
    let mut programs: Vec<StimProgram> = policy
        .schedule
        .segments
        .iter()
        .map(|s| s.basal_program.clone())
        .collect();
    programs.push(policy.adaptive.sleep_program.clone());
    let factors: Vec<f64> = programs
        .iter()
        .map(|p| assess_program(p, model).unwrap().factor)
        .collect();
    assert!(factors.windows(2).all(|w| w[0] == w[1]), "{factors:?}");
    factors[0]
}

/// Minute-step Bernoulli version of the clustered seizure process, flat
/// circadian profile, no interruptions.
fn coarse_mean_count(
    model: &SeizureModelConfig,
    factor: f64,
    days: u32,
    reps: usize,
    seed: u64,
) -> f64 {
    let dt_h = 1.0 / 60.0;
    let decay = (-model.cluster_decay_per_h * dt_h).exp();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0usize;
    for _ in 0..reps {
        let mut excitation = 0.0;
        for _ in 0..days * 24 * 60 {
            let rate_h = model.base_rate_per_day / 24.0 * factor * (1.0 + excitation);
            if rng.random::<f64>() < 1.0 - (-rate_h * dt_h).exp() {
                total += 1;
                excitation += model.cluster_gain;
            }
            excitation *= decay;
        }
    }
    total as f64 / reps as f64
}

#[test]
fn c10_harness_calibration() {
    let model = SeizureModelConfig::default();
    let policy = Policy::named("same");
    let metas = 100;
    let mut rejections = 0;
    for meta in 0..metas {
        let spec = ComparisonSpec {
            n_reps: 200,
            seed: streams::derive(SEED, &[meta]),
            ..Default::default()
        };
        let cmp = compare_policies(&model, &policy, &policy, &spec).unwrap();
        rejections += (cmp.seizure_test.p_one_tailed <= 0.05) as usize;
    }
    let null_rate = rejections as f64 / metas as f64;
    let null_ok = (0.01..=0.12).contains(&null_rate);

    let protective = Policy::named("protective");
    let neutral = neutral_policy();
    let spec = ComparisonSpec {
        n_reps: 200,
        seed: SEED,
        ..Default::default()
    };
    let cmp = compare_policies(&model, &protective, &neutral, &spec).unwrap();
    let (ma, mb) = (cmp.a.seizures.mean, cmp.b.seizures.mean);
    let p = cmp.seizure_test.p_one_tailed;
    let effect_ok = ma < mb && p <= 0.05;

    let (fa, fb) = (
        uniform_factor(&protective, &model),
        uniform_factor(&neutral, &model),
    );
    let ea = coarse_mean_count(&model, fa, spec.days, 200, 1);
    let eb = coarse_mean_count(&model, fb, spec.days, 200, 2);
    let close = |got: f64, want: f64| (got - want).abs() <= 0.2 * want;
    let coarse_ok = close(ma, ea) && close(mb, eb);

    report(
        10,
        "harness calibration",
        null_ok && effect_ok && coarse_ok,
        format!(
            "null rejections {rejections}/{metas}; protective {ma:.2} vs neutral {mb:.2} seizures/30 d, p = {p:.1e}; coarse estimates {ea:.2} (x{fa}) and {eb:.2} (x{fb})"
        ),
    );
}

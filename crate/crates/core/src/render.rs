//! Minimal SVG output: tongue heatmaps and 24 h stimulation roses.

use std::f64::consts::PI;
use std::fmt::Write as _;

use chrono::Timelike;

use crate::scheduler::{DeviceMode, ScheduleRun};
use crate::tongues::{tongue_regions, GridMode, TongueGrid};

const PLOT_W: f64 = 720.0;
const PLOT_H: f64 = 420.0;
const MARGIN: f64 = 60.0;
const LEVELS: usize = 64;

/// Colour ramp anchors (dark blue to yellow).
const RAMP: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

fn ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0) * (RAMP.len() - 1) as f64;
    let i = (t.floor() as usize).min(RAMP.len() - 2);
    let f = t - i as f64;
    let (a, b) = (RAMP[i], RAMP[i + 1]);
    let mix = |x: f64, y: f64| (x + (y - x) * f).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(a.0, b.0),
        mix(a.1, b.1),
        mix(a.2, b.2)
    )
}

/// Heatmap of the winding number with outlines of every lock region with
/// denominator up to `max_q`.
pub fn tongue_heatmap_svg(grid: &TongueGrid, max_q: u64, tol: f64) -> String {
    let spec = &grid.spec;
    let (rows, cols) = (spec.rows(), spec.cols());
    let cw = PLOT_W / cols as f64;
    let ch = PLOT_H / rows as f64;
    // Row 0 is drawn at the bottom.
    let x_of = |c: usize| MARGIN + c as f64 * cw;
    let y_of = |r: usize| MARGIN + (rows - r) as f64 * ch;

    let lo = grid.winding.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = grid
        .winding
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let level = |w: f64| (((w - lo) / span) * (LEVELS - 1) as f64).round() as usize;

    let mut s = String::new();
    let width = PLOT_W + 2.0 * MARGIN;
    let height = PLOT_H + 2.0 * MARGIN;
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    s.push_str("<g shape-rendering=\"crispEdges\">\n");
    for r in 0..rows {
        let mut c = 0;
        while c < cols {
            let lv = level(grid.at(r, c));
            let mut end = c + 1;
            while end < cols && level(grid.at(r, end)) == lv {
                end += 1;
            }
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                x_of(c),
                y_of(r + 1),
                (end - c) as f64 * cw,
                ch,
                ramp(lv as f64 / (LEVELS - 1) as f64)
            );
            c = end;
        }
    }
    s.push_str("</g>\n");

    let regions = tongue_regions(grid, max_q, tol);
    let min_label_area = (rows * cols / 400).max(4);
    for region in &regions {
        let mut d = String::new();
        let (mut sx, mut sy, mut n) = (0.0, 0.0, 0.0);
        for r in 0..rows {
            for c in 0..cols {
                if !region.contains(r, c) {
                    continue;
                }
                sx += x_of(c) + cw / 2.0;
                sy += y_of(r) - ch / 2.0;
                n += 1.0;
                let (x0, x1, y0, y1) = (x_of(c), x_of(c + 1), y_of(r), y_of(r + 1));
                if r == 0 || !region.contains(r - 1, c) {
                    let _ = write!(d, "M{x0:.2} {y0:.2}H{x1:.2}");
                }
                if r + 1 == rows || !region.contains(r + 1, c) {
                    let _ = write!(d, "M{x0:.2} {y1:.2}H{x1:.2}");
                }
                if c == 0 || !region.contains(r, c - 1) {
                    let _ = write!(d, "M{x0:.2} {y0:.2}V{y1:.2}");
                }
                if c + 1 == cols || !region.contains(r, c + 1) {
                    let _ = write!(d, "M{x1:.2} {y0:.2}V{y1:.2}");
                }
            }
        }
        let _ = writeln!(
            s,
            r##"<path d="{d}" fill="none" stroke="#ffffff" stroke-width="1"><title>{}</title></path>"##,
            region.lock
        );
        if region.area >= min_label_area {
            let _ = writeln!(
                s,
                r##"<text x="{:.1}" y="{:.1}" fill="#ffffff" text-anchor="middle">{}</text>"##,
                sx / n,
                sy / n,
                region.lock
            );
        }
    }

    let (x_label, y_label) = match spec.mode {
        GridMode::FsVsAmplitude => ("stimulation frequency (Hz)", "coupling I"),
        GridMode::F0VsEquivalentAmplitude => ("natural frequency (Hz)", "equivalent amplitude"),
    };
    let bottom = MARGIN + PLOT_H;
    let _ = writeln!(
        s,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{PLOT_W}" height="{PLOT_H}" fill="none" stroke="#000000"/>"##
    );
    for (x, anchor, v) in [
        (MARGIN, "start", spec.x_axis.min),
        (MARGIN + PLOT_W, "end", spec.x_axis.max),
    ] {
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" text-anchor="{anchor}">{v}</text>"#,
            bottom + 16.0
        );
    }
    for (y, v) in [(bottom, spec.y_axis.min), (MARGIN + 4.0, spec.y_axis.max)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{y}" text-anchor="end">{v}</text>"#,
            MARGIN - 6.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#,
        MARGIN + PLOT_W / 2.0,
        bottom + 36.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate({},{}) rotate(-90)" text-anchor="middle">{y_label}</text>"#,
        MARGIN - 30.0,
        MARGIN + PLOT_H / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="{}">winding {lo:.3} to {hi:.3}; fixed frequency {} Hz</text>"#,
        MARGIN - 12.0,
        spec.fixed_frequency
    );
    s.push_str("</svg>\n");
    s
}

const ROSE_SIZE: f64 = 520.0;
/// `(inner, outer)` radius of the basal, sleep-mode and boost rings.
const RINGS: [(f64, f64); 3] = [(70.0, 120.0), (130.0, 180.0), (190.0, 240.0)];

fn ring_of(mode: DeviceMode) -> usize {
    match mode {
        DeviceMode::BasalDay | DeviceMode::BasalNight | DeviceMode::Fallback => 0,
        DeviceMode::SleepMode => 1,
        DeviceMode::Boost => 2,
    }
}

fn colour_of(mode: DeviceMode) -> &'static str {
    match mode {
        DeviceMode::BasalDay => "#f2b134",
        DeviceMode::BasalNight => "#3b5b92",
        DeviceMode::Fallback => "#888888",
        DeviceMode::SleepMode => "#6a4c93",
        DeviceMode::Boost => "#d1495b",
    }
}

/// Point at clock time `hours` (0 at the top, clockwise) and radius `r`.
fn polar(hours: f64, r: f64) -> (f64, f64) {
    let a = hours / 24.0 * 2.0 * PI;
    let c = ROSE_SIZE / 2.0;
    (c + r * a.sin(), c - r * a.cos())
}

fn arc_path(h0: f64, h1: f64, r0: f64, r1: f64) -> String {
    let large = if h1 - h0 > 12.0 { 1 } else { 0 };
    let (ax, ay) = polar(h0, r1);
    let (bx, by) = polar(h1, r1);
    let (cx, cy) = polar(h1, r0);
    let (dx, dy) = polar(h0, r0);
    format!(
        "M{ax:.2} {ay:.2}A{r1} {r1} 0 {large} 1 {bx:.2} {by:.2}L{cx:.2} {cy:.2}A{r0} {r0} 0 {large} 0 {dx:.2} {dy:.2}Z"
    )
}

/// 24 h clock rose of a stimulation timeline: the inner ring shows the
/// basal (or fallback) program, the middle ring sleep mode and the outer
/// ring boost bursts. Opacity follows amplitude; several days overlay.
pub fn timeline_rose_svg(run: &ScheduleRun) -> String {
    let max_amp = run
        .timeline
        .iter()
        .map(|p| p.program.amplitude_ma)
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{ROSE_SIZE}" height="{ROSE_SIZE}" viewBox="0 0 {ROSE_SIZE} {ROSE_SIZE}" font-family="sans-serif" font-size="12">"#
    );
    for (r0, r1) in RINGS {
        let c = ROSE_SIZE / 2.0;
        let _ = writeln!(
            s,
            r##"<circle cx="{c}" cy="{c}" r="{:.1}" fill="none" stroke="#dddddd" stroke-width="{:.1}"/>"##,
            (r0 + r1) / 2.0,
            r1 - r0
        );
    }

    for (i, p) in run.timeline.iter().enumerate() {
        let until = run.timeline.get(i + 1).map_or(run.end, |n| n.timestamp);
        let hours = (until - p.timestamp).num_milliseconds() as f64 / 3.6e6;
        if hours <= 0.0 {
            continue;
        }
        let t = p.timestamp.time();
        let mut h0 = t.num_seconds_from_midnight() as f64 / 3600.0 + t.nanosecond() as f64 / 3.6e12;
        let mut left = hours.min(24.0);
        let (r0, r1) = RINGS[ring_of(p.mode)];
        let opacity = 0.25 + 0.75 * p.program.amplitude_ma / max_amp;
        let title = format!(
            "{} {} Hz {} mA from {}",
            p.mode, p.program.frequency_hz, p.program.amplitude_ma, p.timestamp
        );
        // Split at midnight and keep each arc under half a turn.
        while left > 0.0 {
            let step = left.min(24.0 - h0).min(12.0);
            let _ = writeln!(
                s,
                r#"<path d="{}" fill="{}" fill-opacity="{opacity:.2}"><title>{title}</title></path>"#,
                arc_path(h0, h0 + step, r0, r1),
                colour_of(p.mode)
            );
            h0 = (h0 + step) % 24.0;
            left -= step;
        }
    }

    for h in [0, 6, 12, 18] {
        let (x, y) = polar(h as f64, RINGS[2].1 + 14.0);
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{h:02}:00</text>"#,
            y + 4.0
        );
    }
    let c = ROSE_SIZE / 2.0;
    let _ = writeln!(
        s,
        r#"<text x="{c}" y="{c}" text-anchor="middle">basal / sleep / boost</text>"#
    );
    s.push_str("</svg>\n");
    s
}

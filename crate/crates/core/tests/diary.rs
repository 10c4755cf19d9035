use chrono::{Duration, NaiveDateTime};
use chronostim::diary::{
    group_periods, mann_whitney_one_tailed, parse_diary, write_diary_csv, Alternative, DiaryEvent,
    PeriodKind, TestMethod,
};
use proptest::prelude::*;

mod common;
use common::brute_mwu_p as brute_p;

fn distinct_sample(max_total: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1..=5usize, 1..=5usize)
        .prop_filter("size", move |(n, m)| n + m <= max_total)
        .prop_flat_map(|(n, m)| {
            prop::collection::btree_set(-50i32..50, n + m)
                .prop_map(|s| s.into_iter().collect::<Vec<_>>())
                .prop_shuffle()
                .prop_map(move |v| {
                    let v: Vec<f64> = v.into_iter().map(f64::from).collect();
                    (v[..n].to_vec(), v[n..].to_vec())
                })
        })
}

fn events(offsets_h: &[f64]) -> Vec<DiaryEvent> {
    let t0: NaiveDateTime = "2026-01-01T00:00:00".parse().unwrap();
    offsets_h
        .iter()
        .map(|h| DiaryEvent::new(t0 + Duration::seconds((h * 3600.0).round() as i64)))
        .collect()
}

#[test]
fn documented_examples_exact() {
    let cases: [(&[f64], &[f64], f64, f64); 3] = [
        (&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], 0.0, 0.05),
        (&[1.0], &[2.0], 0.0, 0.5),
        (&[1.0, 3.0], &[2.0, 4.0], 1.0, 1.0 / 3.0),
    ];
    for (x, y, u, p) in cases {
        let r = mann_whitney_one_tailed(x, y, Alternative::XLess).unwrap();
        assert_eq!(r.u_x, u);
        assert_eq!(r.p_one_tailed, p);
        assert_eq!(r.method, TestMethod::ExactEnumeration);
        assert_eq!(brute_p(x, y, Alternative::XLess), p);
    }
}

#[test]
fn parsed_diary_equals_standalone_sort() {
    let mut evs = events(&[50.0, 3.0, 27.5, 3.0, 0.0, 100.0]);
    for (i, e) in evs.iter_mut().enumerate() {
        e.note = format!("row{i}");
    }
    let mut buf = Vec::new();
    write_diary_csv(&evs, &mut buf).unwrap();
    let parsed = parse_diary(buf.as_slice()).unwrap();
    let mut want = evs.clone();
    want.sort_by_key(|e| e.timestamp);
    assert_eq!(parsed, want);
}

proptest! {
    #[test]
    fn exact_p_matches_enumeration((x, y) in distinct_sample(10), greater in any::<bool>()) {
        let alt = if greater { Alternative::XGreater } else { Alternative::XLess };
        let r = mann_whitney_one_tailed(&x, &y, alt).unwrap();
        prop_assert_eq!(r.method, TestMethod::ExactEnumeration);
        prop_assert!((r.p_one_tailed - brute_p(&x, &y, alt)).abs() <= 1e-12);
    }

    #[test]
    fn u_identity_with_ties(
        x in prop::collection::vec(0i32..6, 1..12),
        y in prop::collection::vec(0i32..6, 1..12),
    ) {
        let x: Vec<f64> = x.into_iter().map(f64::from).collect();
        let y: Vec<f64> = y.into_iter().map(f64::from).collect();
        let r = mann_whitney_one_tailed(&x, &y, Alternative::XLess).unwrap();
        prop_assert_eq!(r.u_x + r.u_y, (x.len() * y.len()) as f64);
        prop_assert!((0.0..=1.0).contains(&r.p_one_tailed));
    }

    #[test]
    fn periods_partition_input(mut offsets in prop::collection::vec(0.0f64..2000.0, 1..60), gap in 1.0f64..96.0) {
        offsets.sort_by(f64::total_cmp);
        let evs = events(&offsets);
        let periods = group_periods(&evs, gap).unwrap();
        let flat: Vec<DiaryEvent> = periods.iter().flat_map(|p| p.events.clone()).collect();
        prop_assert_eq!(flat, evs);
    }

    #[test]
    fn isolated_iff_single_iff_zero_duration(mut offsets in prop::collection::vec(0.0f64..2000.0, 1..60), gap in 1.0f64..96.0) {
        offsets.sort_by(f64::total_cmp);
        offsets.dedup_by(|a, b| (*a * 3600.0).round() == (*b * 3600.0).round());
        let periods = group_periods(&events(&offsets), gap).unwrap();
        for p in periods {
            let single = p.events.len() == 1;
            prop_assert_eq!(p.kind == PeriodKind::Isolated, single);
            prop_assert_eq!(p.duration_h == 0.0, single);
        }
    }

    #[test]
    fn larger_gap_never_adds_periods(mut offsets in prop::collection::vec(0.0f64..2000.0, 1..60), g1 in 1.0f64..96.0, g2 in 1.0f64..96.0) {
        offsets.sort_by(f64::total_cmp);
        let evs = events(&offsets);
        let (lo, hi) = (g1.min(g2), g1.max(g2));
        prop_assert!(group_periods(&evs, hi).unwrap().len() <= group_periods(&evs, lo).unwrap().len());
    }
}

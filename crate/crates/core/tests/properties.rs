//! Property tests for invariants that must hold for arbitrary inputs.

use chrono::{TimeDelta, TimeZone, Utc};
use kpisentinel::features::{extract_features, FeatureConfig, FeatureVector};
use kpisentinel::forecast::{adaboost_fit_traced, mae, AdaBoostParams, FeatureMatrix};
use kpisentinel::geo::{cluster_cells, ClusterInput, ClusterOptions};
use kpisentinel::ingest::{
    build_kpi_matrix, compute_kpis, read_cells, read_neighbors, read_pm, read_speedmap, write_cells, write_neighbors,
    write_pm, write_speedmap, CellInfo, KpiKind, MatrixOptions, PmRecord, SpeedWaypoint, TravelMode,
};
use kpisentinel::signatures::{
    cluster_correlation, detect_aligned, normalize_dense, AlignedReference, DetectionParams,
};
use proptest::prelude::*;

fn window(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, len)
}

fn non_constant(len: usize) -> impl Strategy<Value = Vec<f64>> {
    window(len).prop_filter("spread", |w| {
        let lo = w.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo > 1e-3
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

const FEATURE_CFG: FeatureConfig = FeatureConfig { window: 48, max_lag: 20 };

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cells_round_trip(
        raw in prop::collection::vec((-89.0f64..89.0, -179.0f64..179.0, 0.0f64..359.9, "[A-Za-z0-9_-]{1,8}"), 1..20)
    ) {
        let cells: Vec<CellInfo> = raw.iter().enumerate().map(|(i, (lat, lon, b, site))| CellInfo {
            cell_id: format!("cell{i}"),
            site_name: site.clone(),
            enb_id: format!("{}", 1000 + i / 3),
            latitude: *lat,
            longitude: *lon,
            bearing: *b,
            neighbor_ids: if i > 0 { vec![format!("cell{}", i - 1)] } else { vec![] },
        }).collect();
        let (mut cbuf, mut nbuf) = (Vec::new(), Vec::new());
        write_cells(&mut cbuf, &cells).unwrap();
        write_neighbors(&mut nbuf, &cells).unwrap();
        let mut back = read_cells(cbuf.as_slice(), "cells.csv").unwrap();
        read_neighbors(nbuf.as_slice(), "neighbors.csv", &mut back).unwrap();
        prop_assert_eq!(back, cells);
    }

    #[test]
    fn pm_round_trip(raw in prop::collection::vec((0u64..500, 0u64..500, 0.0f64..1e4, 0.0f64..3600.0, 0u64..900, 0u64..900), 1..30)) {
        let start = Utc.with_ymd_and_hms(2024, 3, 4, 0, 0, 0).unwrap();
        let recs: Vec<PmRecord> = raw.iter().enumerate().map(|(i, &(a, b, v, t, c, d))| PmRecord {
            cell_id: format!("c{}", i % 4),
            timestamp: start + TimeDelta::hours(i as i64),
            ho_success: a.min(b), ho_attempts: a.max(b),
            dl_pdcp_volume_mb: v, dl_active_time_s: t,
            rrc_success: c.min(d), rrc_attempts: c.max(d),
        }).collect();
        let mut buf = Vec::new();
        write_pm(&mut buf, &recs).unwrap();
        prop_assert_eq!(read_pm(buf.as_slice(), "pm.csv").unwrap(), recs.clone());

        for s in compute_kpis(&recs).unwrap() {
            for k in [KpiKind::Hosr, KpiKind::RrcSr] {
                if let Some(v) = s.get(k) {
                    prop_assert!((0.0..=100.0).contains(&v));
                }
            }
        }
    }

    #[test]
    fn speedmap_round_trip(raw in prop::collection::vec((-89.0f64..89.0, -179.0f64..179.0, 0.0f64..100.0, 0usize..4), 1..30)) {
        let modes = [TravelMode::Driving, TravelMode::Walking, TravelMode::Cycling, TravelMode::Transit];
        let wps: Vec<SpeedWaypoint> = raw.iter().map(|&(la, lo, s, m)| SpeedWaypoint {
            latitude: la, longitude: lo, speed_limit: s, travel_mode: modes[m],
        }).collect();
        let mut buf = Vec::new();
        write_speedmap(&mut buf, &wps).unwrap();
        prop_assert_eq!(read_speedmap(buf.as_slice(), "speedmap.csv").unwrap(), wps);
    }

    #[test]
    fn matrix_counts_in_range_samples(hours in prop::collection::vec(0usize..30, 1..40)) {
        let start = Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap();
        let mut seen = std::collections::HashSet::new();
        let recs: Vec<PmRecord> = hours.iter().filter(|h| seen.insert(**h)).map(|&h| PmRecord {
            cell_id: "a".into(), timestamp: start + TimeDelta::hours(h as i64),
            ho_success: 9, ho_attempts: 10, dl_pdcp_volume_mb: 1.0, dl_active_time_s: 2.0,
            rrc_success: 1, rrc_attempts: 1,
        }).collect();
        let samples = compute_kpis(&recs).unwrap();
        let b = build_kpi_matrix::<f64>(&samples, KpiKind::Hosr, &["a".to_string()], start, 20, MatrixOptions { fill: false }).unwrap();
        let in_range = recs.iter().filter(|r| (r.timestamp - start).num_hours() < 20).count();
        prop_assert_eq!(b.matrix.present_count(), in_range);
        prop_assert_eq!(b.out_of_range, recs.len() - in_range);
    }

    #[test]
    fn normalize_preserves_order(x in prop::collection::vec(-1e3f64..1e3, 1..60)) {
        let n = normalize_dense(&x).unwrap();
        for i in 0..x.len() {
            prop_assert!((0.0..=1.0).contains(&n[i]));
            for j in 0..x.len() {
                if x[i] <= x[j] {
                    prop_assert!(n[i] <= n[j]);
                }
            }
        }
    }

    #[test]
    fn features_shift_invariant(x in non_constant(48), c in -100.0f64..100.0) {
        let a = extract_features(&x, &FEATURE_CFG).unwrap();
        let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
        let b = extract_features(&shifted, &FEATURE_CFG).unwrap();
        for i in [FeatureVector::<f64>::MAX, FeatureVector::<f64>::MIN, FeatureVector::<f64>::MEAN, FeatureVector::<f64>::MEDIAN] {
            prop_assert!(close(b.values[i], a.values[i] + c, 1e-9));
        }
        for i in [FeatureVector::<f64>::VARIANCE, FeatureVector::<f64>::SKEWNESS, FeatureVector::<f64>::KURTOSIS,
                  FeatureVector::<f64>::VAR_GT_STD, FeatureVector::<f64>::COUNT_ABOVE, FeatureVector::<f64>::COUNT_BELOW] {
            prop_assert!(close(b.values[i], a.values[i], 1e-9), "slot {}", i);
        }
        for (p, q) in a.ar_coefficients().iter().zip(b.ar_coefficients()) {
            prop_assert!(close(*p, *q, 1e-6), "{} vs {}", p, q);
        }
        prop_assert!(close(a.mean_abs_change(), b.mean_abs_change(), 1e-9));
        prop_assert!(close(a.mean_autocorrelation(), b.mean_autocorrelation(), 1e-9));
    }

    #[test]
    fn features_scale_covariant(x in non_constant(48), s in 0.01f64..100.0) {
        let a = extract_features(&x, &FEATURE_CFG).unwrap();
        let scaled: Vec<f64> = x.iter().map(|v| v * s).collect();
        let b = extract_features(&scaled, &FEATURE_CFG).unwrap();
        for i in [FeatureVector::<f64>::MAX, FeatureVector::<f64>::MIN, FeatureVector::<f64>::MEAN, FeatureVector::<f64>::MEDIAN] {
            prop_assert!(close(b.values[i], a.values[i] * s, 1e-9));
        }
        prop_assert!(close(b.values[FeatureVector::<f64>::VARIANCE], a.values[FeatureVector::<f64>::VARIANCE] * s * s, 1e-9));
        for i in [FeatureVector::<f64>::SKEWNESS, FeatureVector::<f64>::KURTOSIS, FeatureVector::<f64>::COUNT_ABOVE, FeatureVector::<f64>::COUNT_BELOW] {
            prop_assert!(close(b.values[i], a.values[i], 1e-9));
        }
        prop_assert!(close(b.mean_abs_change(), a.mean_abs_change() * s, 1e-9));
        prop_assert!(close(b.mean_autocorrelation(), a.mean_autocorrelation(), 1e-9));
    }

    #[test]
    fn distribution_features_reversal_invariant(x in window(48)) {
        let a = extract_features(&x, &FEATURE_CFG).unwrap();
        let rev: Vec<f64> = x.iter().rev().copied().collect();
        let b = extract_features(&rev, &FEATURE_CFG).unwrap();
        for i in 0..10 {
            prop_assert!(close(a.values[i], b.values[i], 1e-9), "slot {}", i);
        }
        prop_assert!(close(a.mean_abs_change(), b.mean_abs_change(), 1e-9));
        prop_assert_eq!(a.width(), b.width());
    }

    #[test]
    fn mae_metric_properties(a in window(20), b in window(20), c in window(20)) {
        prop_assert_eq!(mae(&a, &a).unwrap(), 0.0);
        prop_assert!(mae(&a, &b).unwrap() >= 0.0);
        prop_assert!((mae(&a, &b).unwrap() - mae(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!(mae(&a, &c).unwrap() <= mae(&a, &b).unwrap() + mae(&b, &c).unwrap() + 1e-9);
    }

    #[test]
    fn correlation_symmetric_unit_diagonal(rows in prop::collection::vec(prop::collection::vec(prop::option::weighted(0.9, -5.0f64..5.0), 30), 4)) {
        let m = cluster_correlation(&rows);
        for i in 0..4 {
            if let Some(d) = m.get(i, i) {
                prop_assert_eq!(d, 1.0);
            }
            for j in 0..4 {
                prop_assert_eq!(m.get(i, j), m.get(j, i));
                if let Some(r) = m.get(i, j) {
                    prop_assert!((-1.0..=1.0).contains(&r));
                }
            }
        }
    }

    #[test]
    fn event_count_monotone_in_threshold(
        bumps in prop::collection::vec((0usize..150, 1usize..60, -3.0f64..3.0), 0..6),
        t1 in 1.0f64..8.0, dt in 0.0f64..8.0, min_run in 1usize..8,
    ) {
        let n = 200;
        let mut series: Vec<f64> = (0..n).map(|t| (t as f64 * std::f64::consts::TAU / 24.0).sin()).collect();
        let aligned = AlignedReference { reference: series.clone(), dispersion: vec![0.1; n] };
        for (s, d, m) in bumps {
            for v in &mut series[s..(s + d).min(n)] {
                *v += m;
            }
        }
        let count = |th: f64| {
            let p = DetectionParams { threshold: th, min_run, ..Default::default() };
            detect_aligned(0, KpiKind::Hosr, &series, &aligned, &p).unwrap().0
        };
        let (lo, hi) = (count(t1), count(t1 + dt));
        prop_assert!(hi.len() <= lo.len());
        for e in lo.events.iter().chain(&hi.events) {
            prop_assert!(e.end_hour >= e.start_hour);
            prop_assert!(e.peak_score >= t1);
        }
        for w in lo.events.windows(2) {
            prop_assert!(w[0].end_hour < w[1].start_hour);
        }
    }

    #[test]
    fn own_reference_gives_no_events(x in window(100)) {
        let aligned = AlignedReference { reference: x.clone(), dispersion: vec![0.0; 100] };
        let (r, _) = detect_aligned(0, KpiKind::DlTraffic, &x, &aligned, &DetectionParams::default()).unwrap();
        prop_assert!(r.is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn boosting_weights_stay_a_distribution(
        rows in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 4), 12..40),
        seed in any::<u64>(),
    ) {
        let y: Vec<f64> = rows.iter().map(|r| r[0] * 2.0 - r[1] + (r[2] * 3.0).sin()).collect();
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let (model, trace) = adaboost_fit_traced(&x, &y, &AdaBoostParams::default(), seed).unwrap();
        prop_assert!(!model.stages().is_empty() && model.stages().len() <= 10);
        for s in model.stages() {
            prop_assert!(s.weight > 0.0);
        }
        for t in &trace {
            let total: f64 = t.sample_weights.iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
            prop_assert!(t.sample_weights.iter().all(|&w| w >= 0.0));
        }
        for r in &rows {
            let preds = model.stage_predictions(r);
            let p = model.predict(r);
            prop_assert!(preds.contains(&p));
        }
    }

    #[test]
    fn kmeans_partition_properties(
        pts in prop::collection::vec((59.0f64..61.0, 23.0f64..26.0, 0.0f64..100.0), 4..40),
        k in 1usize..5, seed in any::<u64>(), rot in 0usize..40,
    ) {
        prop_assume!(k <= pts.len());
        let inputs: Vec<ClusterInput<f64>> = pts.iter().enumerate().map(|(i, &(la, lo, s))| ClusterInput {
            cell_id: format!("c{i:03}"), latitude: la, longitude: lo, speed_kmh: s,
        }).collect();
        let a = cluster_cells(&inputs, k, seed, ClusterOptions::default()).unwrap();
        prop_assert_eq!(a.labels.len(), inputs.len());
        prop_assert!(a.labels.iter().all(|&l| l < k));
        prop_assert_eq!(a.assignments.len(), inputs.len());
        for w in a.objective_trace.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9 * w[0].max(1.0));
        }
        let b = cluster_cells(&inputs, k, seed, ClusterOptions::default()).unwrap();
        prop_assert_eq!(&a, &b);

        let mut permuted = inputs.clone();
        permuted.rotate_left(rot % inputs.len());
        let c = cluster_cells(&permuted, k, seed, ClusterOptions::default()).unwrap();
        for id in a.assignments.keys() {
            prop_assert_eq!(a.cluster_of(id), c.cluster_of(id));
        }
    }
}

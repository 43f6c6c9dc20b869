//! End-to-end verification runs beyond the acceptance criteria: grey-line
//! reconstruction, case-4 finite-depth discrepancy, departure detection,
//! artifact determinism and the preset pin.

use std::f64::consts::LN_10;

use pluricycle::analysis::{reproduce_figure, run_preset, Classification, RunSettings};
use pluricycle::integrate::{integrate, EventKind, IntegrateOptions, LogState, Outcome};
use pluricycle::model::{assemble_system, Case};
use pluricycle::presets::{self, Variant};
use pluricycle::stability::delta_value;
use sha2::{Digest, Sha256};

#[test]
fn greyline_model_fits_the_stable_tail() {
    let preset = presets::by_name("fig9a").unwrap();
    let run = run_preset(&preset, None, &RunSettings::default()).unwrap();
    assert!(run.verdict.agree, "{:?}", run.verdict);
    let delta = run.report.delta;
    let m = run.series.values();
    assert!(m.len() >= 9);
    for n in 2..8 {
        // 0-based: minima 3..8 against their successors.
        let predicted = delta * m[n];
        let rel = ((predicted - m[n + 1]) / m[n + 1]).abs();
        assert!(
            rel < 0.05,
            "minimum {}: model {predicted} vs measured {} (rel {rel:.3e})",
            n + 1,
            m[n + 1]
        );
    }
}

#[test]
fn case4_deviation_exceeds_case1_at_equal_depth_and_shrinks_with_depth() {
    let settings = RunSettings::default();
    let dev = |name: &str, depth: Option<f64>| -> f64 {
        let preset = presets::by_name(name).unwrap();
        let d = delta_value(&preset.params).unwrap();
        let run = run_preset(&preset, depth, &settings).unwrap();
        ((run.verdict.ratio_estimate - d) / d).abs()
    };
    let case1 = dev("fig9a", None);
    let case4 = dev("fig12a", None);
    assert!(
        case4 > case1,
        "case 4 deviation {case4:.3e} should exceed case 1 deviation {case1:.3e}"
    );
    let case4_deep = dev("fig12a", Some(-6000.0 * LN_10));
    assert!(
        case4_deep < case4,
        "deepening the start should shrink the deviation: {case4_deep:.3e} vs {case4:.3e}"
    );
}

#[test]
fn verdict_json_has_exactly_the_documented_keys() {
    let preset = presets::by_name("fig9a").unwrap();
    let run = run_preset(&preset, Some(-60.0 * LN_10), &RunSettings::default()).unwrap();
    let json = run.verdict.to_json_value();
    let obj = json.as_object().unwrap();
    let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    let mut want = vec![
        "agree",
        "case",
        "delta",
        "empirical",
        "interval_ratio_estimate",
        "predicted",
        "ratio_estimate",
        "tolerance",
        "variant",
    ];
    want.sort();
    assert_eq!(keys, want);
}

#[test]
fn reproduction_artifacts_are_deterministic() {
    let settings = RunSettings::default();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let (run_a, files_a) =
        reproduce_figure(Case::Case3, Variant::B, &settings, dir_a.path(), 10, false).unwrap();
    let (_, files_b) =
        reproduce_figure(Case::Case3, Variant::B, &settings, dir_b.path(), 10, false).unwrap();

    assert_eq!(run_a.verdict.empirical, Classification::Unstable);
    assert!(run_a.verdict.variant == Some(Variant::B));

    assert_eq!(files_a.len(), files_b.len());
    for (a, b) in files_a.iter().zip(&files_b) {
        assert_eq!(a.file_name(), b.file_name());
        let bytes_a = std::fs::read(a).unwrap();
        let bytes_b = std::fs::read(b).unwrap();
        assert_eq!(bytes_a, bytes_b, "{:?} differs between runs", a.file_name());
    }

    let names: Vec<String> = files_a
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    for want in [
        "trajectory.csv",
        "events.csv",
        "minima.csv",
        "greyline.csv",
        "verdict.json",
    ] {
        assert!(names.iter().any(|n| n == want), "missing {want}");
    }
}

#[test]
fn case4_unstable_run_departs_from_a_shallow_start() {
    // From x4 = 1e-20 the case-4 unstable trajectory exhausts its depth and
    // leaves: a rise through the departure threshold with no intervening dip
    // below the ceiling.
    let preset = presets::by_name("fig12b").unwrap();
    let system = assemble_system(&preset.params);
    let u0 = LogState {
        t: 0.0,
        u: preset.initial_log_state(Some(-20.0 * LN_10)),
    };
    let opts = IntegrateOptions::default();
    let traj = integrate(&system, u0, 1e4, &opts);
    assert_eq!(traj.outcome, Outcome::Departed, "{:?}", traj.outcome);
    let last = traj.events.last().unwrap();
    assert_eq!(last.kind, EventKind::Departure);
    assert!((last.u[3] - 0.1f64.ln()).abs() < 1e-6);
    // The minima collected before departure shrink in magnitude.
    let minima: Vec<f64> = traj.minima().map(|e| e.u[3]).collect();
    assert!(minima.len() >= 3);
    for w in minima.windows(2) {
        assert!(w[1] > w[0], "{minima:?}");
    }
}

#[test]
fn case2_interval_ratios_track_delta() {
    let preset = presets::by_name("fig10a").unwrap();
    let run = run_preset(&preset, None, &RunSettings::default()).unwrap();
    assert!(run.verdict.agree, "{:?}", run.verdict);
    let want = 1.07708;
    assert!(
        (run.verdict.interval_ratio_estimate - want).abs() <= 0.05 * want,
        "interval estimate {} vs {want}",
        run.verdict.interval_ratio_estimate
    );
}

#[test]
fn runs_with_too_few_minima_report_an_analysis_error() {
    let preset = presets::by_name("fig9a").unwrap();
    let settings = RunSettings {
        t_max: 10.0,
        ..RunSettings::default()
    };
    let err = run_preset(&preset, Some(-60.0 * LN_10), &settings).unwrap_err();
    assert!(err.to_string().contains("minima"), "{err}");
}

#[test]
fn presets_are_pinned_by_checksum() {
    let mut canonical = String::new();
    for p in presets::all() {
        canonical.push_str(&format!(
            "{}:{}:{}:{}:{}\n",
            p.name,
            p.case.id(),
            p.variant.letter(),
            p.x4_exp10,
            serde_json::to_string(&p.params.to_json_value()).unwrap()
        ));
    }
    let digest = Sha256::digest(canonical.as_bytes());
    let hex = format!("{digest:x}");
    assert_eq!(
        hex, "e71d9de2fa4a2839a923f9aeaf4c7f16c0879aa331567422d62cf76c4447d00e",
        "canonical preset serialization:\n{canonical}"
    );
}

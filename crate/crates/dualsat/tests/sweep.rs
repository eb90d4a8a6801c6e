use std::path::Path;

use dualsat::error::HarnessError;
use dualsat::output::{csv_bytes, parse_csv, results_rows, write_results, CSV_HEADER};
use dualsat::scenario::Scenario;
use dualsat::sweep::{run_sweep, run_sweep_with_threads};
use dualsat_core::architectures::Architecture;

fn small(drops: usize) -> Scenario {
    let mut s = Scenario::default();
    s.sweep.start_dbw = -5.0;
    s.sweep.stop_dbw = 50.0;
    s.sweep.step_db = 5.0;
    s.sweep.drops = drops;
    s
}

#[test]
fn shipped_default_scenario_matches_built_in_defaults() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/default.toml");
    assert_eq!(Scenario::load(&path).unwrap(), Scenario::default());
}

#[test]
fn grid_size_and_row_order() {
    let r = run_sweep(&small(2)).unwrap();
    assert_eq!(r.powers.len(), 12);
    let rows = results_rows(&r);
    assert_eq!(rows.len(), 12 * Architecture::ALL.len());
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.architecture, Architecture::ALL[i / 12]);
        assert_eq!(row.p_tot_dbw, -5.0 + 5.0 * (i % 12) as f64);
        assert_eq!(row.drops, 2);
    }
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let s = small(6);
    let one = csv_bytes(&results_rows(&run_sweep_with_threads(&s, 1).unwrap()));
    let again = csv_bytes(&results_rows(&run_sweep_with_threads(&s, 1).unwrap()));
    let four = csv_bytes(&results_rows(&run_sweep_with_threads(&s, 4).unwrap()));
    assert_eq!(one, again);
    assert_eq!(one, four);
}

#[test]
fn seed_changes_the_output() {
    let mut s = small(3);
    let a = csv_bytes(&results_rows(&run_sweep(&s).unwrap()));
    s.sweep.seed = 2;
    let b = csv_bytes(&results_rows(&run_sweep(&s).unwrap()));
    assert_ne!(a, b);
}

/// Power points draw independent users: the first drop differs between points.
#[test]
fn power_points_use_independent_drops() {
    let mut s = small(1);
    s.sweep.architectures = vec![Architecture::Conventional];
    let r = run_sweep(&s).unwrap();
    let first: Vec<f64> = r.outcomes.iter().map(|p| p[0][0].rates[0]).collect();
    assert!(first.windows(2).any(|w| w[0] != w[1]));
}

#[test]
fn standard_error_scales_as_one_over_root_n() {
    let mut s = Scenario::default();
    s.sweep.start_dbw = 20.0;
    s.sweep.stop_dbw = 20.0;
    s.sweep.architectures = vec![Architecture::Conventional, Architecture::Coordinated];
    let stderr = |drops: usize| {
        let mut s = s.clone();
        s.sweep.drops = drops;
        let r = run_sweep(&s).unwrap();
        [r.stats(0, 0).se_stderr, r.stats(0, 1).se_stderr]
    };
    let (n, n2, n4) = (stderr(100), stderr(200), stderr(400));
    for a in 0..2 {
        let half = n[a] / n4[a];
        assert!((half / 2.0 - 1.0).abs() < 0.3, "quadrupling gives ratio {half}");
        let root2 = n[a] / n2[a];
        assert!((root2 / 2f64.sqrt() - 1.0).abs() < 0.3, "doubling gives ratio {root2}");
    }
}

#[test]
fn written_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let r = run_sweep(&small(2)).unwrap();
    let files = write_results(&r, dir.path()).unwrap();
    let text = std::fs::read(&files.csv).unwrap();
    assert_eq!(parse_csv(text.as_slice()).unwrap(), results_rows(&r));
    assert!(text.starts_with(CSV_HEADER.join(",").as_bytes()));

    let meta: serde_json::Value = serde_json::from_slice(&std::fs::read(&files.metadata).unwrap()).unwrap();
    assert_eq!(meta["master_seed"], 1);
    assert_eq!(meta["drops_per_point"], 2);
    assert_eq!(meta["scenario"]["scenario_id"], "default");
    assert_eq!(meta["content_hash"], dualsat::output::content_hash(&text));
    let coop = meta["architectures"]
        .as_array()
        .unwrap()
        .iter()
        .find(|a| a["tag"] == "cooperative")
        .unwrap();
    assert_eq!(coop["upper_bound"], true);

    let cdf = std::fs::read_to_string(&files.cdf).unwrap();
    // Three distribution powers, five architectures, 14 users, 2 drops.
    assert_eq!(cdf.lines().count(), 1 + 3 * 5 * 14 * 2);
    let summary = std::fs::read_to_string(&files.summary).unwrap();
    assert_eq!(summary.lines().count(), 1 + 10);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let r = run_sweep(&small(1)).unwrap();
    let e = write_results(&r, &blocker.join("sub")).unwrap_err();
    assert!(matches!(e, HarnessError::Io { .. }));
    assert_eq!(e.exit_code(), 1);
}

#[test]
fn exit_codes() {
    assert_eq!(HarnessError::config("sweep.drops", "x").exit_code(), 2);
    let numerical = HarnessError::Numerical {
        power_index: 3,
        p_tot_dbw: 2.5,
        drop_index: 17,
        source: dualsat_core::Error::RankDeficient { ratio: 0.0 },
    };
    assert_eq!(numerical.exit_code(), 3);
    let msg = numerical.to_string();
    assert!(
        msg.contains("power point 3") && msg.contains("2.5 dBW") && msg.contains("drop 17"),
        "{msg}"
    );
    let bad_param = HarnessError::Model(dualsat_core::Error::InvalidParameter { name: "x", reason: "y" });
    assert_eq!(bad_param.exit_code(), 2);
}

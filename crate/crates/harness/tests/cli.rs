use std::path::PathBuf;
use std::process::{Command, Output};

use stablearn::Report;
use stablearn_core::LearnerConfig;

fn stablearn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stablearn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stablearn-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn report(out: &Output) -> Report {
    serde_json::from_slice(&out.stdout).expect("stdout holds a JSON report")
}

#[test]
fn test_mode_accepts_stabilizer_states() {
    let out = stablearn(&["test", "--n", "4", "--trials", "5", "--seed", "1"]);
    assert!(out.status.success());
    let r = report(&out);
    assert_eq!(r.trials.len(), 5);
    assert!(r.trials.iter().all(|t| t.accept == Some(true)));
    assert!(r.trials.windows(2).all(|w| w[0].trial < w[1].trial));
}

#[test]
fn learn_mode_reports_distances() {
    let out = stablearn(&[
        "learn", "--n", "5", "--t", "1", "--trials", "4", "--seed", "3",
    ]);
    assert!(out.status.success());
    let r = report(&out);
    for t in &r.trials {
        let d = t.trace_distance.unwrap();
        assert!((0.0..=1.0).contains(&d));
        assert!(t.t_hat.unwrap() <= 1);
        assert!(t.copies_used > 0);
    }
    assert!(r.aggregate.mean_trace_distance.is_some());
}

#[test]
fn validate_mode_passes() {
    let out = stablearn(&["validate", "--n", "4", "--t", "2", "--trials", "6"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(report(&out).trials.iter().all(|t| t.failures.is_empty()));
}

#[test]
fn threshold_drives_the_exit_code() {
    // Haar inputs pass when rejected.
    let out = stablearn(&["test", "--n", "3", "--k", "3", "--trials", "3", "--haar"]);
    assert_eq!(out.status.code(), Some(0));
    // T|+> has no stabilizers, so a tester promised k = 1 fails every trial.
    let circuit = scratch("t_plus.txt");
    std::fs::write(&circuit, "H 0\nT 0\n").unwrap();
    let args = [
        "test",
        "--n",
        "1",
        "--k",
        "1",
        "--trials",
        "3",
        "--circuit",
        circuit.to_str().unwrap(),
    ];
    let out = stablearn(&args);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out).aggregate.successes, 0);
    let mut lenient = args.to_vec();
    lenient.extend(["--threshold", "0"]);
    assert_eq!(stablearn(&lenient).status.code(), Some(0));
}

#[test]
fn invalid_configs_exit_with_two() {
    assert_eq!(
        stablearn(&["test", "--n", "4", "--eps", "0.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        stablearn(&["learn", "--n", "2", "--t", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        stablearn(&["test", "--n", "4", "--trials", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn circuit_files_and_csv_output() {
    let circuit = scratch("bell.txt");
    std::fs::write(&circuit, "# Bell pair with a T\nH 0\nCNOT 0 1\nT 1\n").unwrap();
    let csv = scratch("out.csv");
    let out = stablearn(&[
        "learn",
        "--n",
        "2",
        "--trials",
        "3",
        "--circuit",
        circuit.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        stablearn::report::CSV_COLUMNS.join(",")
    );
    assert_eq!(lines.count(), 3);
}

#[test]
fn calibrate_writes_a_learner_config() {
    let cfg = scratch("learner.json");
    let out = stablearn(&[
        "calibrate",
        "--t",
        "1",
        "--trials",
        "20",
        "--grid",
        "0.5,1",
        "--config-out",
        cfg.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(&out);
    assert_eq!(r.calibration.len(), 2);
    let loaded = LearnerConfig::load(&cfg).unwrap();
    assert_eq!(Some(loaded.tomography_constant), r.chosen_constant);
    let out = stablearn(&[
        "learn",
        "--n",
        "3",
        "--t",
        "1",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert!(out.status.code().is_some_and(|c| c <= 1));
}

#[test]
fn same_seed_same_report() {
    let args = [
        "learn", "--n", "4", "--t", "1", "--trials", "4", "--seed", "17",
    ];
    let a = report(&stablearn(&args)).without_timing();
    let b = report(&stablearn(&args)).without_timing();
    assert_eq!(a.to_json(), b.to_json());
    let c = report(&stablearn(&[
        "learn", "--n", "4", "--t", "1", "--trials", "4", "--seed", "18",
    ]));
    assert_ne!(a.trials[0].seed, c.trials[0].seed);
}

//! End-to-end checks of the `rebound` binary and the shipped config file.

use std::path::Path;
use std::process::Command;

use rebound_cli::ExperimentConfig;

fn repo_root() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .unwrap()
        .parent()
        .unwrap()
}

#[test]
fn shipped_config_matches_builtin_defaults() {
    let path = repo_root().join("configs/default.json");
    let text = std::fs::read_to_string(&path).expect("configs/default.json present");
    let shipped: ExperimentConfig = serde_json::from_str(&text).expect("shipped config parses");
    assert_eq!(
        shipped,
        ExperimentConfig::default(),
        "configs/default.json is out of date; regenerate with `cargo run -p rebound-cli --bin gen_config`"
    );
}

fn small_config(dir: &Path) -> std::path::PathBuf {
    let mut cfg = ExperimentConfig::default();
    cfg.trials = 2;
    cfg.noise_levels = vec![0.0];
    cfg.characterization.instances = 4;
    cfg.boundary.an1_ln3_weights = vec![900.0];
    cfg.boundary.ln3_ln4_weights = vec![9000.0];
    cfg.boundary.noise_levels = vec![0.0];
    let path = dir.join("small.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    path
}

#[test]
fn binary_runs_each_subcommand() {
    let dir = std::env::temp_dir().join("rebound-cli-smoke");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let config = small_config(&dir);

    let cases: &[(&[&str], &[&str])] = &[
        (
            &["characterize", "--format", "csv"],
            &["characterize__instances.csv", "characterize__summary.csv"],
        ),
        (
            &["detect", "--ipi", "20", "--format", "csv"],
            &["detect__spikes.csv", "detect__traces.csv"],
        ),
        (&["ipi-sweep"], &["ipi_sweep.json"]),
        (&["boundary"], &["boundary.json"]),
        (
            &["delay-sweep", "--format", "csv"],
            &["delay_sweep__sweep.csv"],
        ),
        (&["polychronous"], &["polychronous.json"]),
    ];
    for (args, expected) in cases {
        let out_dir = dir.join(args[0]);
        let status = Command::new(env!("CARGO_BIN_EXE_rebound"))
            .args(*args)
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&out_dir)
            .status()
            .expect("binary runs");
        assert!(status.success(), "rebound {args:?} failed");
        for file in *expected {
            let path = out_dir.join(file);
            assert!(path.exists(), "missing output {}", path.display());
        }
    }
}

#[test]
fn seed_flag_changes_output_and_reruns_match() {
    let dir = std::env::temp_dir().join("rebound-cli-seeds");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let config = small_config(&dir);
    let run = |seed: &str, out: &str| -> String {
        let out_dir = dir.join(out);
        let status = Command::new(env!("CARGO_BIN_EXE_rebound"))
            .args(["characterize", "--seed", seed])
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&out_dir)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read_to_string(out_dir.join("characterize.json")).unwrap()
    };
    let a = run("7", "a");
    let b = run("7", "b");
    let c = run("8", "c");
    assert_eq!(a, b, "same seed must give byte-identical reports");
    assert_ne!(a, c, "different seeds must differ");
}

#[test]
fn detect_csv_schemas() {
    // spikes: neuron,time; traces: time plus one potential column per
    // recorded neuron; every table carries a schema_version comment.
    let dir = std::env::temp_dir().join("rebound-cli-schema");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let config = small_config(&dir);
    let status = Command::new(env!("CARGO_BIN_EXE_rebound"))
        .args(["detect", "--format", "csv"])
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let spikes = std::fs::read_to_string(dir.join("detect__spikes.csv")).unwrap();
    let mut lines = spikes.lines();
    assert!(lines.next().unwrap().starts_with("# schema_version=1"));
    assert_eq!(lines.next().unwrap(), "neuron,time");
    let traces = std::fs::read_to_string(dir.join("detect__traces.csv")).unwrap();
    assert_eq!(traces.lines().nth(1).unwrap(), "time,v_ln2,v_ln3,v_ln4");
}

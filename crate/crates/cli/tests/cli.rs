use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sagsin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sagsin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn header(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    text.lines().next().unwrap_or_default().to_string()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("scenario.toml");
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn validate_defaults_and_examples() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write_config(dir.path(), "");
    assert_eq!(
        sagsin(&["validate", "--config", &ok]).status.code(),
        Some(0)
    );

    let many = write_config(dir.path(), "[vessels]\ncount = 25\n");
    assert_eq!(
        sagsin(&["validate", "--config", &many]).status.code(),
        Some(0)
    );

    let bad = write_config(dir.path(), "[simulation]\ntau_s = -0.1\n");
    let out = sagsin(&["validate", "--config", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("simulation.tau_s"));

    let unknown = write_config(dir.path(), "[vessels]\ncont = 3\n");
    assert_eq!(
        sagsin(&["validate", "--config", &unknown]).status.code(),
        Some(1)
    );

    let shipped = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/default.toml");
    assert_eq!(
        sagsin(&["validate", "--config", shipped]).status.code(),
        Some(0)
    );
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(sagsin(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        sagsin(&["experiment", "custom", "--values", "1,2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        sagsin(&["experiment", "compute-fluctuation", "--values", ""])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(sagsin(&["--help"]).status.code(), Some(0));
}

#[test]
fn run_writes_stable_csv_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[vessels]\ncount = 3\n");
    let out = dir.path().join("out");
    let status = sagsin(&[
        "run",
        "--config",
        &cfg,
        "--variant",
        "DASH",
        "--variant",
        "ONE_SHOT_PROXY",
        "--trace-queues",
        "--dump-pressure",
        "--opt-trace",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        status.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let dash = out.join("DASH");
    assert_eq!(header(&dash.join("delays.csv")), "vessel,delay_s,finished");
    assert_eq!(header(&dash.join("backlog.csv")), "slot,backlog_bits");
    assert_eq!(header(&dash.join("queues.csv")), "slot,vessel,node,bits");
    assert_eq!(
        header(&dash.join("pressure.csv")),
        "slot,vessel,quantity,link,value"
    );
    assert_eq!(
        header(&dash.join("opt_trace.csv")),
        "slot,bcd_iteration,objective_bits,accepted,sca_iterations,rate_sum_bps"
    );
    assert!(out.join("ONE_SHOT_PROXY").join("delays.csv").exists());
    let comparison = fs::read_to_string(out.join("comparison.csv")).unwrap();
    let mut lines = comparison.lines();
    assert_eq!(
        lines.next(),
        Some("variant,seed,mean_delay_s,handover_backlog_bits,unfinished")
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn experiment_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[vessels]\ncount = 3\n");
    let run = |sub: &str, jobs: &str| {
        let out = dir.path().join(sub);
        let o = sagsin(&[
            "experiment",
            "compute-fluctuation",
            "--config",
            &cfg,
            "--values",
            "0,50",
            "--seeds",
            "3",
            "--jobs",
            jobs,
            "--out-dir",
            out.to_str().unwrap(),
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        out
    };
    let a = run("a", "1");
    let b = run("b", "3");
    assert_eq!(
        header(&a.join("compute_fluctuation.csv")),
        "x,variant,mean,stderr"
    );
    assert_eq!(
        header(&a.join("compute_fluctuation_runs.csv")),
        "x,variant,seed,mean_delay_s,handover_backlog_bits,unfinished"
    );
    for f in [
        "compute_fluctuation.csv",
        "compute_fluctuation_runs.csv",
        "compute_fluctuation.svg",
    ] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let svg = fs::read_to_string(a.join("compute_fluctuation.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn crwm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crwm"))
        .args(args)
        .env_remove("CRWM_OUT_DIR")
        .output()
        .unwrap()
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn run_is_byte_identical_per_seed() {
    let sonar = data("sonar.arff");
    let args = [
        "run", "--algo", "crwm", "--data", &sonar, "--seed", "7", "--runs", "3",
    ];
    let a = crwm(&args);
    let b = crwm(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("crwm-report 1\n"));
    let other = crwm(&[
        "run", "--algo", "crwm", "--data", &sonar, "--seed", "8", "--runs", "3",
    ]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn sequential_flag_does_not_change_output() {
    let args = [
        "run",
        "--preset",
        "crossover",
        "--length",
        "400",
        "--runs",
        "4",
    ];
    let par = crwm(&args);
    let mut seq_args = args.to_vec();
    seq_args.push("--sequential");
    assert_eq!(par.stdout, crwm(&seq_args).stdout);
}

#[test]
fn compare_reports_verdicts() {
    let o = crwm(&[
        "compare",
        "--algos",
        "rwm,crwm",
        "--preset",
        "crossover",
        "--length",
        "2000",
        "--runs",
        "10",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("[test crwm vs rwm]"), "{text}");
    assert!(["verdict = win", "verdict = draw", "verdict = lose"]
        .iter()
        .any(|v| text.contains(v)));
    let table = crwm(&[
        "compare",
        "--algos",
        "rwm,crwm",
        "--preset",
        "crossover",
        "--length",
        "500",
        "--runs",
        "5",
        "--format",
        "table",
    ]);
    assert!(stdout(&table).contains("verdict"));
}

#[test]
fn bounds_on_crossover_stream() {
    let o = crwm(&[
        "bounds",
        "--preset",
        "crossover",
        "--length",
        "10000",
        "--runs",
        "3",
        "--assert-bounds",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    assert!(text.contains("crossover_satisfied = true"), "{text}");
    assert!(text.contains("crwm_bound_below_rwm = true"), "{text}");
}

#[test]
fn synth_then_oracle_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stream.arff");
    let p = path.display().to_string();
    let o = crwm(&[
        "synth",
        "--errors",
        "0.1,0.3;0.3,0.1",
        "--length",
        "300",
        "--seed",
        "2",
        "--out",
        &p,
    ]);
    assert!(o.status.success());
    let run = crwm(&[
        "run", "--algo", "rwm", "--oracle", &p, "--runs", "2", "--format", "table",
    ]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(stdout(&run).contains("rwm on oracle: 300 instances"));
}

#[test]
fn out_dir_env_resolves_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_crwm"))
        .args([
            "run",
            "--preset",
            "crossover",
            "--length",
            "100",
            "--runs",
            "1",
            "--out",
            "nested/r.txt",
        ])
        .env("CRWM_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(dir.path().join("nested/r.txt")).unwrap();
    assert!(written.starts_with("crwm-report 1"));
}

#[test]
fn usage_errors_exit_two() {
    let sonar = data("sonar.arff");
    let cases: Vec<Vec<&str>> = vec![
        vec!["run", "--bogus"],
        vec!["frobnicate"],
        vec!["run", "--data", "/nonexistent/file.arff"],
        vec!["run", "--data", &sonar, "--beta", "1.5"],
        vec!["run", "--data", &sonar, "--algo", "wm"],
        vec!["run", "--data", &sonar, "--runs", "0"],
        vec!["run", "--data", &sonar, "--class-order", "M,M"],
        vec!["run", "--data", &sonar, "--format", "xml"],
        vec!["run", "--data", &sonar, "--preset", "crossover"],
        vec!["run"],
        vec!["run", "--errors", "0.1,0.2;0.3", "--length", "10"],
        vec!["run", "--algo", "bagging", "--preset", "crossover"],
        vec!["bounds", "--algo", "boosting", "--data", &sonar],
    ];
    for args in cases {
        let o = crwm(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
    assert_eq!(crwm(&["--help"]).status.code(), Some(0));
}

#[test]
fn malformed_data_is_a_positioned_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.arff");
    std::fs::write(
        &path,
        "@relation r\n@attribute a numeric\n@attribute c {x,y}\n@data\n1,x\n2,z\n",
    )
    .unwrap();
    let o = crwm(&["run", "--data", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 6"), "{err}");
}

#[test]
fn class_order_accepts_names() {
    let sonar = data("sonar.arff");
    let by_name = crwm(&[
        "run",
        "--data",
        &sonar,
        "--runs",
        "1",
        "--class-order",
        "M,R",
    ]);
    let by_index = crwm(&[
        "run",
        "--data",
        &sonar,
        "--runs",
        "1",
        "--class-order",
        "1,0",
    ]);
    assert!(by_name.status.success());
    assert_eq!(by_name.stdout, by_index.stdout);
    assert!(stdout(&by_name).contains("class_order = 1 0"));
}

#[test]
fn sweep_emits_grid() {
    let o = crwm(&[
        "sweep",
        "--preset",
        "crossover",
        "--length",
        "300",
        "--runs",
        "2",
        "--betas",
        "0.3,0.6",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("[beta 0.3]") && text.contains("[beta 0.6]"));
}

#[test]
fn csv_input_with_schema() {
    let dir = tempfile::tempdir().unwrap();
    let d = crwm::io::load_dataset(
        Path::new(&data("diabetes.arff")),
        &crwm::io::ClassSelector::Last,
        None,
    )
    .unwrap();
    let csv = dir.path().join("d.csv");
    std::fs::write(&csv, crwm::io::write_csv(&d, false)).unwrap();
    let from_csv = crwm(&[
        "run",
        "--data",
        csv.to_str().unwrap(),
        "--schema",
        &data("diabetes.arff"),
        "--runs",
        "1",
        "--experts",
        "5",
    ]);
    let from_arff = crwm(&[
        "run",
        "--data",
        &data("diabetes.arff"),
        "--runs",
        "1",
        "--experts",
        "5",
    ]);
    assert!(
        from_csv.status.success(),
        "{}",
        String::from_utf8_lossy(&from_csv.stderr)
    );
    assert_eq!(from_csv.stdout, from_arff.stdout);
}

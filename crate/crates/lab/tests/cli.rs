use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn precision(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_precision"))
        .args(args)
        .current_dir(dir)
        .env_remove("PRECISION_OUT_DIR")
        .output()
        .unwrap()
}

fn lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(String::from)
        .collect()
}

fn fixture(dir: &Path) {
    fs::write(dir.join("abc.csv"), "A\nA\nB\nC\n").unwrap();
}

#[test]
fn generate_writes_one_line_per_packet() {
    let dir = tempfile::tempdir().unwrap();
    let out = precision(
        dir.path(),
        &[
            "generate", "--alpha", "1.0", "--length", "1000000", "--out", "z.csv",
        ],
    );
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("z.csv")).unwrap();
    assert_eq!(text.lines().count(), 1_000_000);
    assert!(text.ends_with('\n') && !text.contains('\r'));
    assert!(String::from_utf8_lossy(&out.stdout).contains("1000000 packets"));
}

#[test]
fn generate_uniform_small_universe() {
    let dir = tempfile::tempdir().unwrap();
    let out = precision(
        dir.path(),
        &[
            "generate",
            "--alpha",
            "0",
            "--universe",
            "10",
            "--length",
            "100",
            "--out",
            "u.csv",
        ],
    );
    assert!(out.status.success());
    let mut toks = lines(&dir.path().join("u.csv"));
    assert_eq!(toks.len(), 100);
    toks.sort();
    toks.dedup();
    assert!(toks.len() <= 10);
}

#[test]
fn generate_rejects_negative_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let out = precision(dir.path(), &["generate", "--alpha", "-1", "--out", "x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn run_space_saving_hand_fixture() {
    // C=2 over A,A,B,C: estimates 1,2,1,2 against truths 1,2,1,1
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path());
    let out = precision(
        dir.path(),
        &[
            "run",
            "--trace",
            "abc.csv",
            "-a",
            "space-saving",
            "--counters",
            "2",
            "--seeds",
            "1",
            "-k",
            "2",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = lines(&dir.path().join("run.csv"));
    assert_eq!(
        rows[0],
        "algorithm,d,counters,prob_mode,delay,initial_value,seed,mse,recall_k,recirc_ratio,lookup_bits,k,trace"
    );
    let cells: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(cells[0], "space-saving");
    assert_eq!(cells[7], "0.25");
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        fs::read_to_string(dir.path().join("run.csv")).unwrap()
    );
    assert!(dir.path().join("run.config.json").exists());
}

#[test]
fn run_ten_seeds_gives_eleven_rows() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--out-dir",
        "o",
        "run",
        "-a",
        "precision(d=2,mode=pow2)",
        "--counters",
        "64",
        "--seeds",
        "10",
        "--length",
        "5000",
        "--universe",
        "500",
    ];
    let out = precision(dir.path(), &args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = lines(&dir.path().join("o/run.csv"));
    assert_eq!(rows.len(), 12);
    let seeds: Vec<&str> = rows[1..]
        .iter()
        .map(|r| r.split(',').nth(6).unwrap())
        .collect();
    assert_eq!(
        seeds[..10],
        ["1", "2", "3", "4", "5", "6", "7", "8", "9", "10"]
    );
    assert_eq!(seeds[10], "summary");
    assert!(rows[11].contains('±'));

    let first = fs::read(dir.path().join("o/run.csv")).unwrap();
    assert!(precision(dir.path(), &args).status.success());
    assert_eq!(first, fs::read(dir.path().join("o/run.csv")).unwrap());
}

#[test]
fn run_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = precision(dir.path(), &["run", "-a", "countmin", "--counters", "8"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    for name in [
        "space-saving",
        "rap",
        "rap-dway",
        "hashpipe",
        "hashparallel",
        "precision",
    ] {
        assert!(err.contains(name), "{err}");
    }
    let two = precision(
        dir.path(),
        &["run", "-a", "rap", "-a", "hashpipe", "--counters", "8"],
    );
    assert_eq!(two.status.code(), Some(2));
    let none = precision(dir.path(), &["run", "--counters", "8"]);
    assert_eq!(none.status.code(), Some(2));
    let flag = precision(dir.path(), &["run", "--bogus"]);
    assert_eq!(flag.status.code(), Some(2));
}

#[test]
fn missing_trace_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = precision(
        dir.path(),
        &["run", "--trace", "nope.csv", "-a", "rap", "--counters", "8"],
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path());
    fs::write(
        dir.path().join("c.json"),
        r#"{"trace": {"file": "abc.csv"}, "algorithms": ["hashpipe(d=1)"], "counters": [2], "k": 1, "seeds": 2}"#,
    )
    .unwrap();
    let out = precision(dir.path(), &["run", "--config", "c.json", "-k", "2"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = lines(&dir.path().join("run.csv"));
    assert_eq!(rows.len(), 4);
    assert!(rows[1].starts_with("hashpipe,1,2,-,0,0,1,"));
    assert_eq!(rows[1].split(',').nth(11), Some("2"));

    fs::write(dir.path().join("bad.json"), r#"{"trace": "#).unwrap();
    let bad = precision(dir.path(), &["run", "--config", "bad.json"]);
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path());
    let out = Command::new(env!("CARGO_BIN_EXE_precision"))
        .args([
            "run",
            "--trace",
            "abc.csv",
            "-a",
            "rap",
            "--counters",
            "2",
            "--seeds",
            "1",
        ])
        .current_dir(dir.path())
        .env("PRECISION_OUT_DIR", "envout")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("envout/run.csv").exists());
}

#[test]
fn compare_matrix_and_plot_files() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--out-dir",
        "m",
        "compare",
        "-a",
        "precision(d=2,mode=pow2)",
        "-a",
        "hashpipe",
        "--counters",
        "32,64,128",
        "--seeds",
        "2",
        "--length",
        "4000",
        "--universe",
        "400",
    ];
    let out = precision(dir.path(), &args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let m = dir.path().join("m");
    assert_eq!(lines(&m.join("compare.csv")).len(), 13);
    for metric in ["mse", "recall_k", "recirc_ratio"] {
        let plot = lines(&m.join(format!("plot_{metric}.csv")));
        assert_eq!(
            plot[0],
            "counters,\"precision(d=2,mode=pow2,delay=0,init=0,lookup_bits=16)\",hashpipe(d=2)"
        );
        let xs: Vec<&str> = plot[1..]
            .iter()
            .map(|r| r.split(',').next().unwrap())
            .collect();
        assert_eq!(xs, ["32", "64", "128"]);
    }
    let before = fs::read(m.join("plot_mse.csv")).unwrap();
    assert!(precision(dir.path(), &args).status.success());
    assert_eq!(before, fs::read(m.join("plot_mse.csv")).unwrap());
}

#[test]
fn compare_rejects_mismatched_memory() {
    let dir = tempfile::tempdir().unwrap();
    for algo in ["precision(d=3)", "precision(d=2,width=16)", "exact"] {
        let out = precision(
            dir.path(),
            &[
                "compare",
                "-a",
                "hashpipe",
                "-a",
                algo,
                "--counters",
                "32,64",
                "--length",
                "100",
            ],
        );
        assert_eq!(out.status.code(), Some(2), "{algo}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("mismatched memory grid"));
    }
}

#[test]
fn bounds_report_and_failure_hook() {
    let dir = tempfile::tempdir().unwrap();
    let small = [
        "bounds",
        "-n",
        "20000",
        "--counters",
        "64",
        "--seeds",
        "3",
        "--trials",
        "20000",
        "--growth-trials",
        "2000",
    ];
    let out = precision(dir.path(), &small);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let report = String::from_utf8_lossy(&out.stdout);
    assert_eq!(report.lines().count(), 8);
    assert!(report
        .lines()
        .all(|l| l.contains("mean=") && l.contains("bound=")));
    let csv = lines(&dir.path().join("bounds.csv"));
    assert_eq!(csv.len(), 9);
    assert!(csv[1..].iter().all(|r| r.ends_with(",true")));

    let mut broken = small.to_vec();
    broken.extend(["--bound-scale", "0.5"]);
    let out = precision(dir.path(), &broken);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

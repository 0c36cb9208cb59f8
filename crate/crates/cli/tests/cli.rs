use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_selberg-lab"));
    c.env_remove("SELBERG_LAB_OUT");
    c
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).arg("--out").arg(dir).output().unwrap()
}

fn without_timestamp(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.contains("timestamp"))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[test]
fn no_arguments_prints_usage_and_exits_1() {
    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stderr) + String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Usage"));
}

#[test]
fn unknown_flag_exits_1() {
    let out = bin().args(["params", "--nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn help_exits_0() {
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn params_table_at_1e8() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["params", "--T", "1e8", "--K", "1", "--Kprime", "3", "--alpha", "0.5"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let get = |name: &str| -> f64 {
        stdout
            .lines()
            .find_map(|l| {
                let mut it = l.split_whitespace();
                (it.next() == Some(name)).then(|| it.next().unwrap().parse().unwrap())
            })
            .unwrap()
    };
    let ll = 1e8f64.ln().ln();
    assert!((get("loglogT") - ll).abs() < 1e-14);
    assert!((get("W") - ll.ln().powi(2)).abs() < 1e-14);
    assert!((get("sigma0") - (0.5 + get("W") / 1e8f64.ln())).abs() < 1e-15);
    assert!((get("delta") - 1e8f64.ln().powf(-0.5)).abs() < 1e-15);
    assert!((get("s_norm") - (0.5 * ll).sqrt()).abs() < 1e-14);
    let csv = std::fs::read_to_string(dir.path().join("params.csv")).unwrap();
    assert!(csv.starts_with("# command = \"params\"\n"));
    assert!(csv.contains("\nname,value\n"));
}

#[test]
fn validation_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["params", "--T", "10"],
        vec!["params", "--alpha", "1.5"],
        vec!["params", "--Kprime", "2"],
        vec!["sample", "--format", "xml"],
        vec!["sample", "--workers", "0"],
        vec!["distance"],
    ] {
        let out = run(&args, dir.path());
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "T = 1e6\nalpha = 0.25\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = run(&["params", "--config", cfg, "--T", "1e7"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("params.csv")).unwrap();
    assert!(csv.contains("# T = 10000000.0\n"));
    assert!(csv.contains("# alpha = 0.25\n"));
    assert!(csv.contains("# Kprime = 3.0\n"));

    std::fs::write(dir.path().join("bad.toml"), "Tee = 3\n").unwrap();
    let bad = dir.path().join("bad.toml");
    let out = run(&["params", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["params", "--T", "1e5"])
        .env("SELBERG_LAB_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("params.csv").exists());
}

#[test]
fn rerun_from_header_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let again = dir.path().join("again");
    for (cmd, file, args) in [
        ("sample", "sample.csv", vec!["--T", "1e5", "--n", "300", "--seed", "4"]),
        ("tail", "tail.json", vec!["--T", "1e6", "--n", "500", "--format", "json", "--threshold", "0.5"]),
    ] {
        let mut a = vec![cmd];
        a.extend(args);
        assert_eq!(run(&a, dir.path()).status.code(), Some(0));
        let first = dir.path().join(file);
        let out = run(&[cmd, "--config", first.to_str().unwrap()], &again);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(without_timestamp(&first), without_timestamp(&again.join(file)));
    }
}

#[test]
fn sieve_cache_is_written_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("sieve.bin");
    let c = cache.to_str().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(run(&["tail", "--T", "1e6", "--n", "200", "--sieve-cache", c], &a).status.code(), Some(0));
    assert!(cache.exists());
    assert_eq!(run(&["tail", "--T", "1e6", "--n", "200", "--sieve-cache", c], &b).status.code(), Some(0));
    assert_eq!(without_timestamp(&a.join("tail.csv")), without_timestamp(&b.join("tail.csv")));
}

#[test]
fn distance_between_files_and_against_gaussian() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(run(&["sample", "--T", "1e5", "--n", "400", "--seed", "1"], &d.join("s1")).status.code(), Some(0));
    assert_eq!(run(&["sample", "--T", "1e5", "--n", "400", "--seed", "2"], &d.join("s2")).status.code(), Some(0));
    let s1 = d.join("s1/sample.csv");
    let s2 = d.join("s2/sample.csv");
    let out = run(
        &["distance", "--a", s1.to_str().unwrap(), "--b", s1.to_str().unwrap(), "--cols-a", "P1n,P1np", "--cols-b", "P1n,P1np"],
        d,
    );
    assert_eq!(out.status.code(), Some(0));
    let row = std::fs::read_to_string(d.join("distance.csv")).unwrap();
    assert!(row.lines().last().unwrap().starts_with("0.0000000000000000e0,"));

    let out = run(
        &["distance", "--a", s1.to_str().unwrap(), "--b", s2.to_str().unwrap(), "--cols-a", "V,Vp", "--cols-b", "V,Vp", "--format", "json"],
        d,
    );
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("distance.json")).unwrap()).unwrap();
    let est = v["rows"][0]["estimate"].as_f64().unwrap();
    assert!(est > 0.0 && est <= 2.0);
    assert_eq!(v["rows"][0]["family_size"], 64 * 129 * 2 + 256);

    let out = run(&["distance", "--a", s1.to_str().unwrap(), "--cols-a", "P1n,P1np", "--gaussian", "Ctilde", "--T", "1e5"], d);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["distance", "--a", s1.to_str().unwrap(), "--cols-a", "P1n,nope", "--gaussian", "C"], d);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn check_lemmas_prints_seven_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["check-lemmas", "--T", "1e4", "--n", "2000", "--seed", "7"], dir.path());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 7, "{stdout}");
    for (l, name) in lines.iter().zip([
        "covariance",
        "Pmoments",
        "largevaluesofP",
        "zetaMestimate",
        "logM-1-reP",
        "selbergintegral",
        "offaxis",
    ]) {
        assert!(l.starts_with(&format!("{name}: PASS")) || l.starts_with(&format!("{name}: FAIL")), "{l}");
    }
    let all_pass = lines.iter().all(|l| l.contains(": PASS"));
    assert_eq!(out.status.code(), Some(if all_pass { 0 } else { 2 }));
}

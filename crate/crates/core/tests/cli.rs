use std::fs;
use std::process::Command;

use onebit::harness::SWEEP_CSV_HEADER;

fn onebit(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_onebit")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn sweep_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("runs/a.csv");
    let csv_s = csv.to_str().unwrap();
    let args = ["sweep", "--n", "128", "--s", "4", "--m", "100,200,400", "--trials", "10", "--seed", "42", "--out", csv_s];
    let (code, _) = onebit(&args);
    assert_eq!(code, 0);
    let first = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(lines.len(), 31);
    assert_eq!(lines[0], SWEEP_CSV_HEADER);

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("runs/a.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 42);
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(manifest["seeds"].as_array().unwrap().len(), 30);

    // identical config reproduces the data file byte for byte
    assert_eq!(onebit(&args).0, 0);
    assert_eq!(fs::read_to_string(&csv).unwrap(), first);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(onebit(&["sweep", "--bogus"]).0, 2);
    assert_eq!(onebit(&["sweep", "--n", "4", "--s", "9"]).0, 2);
    assert_eq!(onebit(&["frobnicate"]).0, 2);
    assert_eq!(onebit(&["verify", "--check", "nonsense"]).0, 2);
    assert_eq!(onebit(&["--help"]).0, 0);
    assert_eq!(onebit(&["--version"]).0, 0);
}

#[test]
fn bernoulli_check_passes() {
    let (code, stdout) = onebit(&["verify", "--check", "bernoulli-counterexample"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("identical for 20/20 seeds"));
    assert!(stdout.trim_end().ends_with("PASS"));
}

#[test]
fn gen_then_recover_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(onebit(&["gen", "--n", "20", "--s", "2", "--m", "60", "--seed", "3", "--out", d]).0, 0);
    let p = |f: &str| dir.path().join(f).to_str().unwrap().to_owned();
    let out = p("rec.csv");
    let (code, from_files) = onebit(&[
        "recover", "--matrix", &p("matrix.txt"), "--signs", &p("signs.txt"), "--signal", &p("signal.txt"), "--out", &out,
    ]);
    assert_eq!(code, 0);
    assert!(from_files.contains("recovery error"));
    let (code, generated) = onebit(&["recover", "--n", "20", "--s", "2", "--m", "60", "--seed", "3"]);
    assert_eq!(code, 0);
    // the text formats round-trip exactly, so both paths solve the same program
    let err = |s: &str| s.lines().find(|l| l.starts_with("recovery error")).unwrap().to_owned();
    assert_eq!(err(&from_files), err(&generated));
    let rows = fs::read_to_string(&out).unwrap();
    assert_eq!(rows.lines().count(), 21);
    assert!(dir.path().join("rec.csv.manifest.json").exists());
}

#[test]
fn unreadable_input_is_a_failure() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("m.txt");
    fs::write(&bad, "1 2\nx 3\n").unwrap();
    let b = bad.to_str().unwrap();
    assert_eq!(onebit(&["recover", "--matrix", b, "--signs", b]).0, 1);
}

#[test]
fn tessellate_reports_refinement() {
    let (code, stdout) = onebit(&["tessellate", "--samples", "80", "--m", "10,20,40"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));
}

use std::io::Write;
use std::process::{Command, Output, Stdio};

use intermithash::report::{parse_bench_json, BENCH_CSV_HEADER};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_intermithash"));
    c.env_remove("INTERMITHASH_SEED");
    c
}

fn run_with_input(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn hash_from_stdin() {
    let o = run_with_input(&["hash", "md5"], b"");
    assert!(o.status.success());
    assert_eq!(stdout(&o), "d41d8cd98f00b204e9800998ecf8427e\n");
    let o = run_with_input(&["hash", "blake2s"], b"abc");
    assert_eq!(stdout(&o), "508c5e8c327c14e2e1a72ba34eeb452f37458b209ed63a294d999b4c86675982\n");
}

#[test]
fn hash_from_file_shows_padding_aliasing() {
    let dir = tempfile::tempdir().unwrap();
    let ten = dir.path().join("ten");
    std::fs::write(&ten, [0u8; 10]).unwrap();
    let a = bin().args(["hash", "dm-speck128"]).arg(&ten).output().unwrap();
    let b = run_with_input(&["hash", "dm-speck128"], &[0u8; 16]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(stdout(&a).trim().len(), 32);
}

#[test]
fn exit_codes() {
    let o = run_with_input(&["hash", "sha1"], b"");
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["quality", "--test", "nope"]).output().unwrap().status.code(), Some(2));
    let missing = bin().args(["hash", "md5", "/nonexistent/input"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent/input"));
    let unwritable = bin()
        .args(["bench", "--reps", "1", "--warmup", "0", "--class", "short", "--hash", "md5", "--out", "/nonexistent/x.json"])
        .output()
        .unwrap();
    assert_eq!(unwritable.status.code(), Some(1));
    let zero_reps = bin().args(["bench", "--reps", "0"]).output().unwrap();
    assert_eq!(zero_reps.status.code(), Some(2));
}

#[test]
fn bench_reports() {
    let o = bin()
        .args(["bench", "--reps", "3", "--warmup", "1", "--format", "csv"])
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(BENCH_CSV_HEADER));
    assert_eq!(lines.count(), 10);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bench.json");
    let o = bin()
        .args(["bench", "--reps", "3", "--warmup", "1", "--class", "long", "--hash", "md5", "--hash", "mp-speck128", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let r = parse_bench_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r.schema, 1);
    let counts: Vec<_> = r.results.iter().map(|x| (x.hash.as_str(), x.compressions)).collect();
    assert_eq!(counts, [("md5", 21), ("mp-speck128", 80)]);
}

#[test]
fn quality_json_lines_and_csv() {
    let o = bin()
        .args(["quality", "--hash", "md5", "--hash", "dm-speck128", "--test", "zeros", "--test", "permutation"])
        .output()
        .unwrap();
    assert!(o.status.success());
    let docs: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(docs.len(), 4);
    assert!(docs.iter().all(|d| d["schema"] == 1));
    let zeros_dm = docs.iter().find(|d| d["hash"] == "dm-speck128" && d["test"] == "zeros").unwrap();
    assert_eq!(zeros_dm["collisions"], 61440);
    assert_eq!(zeros_dm["sample_count"], 65536);

    let o = bin()
        .args(["quality", "--hash", "md5", "--test", "zeros", "--format", "csv"])
        .output()
        .unwrap();
    let text = stdout(&o);
    assert!(text.starts_with("hash,avalanche_bias_pct,cyclic_col,"));
    assert!(text.lines().nth(1).unwrap().starts_with("md5,N/A,"));
}

#[test]
fn simulate_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("dev.params");
    std::fs::write(&params, intermithash::energy::EnergyParams::shipped().to_file_string()).unwrap();
    let trace = dir.path().join("trace.csv");
    let hist = dir.path().join("hist.csv");
    let o = bin()
        .args(["simulate", "--trials", "5", "--policy", "iem", "--format", "csv", "--params"])
        .arg(&params)
        .arg("--trace")
        .arg(&trace)
        .arg("--histogram")
        .arg(&hist)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("distance_m,power_w,continuous,iem\n"));
    assert_eq!(text.lines().count(), 11);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(2) == Some("N/A")));
    assert!(std::fs::read_to_string(&trace).unwrap().starts_with("t_s,v_cap,state,cycles_done\n"));
    assert!(std::fs::read_to_string(&hist).unwrap().starts_with("bucket_low,bucket_high,count\n"));

    let o = bin().args(["simulate", "--trials", "2", "--task-cycles", "1000"]).output().unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["task"]["total_cycles"], 1000);
    assert_eq!(doc["points"].as_array().unwrap().len(), 10);

    std::fs::write(&params, "v_on = 2.4\n").unwrap();
    let bad = bin().args(["simulate", "--trials", "1", "--params"]).arg(&params).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn seed_comes_from_environment() {
    let args = ["quality", "--hash", "md5", "--test", "cyclic"];
    let a = bin().args(args).env("INTERMITHASH_SEED", "5").output().unwrap();
    let b = bin().args(args).arg("--seed").arg("5").output().unwrap();
    let c = bin().args(args).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

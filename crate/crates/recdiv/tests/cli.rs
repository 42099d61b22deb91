use std::process::{Command, Output};

use recdiv::report::read_metadata;

fn recdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_recdiv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> Vec<u8> {
    let out = recdiv(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

#[test]
fn exit_codes_and_error_records() {
    let out = recdiv(&["count-quotients", "--x", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "usage");
    assert_eq!(err["exit_code"], 2);

    let out = recdiv(&["count-quotients", "--problem", "/nonexistent/p.json", "--x", "10"]);
    assert_eq!(out.status.code(), Some(2));

    // degenerate exponential polynomial: 2^n - (-2)^n
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rec.json");
    std::fs::write(
        &path,
        r#"{"exppoly": [{"poly": [1], "root": 2}, {"poly": [-1], "root": -2}]}"#,
    )
    .unwrap();
    let out = recdiv(&["count-quotients", "--recurrence", path.to_str().unwrap(), "--x", "10"]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "domain");

    // inadmissible tuples are a result, not an error
    let out = recdiv(&["hl", "--tuple", "0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["admissible"], false);
    assert_eq!(v["result"]["witness"], 2);

    assert_eq!(recdiv(&["--help"]).status.code(), Some(0));
}

#[test]
fn replay_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["count-quotients", "--fib", "--x", "1e3,2e3"],
        &["count-quotients", "--lucas", "3,-2", "--x", "500", "--format", "csv"],
        &["kronecker", "--poly", "1,0,1", "--samples", "1e3,1e4"],
        &["sieve-count", "--gtilde", "1,0,1", "--y", "3", "--z", "sqrt", "--x", "1e4,1e5"],
        &["wirsing", "--function", "squarefree:2", "--x", "1e3,1e4", "--truncation", "1e4"],
        &["ffzeros", "--stress", "--trials", "40", "--seed", "7", "--format", "csv"],
        &["order-filter", "--roots", "2,3", "--x", "1e4"],
        &["split", "--hl-family", "0,2", "--x", "2e4", "--y", "5", "--z", "50"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let path = dir.path().join(format!("r{i}"));
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--out", path.to_str().unwrap(), "--threads", "2"]);
        assert!(recdiv(&full).status.success(), "{args:?}");
        let first = std::fs::read(&path).unwrap();
        let meta = read_metadata(&first).unwrap();
        assert_eq!(meta.command, args[0]);
        let replayed = stdout(&["replay", "--from", path.to_str().unwrap(), "--threads", "1"]);
        assert_eq!(first, replayed, "{args:?}");
    }
}

#[test]
fn csv_and_json_agree() {
    let json = stdout(&["count-quotients", "--fib", "--x", "100,1000", "--no-members"]);
    let csv = stdout(&["count-quotients", "--fib", "--x", "100,1000", "--format", "csv"]);
    let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let body: String = text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    for (row, j) in rows.iter().zip(v["result"]["rows"].as_array().unwrap()) {
        assert_eq!(row[0].parse::<u64>().unwrap(), j["x"].as_u64().unwrap());
        assert_eq!(row[2].parse::<u64>().unwrap(), j["count"].as_u64().unwrap());
        let ratio: f64 = row[4].parse().unwrap();
        assert_eq!(ratio, j["ratio"].as_f64().unwrap());
    }
    assert!(v["result"]["rows"][0]["members"].is_null());
}

#[test]
fn thread_count_does_not_change_output() {
    for args in [
        &["count-quotients", "--fib", "--x", "3e5", "--mode", "filter"][..],
        &["ffzeros", "--stress", "--trials", "60", "--seed", "3"][..],
        &["wirsing", "--x", "1e5,3e5"][..],
    ] {
        let mut one = args.to_vec();
        one.extend(["--threads", "1"]);
        let mut many = args.to_vec();
        many.extend(["--threads", "4"]);
        assert_eq!(stdout(&one), stdout(&many), "{args:?}");
    }
}

#[test]
fn saved_sieve_system_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("sys.json");
    let direct = stdout(&[
        "sieve-count", "--gtilde", "-1,0,1", "--roots", "2,3", "--y", "5", "--z", "300",
        "--x", "1e5", "--save-system", sys.to_str().unwrap(),
    ]);
    let loaded = stdout(&["sieve-count", "--system", sys.to_str().unwrap(), "--x", "1e5"]);
    let a: serde_json::Value = serde_json::from_slice(&direct).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&loaded).unwrap();
    assert_eq!(a["result"]["rows"], b["result"]["rows"]);
    let g = stdout(&["wirsing", "--function", &format!("omega_system:{}", sys.display()), "--x", "1e4"]);
    let g: serde_json::Value = serde_json::from_slice(&g).unwrap();
    assert!(g["result"]["rows"][0]["sum"].as_f64().unwrap() > 0.0);
}

//! End-to-end tests of the command-line surface: documented examples, the
//! json/csv content equivalence, method agreement, and exit codes.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wreath-stats"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn payload(args: &[&str]) -> Vec<Value> {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let envelope: Value = serde_json::from_slice(&out.stdout).expect("valid json");
    assert_eq!(envelope["format_version"], 1);
    envelope["payload"].as_array().expect("payload array").clone()
}

fn csv_rows(args: &[&str]) -> Vec<Vec<String>> {
    let out = run(args);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn classes_small_group() {
    let rows = payload(&["classes", "--n", "2", "--r", "2"]);
    assert_eq!(rows.len(), 5);
    let labels: Vec<&str> = rows.iter().map(|r| r["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["1,1;", "1;1", ";1,1", "2;", ";2"]);
    let sizes: Vec<&str> = rows
        .iter()
        .map(|r| r["class_size"].as_str().unwrap())
        .collect();
    assert_eq!(sizes, ["1", "2", "1", "2", "2"]);
    let total: u64 = sizes.iter().map(|s| s.parse::<u64>().unwrap()).sum();
    assert_eq!(total, 8);
}

#[test]
fn classes_min_cycle_filter() {
    let rows = payload(&["classes", "--n", "5", "--r", "2", "--min-cycle", "4"]);
    let labels: Vec<&str> = rows.iter().map(|r| r["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["5;", ";5"]);
}

#[test]
fn classes_trivial_group() {
    let rows = payload(&["classes", "--n", "0", "--r", "3"]);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["label"], ";;");
    assert_eq!(rows[0]["class_size"], "1");
    assert_eq!(rows[0]["min_cycle_length"], Value::Null);
}

#[test]
fn moment_examples() {
    let rows = payload(&["moment", "--stat", "des_b", "--class", "3;5", "--k", "1"]);
    assert_eq!(rows[0]["value"], "4");
    assert_eq!(rows[0]["method"], "closed_form");

    let rows = payload(&[
        "moment", "--stat", "neg", "--class", "5;", "--k", "1", "--method", "formula",
    ]);
    assert_eq!(rows[0]["value"], "-15/2");

    let rows = payload(&[
        "moment", "--stat", "des_b", "--class", ";1,1", "--k", "1", "--method", "brute",
    ]);
    assert_eq!(rows[0]["value"], "2");
}

/// `--method auto` agrees with `--method brute` wherever brute is feasible.
#[test]
fn moment_auto_matches_brute() {
    for n in 1..=5usize {
        let labels = payload(&["classes", "--n", &n.to_string(), "--r", "2"]);
        for row in &labels {
            let label = row["label"].as_str().unwrap();
            for stat in ["des_b", "inv", "neg", "inv_b"] {
                let auto = payload(&["moment", "--stat", stat, "--class", label]);
                let brute =
                    payload(&["moment", "--stat", stat, "--class", label, "--method", "brute"]);
                assert_eq!(
                    auto[0]["value"], brute[0]["value"],
                    "n={n} label={label} stat={stat}"
                );
            }
            let auto = payload(&["moment", "--stat", "des_b", "--class", label, "--k", "2"]);
            let brute = payload(&[
                "moment", "--stat", "des_b", "--class", label, "--k", "2", "--method", "brute",
            ]);
            assert_eq!(auto[0]["value"], brute[0]["value"], "k=2 label={label}");
        }
    }
}

#[test]
fn genfunc_examples() {
    let rows = payload(&["genfunc", "--n", "2"]);
    let coeffs: Vec<&str> = rows[0]["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(coeffs, ["0", "1", "6", "1"]);

    let rows = payload(&["genfunc", "--class", "2;"]);
    let coeffs: Vec<&str> = rows[0]["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(coeffs, ["0", "0", "2"]);
}

#[test]
fn descent_count_example() {
    let rows = payload(&["descent-count", "--class", "2;", "--d", "2"]);
    assert_eq!(rows[0]["count"], "2");
}

#[test]
fn dist_examples() {
    let rows = payload(&["dist", "--stat", "des_b", "--class", "2;"]);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["value"], "1");
    assert_eq!(rows[0]["count"], "2");

    let rows = payload(&["dist", "--stat", "des_b", "--group", "--n", "2"]);
    let counts: Vec<&str> = rows.iter().map(|r| r["count"].as_str().unwrap()).collect();
    assert_eq!(counts, ["1", "6", "1"]);
}

#[test]
fn clt_rows() {
    let rows = payload(&["clt", "--n-list", "10,20,40"]);
    let means: Vec<&str> = rows.iter().map(|r| r["mean"].as_str().unwrap()).collect();
    assert_eq!(means, ["5", "10", "20"]);
    let rows = payload(&["clt", "--class-list", "9; 3;5"]);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["mean"], "9/2");
}

#[test]
fn degree_command() {
    let rows = payload(&["degree", "--stat", "des_b", "--n", "2", "--m", "1"]);
    assert_eq!(rows[0]["in_span"], true);
    assert!(rows[0]["certificate"]["coefficients"].is_array());
    let rows = payload(&["degree", "--stat", "des_b", "--n", "3", "--m", "1"]);
    assert_eq!(rows[0]["in_span"], false);
    assert!(rows[0]["certificate"]["witness"].is_array());
}

#[test]
fn oie_command() {
    // Order-invariant size-1 family {(i, j, 1)}: counts negative letters,
    // mean n/2 on classes without fixed points.
    let dir = std::env::temp_dir().join("wreath_stats_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("neg_count.json");
    // Two triples and two signed-shorthand constraints.
    std::fs::write(
        &path,
        r#"{"n": 2, "r": 2, "pcps": [[[1,2,1]], [[2,1,1]], [[1,-1]], [[2,-2]]]}"#,
    )
    .unwrap();
    let rows = payload(&["oie", "--file", path.to_str().unwrap(), "--k", "1"]);
    let coeffs: Vec<&str> = rows[0]["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(coeffs, ["0", "1/2"]);
}

#[test]
fn json_and_csv_carry_identical_content() {
    let json_rows = payload(&["classes", "--n", "3", "--r", "2"]);
    let csv = csv_rows(&["classes", "--n", "3", "--r", "2", "--format", "csv"]);
    assert_eq!(json_rows.len(), csv.len());
    for (j, c) in json_rows.iter().zip(&csv) {
        assert_eq!(j["label"].as_str().unwrap(), c[0]);
        assert_eq!(j["centralizer_order"].as_str().unwrap(), c[1]);
        assert_eq!(j["class_size"].as_str().unwrap(), c[2]);
    }

    let json_rows = payload(&["moment", "--stat", "inv", "--class", "3;"]);
    let csv = csv_rows(&["moment", "--stat", "inv", "--class", "3;", "--format", "csv"]);
    assert_eq!(json_rows[0]["value"].as_str().unwrap(), csv[0][4]);

    // Polynomial CSV rows are (exponent, coefficient) with the same numbers.
    let json_rows = payload(&["genfunc", "--n", "3"]);
    let csv = csv_rows(&["genfunc", "--n", "3", "--format", "csv"]);
    let coeffs = json_rows[0]["coefficients"].as_array().unwrap();
    assert_eq!(coeffs.len(), csv.len());
    for (k, row) in csv.iter().enumerate() {
        assert_eq!(row[0], k.to_string());
        assert_eq!(coeffs[k].as_str().unwrap(), row[1]);
    }
}

#[test]
fn byte_identical_reruns() {
    let first = run(&["classes", "--n", "4", "--r", "2"]);
    let second = run(&["classes", "--n", "4", "--r", "2"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn exit_codes() {
    // 4: parse errors.
    let out = run(&["moment", "--stat", "des_b", "--class", "abc", "--k", "1"]);
    assert_eq!(out.status.code(), Some(4));
    let out = run(&["moment", "--stat", "nope", "--class", "3;", "--k", "1"]);
    assert_eq!(out.status.code(), Some(4));

    // 2: precondition violations, naming the violated condition.
    let out = run(&[
        "moment", "--stat", "des_b", "--class", "1,1,1;", "--k", "1", "--method", "formula",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("cycle of length"), "stderr: {stderr}");
    let out = run(&["descent-count", "--class", "2;", "--d", "9"]);
    assert_eq!(out.status.code(), Some(2));

    // 3: budget exceeded, via flag and via environment variable; the
    // environment variable wins over the flag.
    let out = run(&["dist", "--stat", "des_b", "--group", "--n", "12", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_wreath-stats"))
        .args(["moment", "--stat", "des_b", "--class", "4,4;", "--method", "brute"])
        .env("WREATH_STATS_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_wreath-stats"))
        .args([
            "moment", "--stat", "des_b", "--class", "2;", "--method", "brute", "--budget",
            "1000000",
        ])
        .env("WREATH_STATS_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn more_precondition_errors() {
    // Built-in statistics live on r = 2; a 3-colored label rejects them.
    let out = run(&["moment", "--stat", "inv", "--class", "3;;", "--method", "brute"]);
    assert_eq!(out.status.code(), Some(2));
    // Closed forms cover k = 1 only.
    let out = run(&["moment", "--stat", "inv", "--class", "3;", "--k", "2", "--method", "closed"]);
    assert_eq!(out.status.code(), Some(2));
    // The genfunc route is a des_b computation.
    let out = run(&["moment", "--stat", "inv", "--class", "3;", "--method", "genfunc"]);
    assert_eq!(out.status.code(), Some(2));
    // Degenerate descent distribution on a singleton class.
    let out = run(&["clt", "--class-list", "1,1;"]);
    assert_eq!(out.status.code(), Some(2));
    // Descent generating functions need bipartition labels.
    let out = run(&["genfunc", "--class", "3;;"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stat_file_round_trip() {
    // A custom decomposed statistic: 3·#{i : ω(i) = −i} + 1/2 on B_3.
    let dir = std::env::temp_dir().join("wreath_stats_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("odd_fixed.json");
    std::fs::write(
        &path,
        r#"{"n":3,"r":2,"constant":"1/2","terms":[
            {"coeff":"3","constraints":[[1,-1]]},
            {"coeff":"3","constraints":[[2,-2]]},
            {"coeff":"3","constraints":[[3,-3]]}]}"#,
    )
    .unwrap();
    // On the class of −identity, every index is an odd fixed point.
    let rows = payload(&[
        "moment",
        "--stat-file",
        path.to_str().unwrap(),
        "--class",
        ";1,1,1",
        "--method",
        "brute",
    ]);
    assert_eq!(rows[0]["value"], "19/2");
    // The mean of the size-1 part on a fixed-point-free class is the
    // class-independent formula value 3n/(2(n−1)) plus the constant.
    let rows = payload(&[
        "moment",
        "--stat-file",
        path.to_str().unwrap(),
        "--class",
        "3;",
        "--method",
        "formula",
    ]);
    let brute = payload(&[
        "moment",
        "--stat-file",
        path.to_str().unwrap(),
        "--class",
        "3;",
        "--method",
        "brute",
    ]);
    assert_eq!(rows[0]["value"], brute[0]["value"]);
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn utvpi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_utvpi")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

struct Case {
    name: &'static str,
    input: &'static str,
    args: &'static [&'static str],
    stdout: &'static str,
    code: i32,
}

const PARITY: &str = "x0 + x1 <= 1\nx0 - x1 <= 0\nx1 - x0 <= 0\n-x0 - x1 <= -1\n";
const CHAIN: &str = "x0 - x1 <= 1\nx1 - x2 <= 2\n";

const GOLDEN: &[Case] = &[
    Case {
        name: "close_sum",
        input: "# upper bound through the sum\nx0 + x1 <= 3\nx0 - x1 <= 0\n",
        args: &["close"],
        stdout: "SAT\nx0 <= 1\nx0 + x1 <= 3\nx0 - x1 <= 0\n",
        code: 0,
    },
    Case {
        name: "close_sum_rational",
        input: "x0 + x1 <= 3\nx0 - x1 <= 0\n",
        args: &["close", "--rational"],
        stdout: "SAT\nx0 <= 3/2\nx0 + x1 <= 3\nx0 - x1 <= 0\n",
        code: 0,
    },
    Case {
        name: "close_empty",
        input: "",
        args: &["close", "--vars", "2"],
        stdout: "SAT\n",
        code: 0,
    },
    Case {
        name: "close_parity",
        input: PARITY,
        args: &["close"],
        stdout: "UNSAT(Z)\n",
        code: 1,
    },
    Case {
        name: "close_parity_json",
        input: PARITY,
        args: &["close", "--format", "json"],
        stdout: "{\"constraints\":[],\"verdict\":\"UNSAT(Z)\"}\n",
        code: 1,
    },
    Case {
        name: "close_cycle",
        input: "x0 - x1 <= -1\nx1 - x0 <= 0\n",
        args: &["close"],
        stdout: "UNSAT(Q)\n",
        code: 1,
    },
    Case {
        name: "entail_yes",
        input: CHAIN,
        args: &["entail", "x0 - x2 <= 3"],
        stdout: "ENTAILED\n",
        code: 0,
    },
    Case {
        name: "entail_no",
        input: CHAIN,
        args: &["entail", "x0 - x2 <= 2"],
        stdout: "NOT ENTAILED\n",
        code: 1,
    },
    Case {
        name: "entail_unsat",
        input: PARITY,
        args: &["entail", "x5 <= -100"],
        stdout: "ENTAILED (unsat)\n",
        code: 0,
    },
    Case {
        name: "entail_json",
        input: CHAIN,
        args: &["entail", "--format", "json", "x0 - x2 <= 3"],
        stdout: "{\"unsat\":false,\"verdict\":\"ENTAILED\"}\n",
        code: 0,
    },
    Case {
        name: "model_fixed",
        input: "x0 <= 1\n-x0 <= -1\n",
        args: &["model"],
        stdout: "x0 = 1\n",
        code: 0,
    },
    Case {
        name: "model_unsat_q",
        input: "x0 <= 0\n-x0 <= -1\n",
        args: &["model"],
        stdout: "UNSAT(Q)\n",
        code: 1,
    },
    Case {
        name: "model_json",
        input: "x0 <= 1\n-x0 <= -1\n",
        args: &["model", "--format", "json"],
        stdout: "{\"model\":{\"x0\":1},\"verdict\":\"SAT\"}\n",
        code: 0,
    },
];

#[test]
fn golden_corpus() {
    let dir = TempDir::new().unwrap();
    for case in GOLDEN {
        let path = write(dir.path(), &format!("{}.txt", case.name), case.input);
        let (cmd, rest) = case.args.split_first().unwrap();
        let mut args = vec![*cmd, path.to_str().unwrap()];
        args.extend_from_slice(rest);
        let out = utvpi(&args);
        assert_eq!(String::from_utf8_lossy(&out.stdout), case.stdout, "{}", case.name);
        assert_eq!(out.status.code(), Some(case.code), "{}", case.name);
        assert!(out.stderr.is_empty(), "{}", case.name);
    }
}

#[test]
fn printed_model_satisfies_the_system() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "m.txt", "x0 - x1 <= -1\nx1 <= 0\n");
    let out = utvpi(&["model", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let values: Vec<i64> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| l.split(" = ").nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 2);
    assert!(values[0] - values[1] <= -1 && values[1] <= 0);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.txt", "x0 <= 1\n2x0 + x1 <= 3\n");
    let good = write(dir.path(), "good.txt", "x3 <= 1\n");
    let missing = dir.path().join("missing.txt");
    let cases: Vec<Vec<&str>> = vec![
        vec!["close", bad.to_str().unwrap()],
        vec!["model", bad.to_str().unwrap()],
        vec!["entail", bad.to_str().unwrap(), "x0 <= 1"],
        vec!["entail", good.to_str().unwrap(), "x0 <= 1/2"],
        vec!["close", missing.to_str().unwrap()],
        vec!["close", good.to_str().unwrap(), "--vars", "2"],
        vec!["close", good.to_str().unwrap(), "--format", "xml"],
    ];
    for args in cases {
        let out = utvpi(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    let out = utvpi(&["close", bad.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2, column 1"));
}

#[test]
fn close_output_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let text: String = (0..12)
        .map(|k| format!("x{} - x{} <= {}\n-x{} <= {}\n", k, (k * 5 + 3) % 12, k % 4, k, 7 - k as i64))
        .collect();
    let path = write(dir.path(), "big.txt", &text);
    let first = utvpi(&["close", path.to_str().unwrap()]);
    for _ in 0..3 {
        assert_eq!(utvpi(&["close", path.to_str().unwrap()]).stdout, first.stdout);
    }
    assert!(first.stdout.starts_with(b"SAT\n"));
}

#[test]
fn bench_prints_a_table() {
    let out = utvpi(&["bench", "--sizes", "1,4,8", "--reps", "3", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n\tconstraints\tmedian_ms");
    assert!(lines[1].starts_with("1\t2\t"));
    assert!(lines[3].starts_with("8\t128\t"));
    assert!(lines[4].starts_with("exponent\t"));

    let json = utvpi(&["bench", "--sizes", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["rows"][0]["n"], 1);
    assert!(v["exponent"].is_null());
}

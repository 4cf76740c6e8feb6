use std::path::Path;
use std::process::{Command, Output};

fn ordstat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ordstat")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut meta = Vec::new();
    let mut lines = text.lines().filter(|l| {
        if let Some(m) = l.strip_prefix("# ") {
            meta.push(m.to_string());
            false
        } else {
            true
        }
    });
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (meta, header, rows)
}

#[test]
fn sum_of_three_exponentials_at_two() {
    let o = ordstat(&["eval", "--theorem", "T1", "--dist", "exp:1", "--K", "3", "--at", "2.0"]);
    assert!(o.status.success());
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 2.0 * (-2.0f64).exp()).abs() < 1e-14, "{v}");
    assert!((v - 0.27067).abs() < 1e-5);
}

#[test]
fn point_outside_case_d_support_is_zero() {
    let o = ordstat(&["eval", "--theorem", "T5", "--case", "d", "--K", "4", "--Ks", "2", "--at", "1.0,0.5"]);
    assert!(o.status.success());
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert_eq!(v, 0.0);
}

#[test]
fn three_groups_exit_with_unsupported_shape() {
    let o = ordstat(&["eval", "--partition", "K=10;Ks=8;groups=[1-3][4-6][7-8]", "--at", "1,1,1"]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("T6"), "{err}");
}

#[test]
fn parse_errors_exit_with_two() {
    assert_eq!(ordstat(&["eval", "--theorem", "T1", "--K", "3", "--at", "1,2"]).status.code(), Some(2));
    assert_eq!(ordstat(&["eval", "--theorem", "T9", "--K", "3", "--at", "1"]).status.code(), Some(2));
    assert_eq!(ordstat(&["eval", "--theorem", "T1", "--K", "3", "--dist", "gamma:2", "--at", "1"]).status.code(), Some(2));
    assert_eq!(
        ordstat(&["eval", "--theorem", "T5", "--case", "a", "--K", "4", "--Ks", "3", "--m", "2", "--at", "1,1"]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = ordstat(&[
            "verify", "--seed", "42", "--suite", "kernels", "--suite", "identities", "--depth", "3", "--output",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (ja, jb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ja, jb);
    let report: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(report["schema"], "ordstat-verify/1");
    assert_eq!(report["passed"], true);
    assert_eq!(report["config"]["depth"], 3);
}

#[test]
fn verify_kernels_reports_to_stdout() {
    let o = ordstat(&["verify", "--suite", "kernels", "--depth", "3"]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["suites"].as_array().unwrap().len(), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("kernels"));
}

#[test]
fn tabulated_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t3.csv");
    let o = ordstat(&[
        "tabulate", "--theorem", "T3", "--K", "4", "--m", "2", "--grid", "0.5:3:6", "--grid", "0:2:5", "--output",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (meta, header, rows) = read_csv(&path);
    assert_eq!(header, ["x", "y", "value"]);
    assert_eq!(rows.len(), 30);
    assert!(meta.iter().any(|m| m.starts_with("command:")));
    assert!(meta.iter().any(|m| m.starts_with("version:")));
    for row in &rows {
        let p = ordstat(&["eval", "--theorem", "T3", "--K", "4", "--m", "2", "--at", &format!("{},{}", row[0], row[1])]);
        let v: f64 = stdout(&p).trim().parse().unwrap();
        assert_eq!(v.to_bits(), row[2].to_bits());
    }
}

#[test]
fn numeric_path_agrees_with_exact_path() {
    let args = ["eval", "--theorem", "T2", "--K", "4", "--m", "2", "--at", "0.6,1.8"];
    let exact: f64 = stdout(&ordstat(&[&args[..], &["--path", "exact"]].concat())).trim().parse().unwrap();
    let numeric: f64 = stdout(&ordstat(&[&args[..], &["--path", "numeric"]].concat())).trim().parse().unwrap();
    assert!(exact > 0.0);
    assert!(((exact - numeric) / exact).abs() < 1e-6, "{exact} vs {numeric}");
}

#[test]
fn sampling_is_seeded() {
    let run = |seed: &str| stdout(&ordstat(&["sample", "--theorem", "T5", "--K", "4", "--Ks", "2", "--m", "1", "--samples", "50", "--seed", seed]));
    assert_eq!(run("7"), run("7"));
    assert_ne!(run("7"), run("8"));
}

#[test]
fn histogram_accounts_for_every_draw() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.csv");
    let o = ordstat(&[
        "sample", "--theorem", "T1", "--K", "3", "--samples", "2000", "--bins", "0:6:12", "--output",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let (meta, header, rows) = read_csv(&path);
    assert_eq!(header, ["x", "value", "std_error"]);
    let outside: f64 = meta.iter().find_map(|m| m.strip_prefix("outside: ")).unwrap().parse().unwrap();
    let inside: f64 = rows.iter().map(|r| r[1] * 0.5 * 2000.0).sum();
    assert!((inside + outside - 2000.0).abs() < 1e-6);
}

#[test]
fn msgsc_simulation_column_tracks_analytic_cdf() {
    let o = ordstat(&["msgsc", "--L", "3", "--gamma-t", "1", "--at", "0.5,1.5,3", "--simulate", "200000", "--seed", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('x'))
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert!((r[1] - r[2]).abs() <= 4.0 * r[3].max(1e-4), "{r:?}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_ordstat"))
            .args(["sample", "--theorem", "T1", "--K", "3", "--samples", "40000", "--seed", "9", "--bins", "0:8:16"])
            .env("ORDSTAT_THREADS", threads)
            .output()
            .unwrap()
    };
    let (a, b) = (run("1"), run("3"));
    assert!(a.status.success() && b.status.success());
    let strip = |o: &Output| stdout(o).lines().filter(|l| !l.starts_with("# command")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&a), strip(&b));
}

use std::path::Path;
use std::process::Command;

use ahscatter_cli::engines::{FitReport, GzReport, NormalFormReport};
use ahscatter_cli::output::ModeRow;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn ahscatter(sub: &str, config: &str, out: &Path) -> i32 {
    let cfg = out.with_extension("json");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_ahscatter"))
        .args([sub, "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(out)
        .status()
        .unwrap()
        .code()
        .unwrap_or(-1)
}

/// Parses a report and checks that writing it back gives the same bytes.
fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(path: &Path) -> T {
    let text = std::fs::read_to_string(path).unwrap();
    let value: T = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&value).unwrap() + "\n";
    assert_eq!(again, text);
    assert_eq!(serde_json::from_str::<T>(&again).unwrap(), value);
    value
}

#[test]
fn even_metric_has_no_odd_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gz");
    let code = ahscatter("gz", r#"{"n": 2, "w": [1, 0, "-1/2", 0, "1/16"], "M": 7}"#, &out);
    assert_eq!(code, 0);
    let report: GzReport = round_trip(&out.join("gz.json"));
    assert!(report.odd_p_zero);
    assert_eq!(report.p.len(), 8);
    for j in (1..8).step_by(2) {
        assert_eq!(report.p[j], "0", "p_{j}");
    }
    let res = report.residues.unwrap();
    assert!(res.residues.iter().all(|r| r.op_coefficients.iter().all(|c| c == "0")));
}

#[test]
fn hypothesis_violation_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    for cfg in [r#"{"n": 3, "k": 1, "c": 1}"#, r#"{"n": 1, "k": 0, "c": 1}"#] {
        assert_eq!(ahscatter("accumulate", cfg, &dir.path().join("acc")), 2, "{cfg}");
    }
}

#[test]
fn invalid_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for (sub, cfg) in [
        ("modes", r#"{"tolerances": {"zero_tol": 0}}"#),
        ("gz", r#"{"n": 2, "w": ["2", 0, 1]}"#),
        ("modes", r#"{"c": 0.5}"#),
        ("modes", r#"{"n": 2, "lambdas": [[1.5, 0.0]]}"#),
        ("resonances", r#"{"n": 2}"#),
    ] {
        assert_eq!(ahscatter(sub, cfg, &dir.path().join("bad")), 2, "{sub} {cfg}");
    }
}

#[test]
fn modes_table_has_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("modes");
    let code = ahscatter("modes", r#"{"n": 2, "k": 0, "c": 1, "l_range": [0, 3], "lambdas": [[1, 2], [0.3, 0.4]]}"#, &out);
    assert_eq!(code, 0);
    let mut rd = csv::Reader::from_path(out.join("modes.csv")).unwrap();
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        &header[..12],
        ["l", "v_l", "re_lambda", "im_lambda", "re_A", "im_A", "re_B", "im_B", "re_S", "im_S", "wronskian_defect", "precision_used"]
    );
    let rows: Vec<ModeRow> = rd.deserialize().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows.iter().map(|r| r.l).collect::<Vec<_>>(), [0, 0, 1, 1, 2, 2, 3, 3]);
    for r in rows.iter().filter(|r| r.re_lambda == 1.0) {
        assert!(((r.re_s * r.re_s + r.im_s * r.im_s).sqrt() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn normalform_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nf");
    let cfg = r#"{"normalform": {"q_max": 4, "order": 6,
        "w": [{"q": 0, "re": 1}, {"m": 2, "q": 1, "re": 0.05, "im": 0.02}, {"m": 3, "q": 2, "re": 0.03}],
        "omega0": [{"q": 1, "re": 0.2}, {"q": 2, "re": 0.1, "im": -0.05}]}}"#;
    assert_eq!(ahscatter("normalform", cfg, &out), 0);
    let r: NormalFormReport = round_trip(&out.join("normalform.json"));
    assert_eq!(r.w_evenness, Some(1));
    assert!(r.residual < 1e-10);
    assert!(r.max_modulus[1] < 1e-12);
}

#[test]
fn accumulate_example_gives_slope_one_half() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("acc");
    let code = ahscatter("accumulate", r#"{"n": 2, "k": 0, "c": 1, "l_range": [5, 40]}"#, &out);
    assert_eq!(code, 0);
    let fit: FitReport = round_trip(&out.join("accumulate_fit.json"));
    assert!((fit.fit.slope.unwrap() + 0.5).abs() < 0.05);
    assert!(fit.fit.misses.is_empty());
    assert_eq!(fit.accumulation_point, 0.5);
    let rows = csv::Reader::from_path(out.join("accumulate.csv")).unwrap().records().count();
    assert_eq!(rows, 36);
}

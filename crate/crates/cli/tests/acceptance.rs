//! Runs `ahscatter verify` twice (one and eight workers), prints one line per
//! criterion and fails on any unexpected outcome.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, ExitCode};

use ahscatter_cli::verify::VerifyReport;

/// Checks that must fail. Passing one of them is an unexpected outcome too.
const KNOWN_FAILURES: [&str; 1] = ["5d"];

fn run_verify(out: &Path, jobs: usize) -> i32 {
    let status = Command::new(env!("CARGO_BIN_EXE_ahscatter"))
        .args(["verify", "--jobs", &jobs.to_string(), "--out"])
        .arg(out)
        .stdout(std::process::Stdio::null())
        .status()
        .expect("spawn ahscatter");
    status.code().unwrap_or(-1)
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .expect("output dir")
        .map(|e| e.unwrap().path())
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("csv" | "json")))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().expect("tempdir");
    let (one, eight) = (tmp.path().join("jobs1"), tmp.path().join("jobs8"));
    let code1 = run_verify(&one, 1);
    let code8 = run_verify(&eight, 8);

    let text = std::fs::read_to_string(one.join("verify.json")).expect("verify.json");
    let report: VerifyReport = serde_json::from_str(&text).expect("parse verify.json");
    let mut unexpected = Vec::new();
    for c in &report.criteria {
        let known = KNOWN_FAILURES.contains(&c.id.as_str());
        let tag = if c.passed { "PASS" } else { "FAIL" };
        let note = if known { " [expected failure, see decisions ledger]" } else { "" };
        println!("[{tag}] {} {}: {} ({}){note}", c.id, c.name, c.measured, c.threshold);
        if c.passed == known {
            unexpected.push(c.id.clone());
        }
    }
    for id in KNOWN_FAILURES {
        if !report.criteria.iter().any(|c| c.id == id) {
            unexpected.push(format!("{id} missing"));
        }
    }

    let expected_code = if report.failed > 0 { 4 } else { 0 };
    let (a, b) = (snapshot(&one), snapshot(&eight));
    let differing: Vec<&String> = a.keys().chain(b.keys()).filter(|k| a.get(*k) != b.get(*k)).collect();
    let same = code1 == expected_code && code8 == expected_code && !a.is_empty() && differing.is_empty();
    println!(
        "[{}] 8 determinism across --jobs 1 and --jobs 8: {} files, differing {:?}, exit codes {code1}/{code8} (bit-identical, exit {expected_code})",
        if same { "PASS" } else { "FAIL" },
        a.len(),
        differing
    );
    if !same {
        unexpected.push("8".into());
    }

    if unexpected.is_empty() {
        println!("acceptance: all criteria as expected ({} known failure)", KNOWN_FAILURES.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcomes {unexpected:?}");
        ExitCode::FAILURE
    }
}

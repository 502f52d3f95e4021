//! End-to-end CLI contract tests against the built binary.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn efpp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_efpp"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("efpp-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn unknown_subcommand_exits_one() {
    let out = efpp().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("Usage"), "usage text missing: {stderr}");
}

#[test]
fn invalid_alpha_exits_one() {
    let dir = temp_dir("badalpha");
    let out = efpp()
        .args(["mu", "--alpha", "0.9", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn gen_writes_pinned_dump_format() {
    let dir = temp_dir("gen");
    let out = efpp()
        .args(["gen", "--n", "12", "--seed", "5", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = fs::read_to_string(dir.join("points_n12_r0.txt")).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("# efpp-points d=2 seed="), "{header}");
    let first = lines.next().unwrap();
    assert_eq!(first.split_whitespace().count(), 2);
    for token in first.split_whitespace() {
        token.parse::<f64>().unwrap();
    }
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn geodesic_dump_header_total_matches_path() {
    let dir = temp_dir("geo");
    let out = efpp()
        .args([
            "geodesic", "--n", "16", "--seed", "5", "--alpha", "2", "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = fs::read_to_string(dir.join("geodesic_n16_r0.txt")).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    let total: f64 = header
        .split_whitespace()
        .find_map(|t| t.strip_prefix("total="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(header.contains("alpha=2"));
    let points: Vec<Vec<f64>> = lines
        .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
        .collect();
    assert!(points.len() >= 2);
    let recomputed: f64 = points
        .windows(2)
        .map(|w| {
            let d2: f64 = w[0].iter().zip(&w[1]).map(|(a, b)| (a - b) * (a - b)).sum();
            d2
        })
        .sum();
    assert!(
        (recomputed - total).abs() <= 1e-9 * total.max(1.0),
        "recomputed {recomputed} vs header {total}"
    );
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn repeat_runs_are_byte_identical() {
    let dir_a = temp_dir("det-a");
    let dir_b = temp_dir("det-b");
    for dir in [&dir_a, &dir_b] {
        let out = efpp()
            .args([
                "mu",
                "--n",
                "8,12,16",
                "--replicates",
                "4",
                "--seed",
                "11",
                "--out",
            ])
            .arg(dir)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let a = fs::read(dir_a.join("records.jsonl")).unwrap();
    let b = fs::read(dir_b.join("records.jsonl")).unwrap();
    assert_eq!(a, b);
    let sa = fs::read(dir_a.join("summary.csv")).unwrap();
    let sb = fs::read(dir_b.join("summary.csv")).unwrap();
    assert_eq!(sa, sb);
    fs::remove_dir_all(&dir_a).unwrap();
    fs::remove_dir_all(&dir_b).unwrap();
}

#[test]
fn out_dir_falls_back_to_env() {
    let dir = temp_dir("envout");
    let out = efpp()
        .args(["gen", "--n", "8", "--seed", "2"])
        .env("EFPP_OUT", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.join("points_n8_r0.txt").exists());
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn report_merges_and_refuses_mixed_hashes() {
    let dir = temp_dir("report");
    let run_a = dir.join("a");
    let run_b = dir.join("b");
    for (out_dir, seed) in [(&run_a, "21"), (&run_b, "22")] {
        let out = efpp()
            .args([
                "wander",
                "--n",
                "8,12",
                "--replicates",
                "3",
                "--seed",
                seed,
                "--out",
            ])
            .arg(out_dir)
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    // Same file twice: fine.
    let same = efpp()
        .args(["report", "--records"])
        .arg(format!(
            "{},{}",
            run_a.join("records.jsonl").display(),
            run_a.join("records.jsonl").display()
        ))
        .output()
        .unwrap();
    assert!(same.status.success());
    // Different seeds give different hashes: refused with exit 2.
    let mixed = efpp()
        .args(["report", "--records"])
        .arg(format!(
            "{},{}",
            run_a.join("records.jsonl").display(),
            run_b.join("records.jsonl").display()
        ))
        .output()
        .unwrap();
    assert_eq!(mixed.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&mixed.stderr);
    assert!(stderr.contains("mixed"), "{stderr}");
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn config_file_round_trips_through_cli() {
    let dir = temp_dir("config");
    let config_path = dir.join("c.json");
    fs::write(
        &config_path,
        r#"{"alpha": 2.0, "n_grid": [8, 12], "replicates": 3, "master_seed": 77}"#,
    )
    .unwrap();
    let out = efpp()
        .args(["mu", "--config"])
        .arg(&config_path)
        .args(["--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let written: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("config.json")).unwrap()).unwrap();
    assert_eq!(written["alpha"], 2.0);
    assert_eq!(written["master_seed"], 77);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn wander_produces_positive_median() {
    let dir = temp_dir("wander100");
    let out = efpp()
        .args([
            "wander",
            "--n",
            "64",
            "--replicates",
            "100",
            "--seed",
            "7",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(dir.join("records.jsonl")).unwrap();
    let records: Vec<serde_json::Value> = text
        .lines()
        .skip(1)
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.len(), 100);
    let mut wanderings: Vec<f64> = records
        .iter()
        .map(|r| r["wandering"].as_f64().unwrap())
        .collect();
    wanderings.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = wanderings[50];
    assert!(median > 0.0, "median wandering {median}");
    fs::remove_dir_all(&dir).unwrap();
}

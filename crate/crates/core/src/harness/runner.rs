use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;

use crate::estimators::{measure_one, ReplicateRecord};

use super::manifest::{now_ms, RunManifest};
use super::persist::{
    partial_path, read_records, read_records_tolerant, summary_from_records, write_records,
    write_summary, RECORDS_FILE, SUMMARY_FILE,
};
use super::{ExperimentConfig, HarnessError};

#[derive(Debug)]
pub struct RunOutcome {
    pub records: Vec<ReplicateRecord>,
    pub records_path: PathBuf,
    pub summary_path: PathBuf,
    pub manifest_path: PathBuf,
    pub config_hash: String,
    /// Replicates reused from a previous complete or interrupted run.
    pub resumed: usize,
    /// Replicates computed in this invocation.
    pub computed: usize,
}

/// Execute the configured grid, persist records.jsonl + summary.csv +
/// manifest.json under `out_dir`, and return the records.
///
/// Replicates are independent jobs keyed by (n, replicate_index) with
/// counter-based seeds, so output is byte-identical for any worker
/// count. Completed replicates are appended to a `.partial` log as they
/// finish; rerunning after an interruption recomputes only the missing
/// keys and produces the same final file as an uninterrupted run.
pub fn run_experiment(
    config: &ExperimentConfig,
    out_dir: &Path,
    workers: Option<usize>,
) -> Result<RunOutcome, HarnessError> {
    let spec = config.measure_spec()?;
    let hash = config.hash();
    let started = now_ms();
    fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let records_path = out_dir.join(RECORDS_FILE);
    let summary_path = out_dir.join(SUMMARY_FILE);
    let manifest_path = out_dir.join("manifest.json");
    let config_path = out_dir.join("config.json");
    fs::write(
        &config_path,
        serde_json::to_string_pretty(config).expect("config serializes"),
    )
    .map_err(|e| HarnessError::io(&config_path, e))?;

    // Recover any previous progress with a matching config hash.
    let mut done: Vec<ReplicateRecord> = Vec::new();
    let partial = partial_path(&records_path);
    if records_path.exists() {
        match read_records(&records_path) {
            Ok((old_hash, old_records)) if old_hash == hash => done = old_records,
            Ok((old_hash, _)) => {
                return Err(HarnessError::HashMismatch {
                    expected: hash,
                    found: old_hash,
                })
            }
            Err(_) => {}
        }
    }
    if done.is_empty() && partial.exists() {
        if let Ok((old_hash, old_records)) = read_records_tolerant(&partial) {
            if old_hash == hash {
                done = old_records;
            }
        }
    }

    let mut have: HashSet<(u64, u64)> = HashSet::new();
    done.retain(|r| have.insert(r.sort_key()));
    let todo: Vec<(u64, u64)> = config
        .n_grid
        .iter()
        .flat_map(|&n| (0..config.replicates).map(move |r| (n, r)))
        .filter(|key| !have.contains(key))
        .collect();
    let resumed = done.len();
    let computed = todo.len();

    // Append-log for crash recovery; completion order is irrelevant
    // because the final file is sorted.
    let log = fs::File::create(&partial).map_err(|e| HarnessError::io(&partial, e))?;
    let mut log_writer = std::io::BufWriter::new(log);
    writeln!(
        log_writer,
        "{}",
        serde_json::json!({
            "kind": "efpp-records",
            "config_hash": hash,
            "tool_version": env!("CARGO_PKG_VERSION"),
        })
    )
    .map_err(|e| HarnessError::io(&partial, e))?;
    for rec in &done {
        serde_json::to_writer(&mut log_writer, rec)
            .map_err(|e| HarnessError::io(&partial, e.into()))?;
        writeln!(log_writer).map_err(|e| HarnessError::io(&partial, e))?;
    }
    log_writer
        .flush()
        .map_err(|e| HarnessError::io(&partial, e))?;
    let log = Mutex::new(log_writer);

    let run_jobs = || -> Vec<ReplicateRecord> {
        todo.par_iter()
            .map(|&(n, r)| {
                let rec = measure_one(&spec, n, r, config.master_seed);
                if let Ok(mut w) = log.lock() {
                    if serde_json::to_writer(&mut *w, &rec).is_ok() {
                        let _ = writeln!(*w);
                        let _ = w.flush();
                    }
                }
                rec
            })
            .collect()
    };
    let fresh: Vec<ReplicateRecord> = match workers {
        Some(count) if count > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(count)
                .build()
                .map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
            pool.install(run_jobs)
        }
        _ => run_jobs(),
    };
    drop(log);

    let mut records = done;
    records.extend(fresh);
    records.sort_by_key(|r| r.sort_key());

    write_records(&records_path, &hash, &records)?;
    write_summary(&summary_path, &hash, &summary_from_records(&records))?;
    RunManifest::collect(&hash, &records, started, computed, resumed).write(&manifest_path)?;

    Ok(RunOutcome {
        records,
        records_path,
        summary_path,
        manifest_path,
        config_hash: hash,
        resumed,
        computed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ExperimentConfig {
        ExperimentConfig {
            n_grid: vec![8, 12],
            replicates: 3,
            master_seed: 7,
            ..Default::default()
        }
    }

    fn temp_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("efpp-runner-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        dir
    }

    #[test]
    fn run_produces_all_outputs() {
        let dir = temp_dir("basic");
        let out = run_experiment(&tiny_config(), &dir, Some(1)).unwrap();
        assert_eq!(out.records.len(), 6);
        assert_eq!(out.computed, 6);
        assert_eq!(out.resumed, 0);
        assert!(out.records_path.exists());
        assert!(out.summary_path.exists());
        assert!(out.manifest_path.exists());
        assert!(!partial_path(&out.records_path).exists());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn worker_count_does_not_change_bytes() {
        let dir1 = temp_dir("w1");
        let dir8 = temp_dir("w8");
        run_experiment(&tiny_config(), &dir1, Some(1)).unwrap();
        run_experiment(&tiny_config(), &dir8, Some(8)).unwrap();
        let a = fs::read(dir1.join(RECORDS_FILE)).unwrap();
        let b = fs::read(dir8.join(RECORDS_FILE)).unwrap();
        assert_eq!(a, b);
        let sa = fs::read(dir1.join(SUMMARY_FILE)).unwrap();
        let sb = fs::read(dir8.join(SUMMARY_FILE)).unwrap();
        assert_eq!(sa, sb);
        fs::remove_dir_all(&dir1).unwrap();
        fs::remove_dir_all(&dir8).unwrap();
    }

    #[test]
    fn resume_from_partial_matches_uninterrupted_run() {
        let config = tiny_config();
        // Reference uninterrupted run.
        let ref_dir = temp_dir("ref");
        run_experiment(&config, &ref_dir, Some(1)).unwrap();
        let want = fs::read(ref_dir.join(RECORDS_FILE)).unwrap();

        // Interrupted run: simulate a crash by keeping only a prefix of
        // the append log and deleting the final file.
        let dir = temp_dir("resume");
        run_experiment(&config, &dir, Some(1)).unwrap();
        let records_path = dir.join(RECORDS_FILE);
        let partial = partial_path(&records_path);
        let full = fs::read_to_string(&records_path).unwrap();
        let lines: Vec<&str> = full.lines().collect();
        // Header plus the first three records, one of them truncated.
        let mut crashed = lines[..3].join("\n");
        crashed.push('\n');
        crashed.push_str(&lines[3][..lines[3].len() / 2]);
        fs::write(&partial, crashed).unwrap();
        fs::remove_file(&records_path).unwrap();

        let out = run_experiment(&config, &dir, Some(2)).unwrap();
        assert_eq!(out.resumed, 2);
        assert_eq!(out.computed, 4);
        let got = fs::read(&records_path).unwrap();
        assert_eq!(got, want);
        fs::remove_dir_all(&ref_dir).unwrap();
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn completed_run_is_reused_without_recompute() {
        let dir = temp_dir("reuse");
        let config = tiny_config();
        run_experiment(&config, &dir, Some(1)).unwrap();
        let out = run_experiment(&config, &dir, Some(1)).unwrap();
        assert_eq!(out.computed, 0);
        assert_eq!(out.resumed, 6);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn hash_mismatch_refuses_to_overwrite() {
        let dir = temp_dir("mismatch");
        run_experiment(&tiny_config(), &dir, Some(1)).unwrap();
        let mut other = tiny_config();
        other.master_seed = 8;
        let err = run_experiment(&other, &dir, Some(1)).unwrap_err();
        assert!(matches!(err, HarnessError::HashMismatch { .. }));
        fs::remove_dir_all(&dir).unwrap();
    }
}

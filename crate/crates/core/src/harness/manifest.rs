use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::estimators::ReplicateRecord;

use super::HarnessError;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PerScaleCounts {
    pub n: u64,
    pub completed: usize,
    pub failed: usize,
    pub touched_boundary: usize,
    pub f_n_violated: usize,
}

/// Run metadata written next to the records; timestamps are wall-clock
/// and so excluded from any byte-identity guarantees.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub config_hash: String,
    pub tool_version: String,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub total_records: usize,
    pub recomputed: usize,
    pub resumed: usize,
    pub per_n: Vec<PerScaleCounts>,
}

impl RunManifest {
    pub fn collect(
        config_hash: &str,
        records: &[ReplicateRecord],
        started_unix_ms: u128,
        recomputed: usize,
        resumed: usize,
    ) -> Self {
        let mut ns: Vec<u64> = records.iter().map(|r| r.n).collect();
        ns.sort_unstable();
        ns.dedup();
        let per_n = ns
            .into_iter()
            .map(|n| {
                let subset = records.iter().filter(|r| r.n == n);
                let mut counts = PerScaleCounts {
                    n,
                    completed: 0,
                    failed: 0,
                    touched_boundary: 0,
                    f_n_violated: 0,
                };
                for r in subset {
                    counts.completed += 1;
                    if r.flags.failed {
                        counts.failed += 1;
                    }
                    if r.flags.touched_boundary {
                        counts.touched_boundary += 1;
                    }
                    if r.flags.f_n_violated {
                        counts.f_n_violated += 1;
                    }
                }
                counts
            })
            .collect();
        RunManifest {
            config_hash: config_hash.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix_ms,
            finished_unix_ms: now_ms(),
            total_records: records.len(),
            recomputed,
            resumed,
            per_n,
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), HarnessError> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
    }
}

pub fn now_ms() -> u128 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

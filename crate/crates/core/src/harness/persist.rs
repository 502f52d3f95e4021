use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::estimators::ReplicateRecord;
use crate::stats::{mean_var, quantile};

use super::HarnessError;

pub const RECORDS_FILE: &str = "records.jsonl";
pub const SUMMARY_FILE: &str = "summary.csv";

/// First line of every records file; carries provenance.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
struct RecordsHeader {
    kind: String,
    config_hash: String,
    tool_version: String,
}

impl RecordsHeader {
    fn new(config_hash: &str) -> Self {
        RecordsHeader {
            kind: "efpp-records".into(),
            config_hash: config_hash.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

/// Write the final records file: a header line followed by one record
/// per line, sorted by (n, replicate_index). The write goes through a
/// temporary `.partial` name and is renamed into place only when
/// complete, so an interrupted write never masquerades as a finished
/// file.
pub fn write_records(
    path: &Path,
    config_hash: &str,
    records: &[ReplicateRecord],
) -> Result<(), HarnessError> {
    debug_assert!(records
        .windows(2)
        .all(|w| w[0].sort_key() <= w[1].sort_key()));
    let tmp: PathBuf = partial_path(path);
    {
        let file = fs::File::create(&tmp).map_err(|e| HarnessError::io(&tmp, e))?;
        let mut w = BufWriter::new(file);
        let header = RecordsHeader::new(config_hash);
        serde_json::to_writer(&mut w, &header).map_err(|e| HarnessError::io(&tmp, e.into()))?;
        writeln!(w).map_err(|e| HarnessError::io(&tmp, e))?;
        for rec in records {
            serde_json::to_writer(&mut w, rec).map_err(|e| HarnessError::io(&tmp, e.into()))?;
            writeln!(w).map_err(|e| HarnessError::io(&tmp, e))?;
        }
        w.flush().map_err(|e| HarnessError::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| HarnessError::io(path, e))?;
    Ok(())
}

pub fn partial_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_os_string();
    os.push(".partial");
    PathBuf::from(os)
}

/// Strict read: malformed lines are errors.
pub fn read_records(path: &Path) -> Result<(String, Vec<ReplicateRecord>), HarnessError> {
    read_records_inner(path, false)
}

/// Tolerant read for crash recovery: a truncated final line is dropped.
pub fn read_records_tolerant(path: &Path) -> Result<(String, Vec<ReplicateRecord>), HarnessError> {
    read_records_inner(path, true)
}

fn read_records_inner(
    path: &Path,
    tolerate_tail: bool,
) -> Result<(String, Vec<ReplicateRecord>), HarnessError> {
    let file = fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();
    let header_line = match lines.next() {
        Some((_, Ok(line))) => line,
        Some((_, Err(e))) => return Err(HarnessError::io(path, e)),
        None => {
            return Err(HarnessError::MalformedRecords {
                path: path.into(),
                message: "empty file".into(),
            })
        }
    };
    let header: RecordsHeader =
        serde_json::from_str(&header_line).map_err(|e| HarnessError::MalformedRecords {
            path: path.into(),
            message: format!("bad header: {e}"),
        })?;
    if header.kind != "efpp-records" {
        return Err(HarnessError::MalformedRecords {
            path: path.into(),
            message: format!("unexpected kind {:?}", header.kind),
        });
    }
    let mut records = Vec::new();
    let mut pending_error: Option<(usize, String)> = None;
    for (idx, line) in lines {
        let line = line.map_err(|e| HarnessError::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        // A parse failure is only forgivable on the very last line.
        if let Some((at, msg)) = pending_error.take() {
            return Err(HarnessError::MalformedRecords {
                path: path.into(),
                message: format!("line {}: {msg}", at + 1),
            });
        }
        match serde_json::from_str::<ReplicateRecord>(&line) {
            Ok(rec) => records.push(rec),
            Err(e) => pending_error = Some((idx, e.to_string())),
        }
    }
    if let Some((at, msg)) = pending_error {
        if !tolerate_tail {
            return Err(HarnessError::MalformedRecords {
                path: path.into(),
                message: format!("line {}: {msg}", at + 1),
            });
        }
    }
    Ok((header.config_hash, records))
}

/// One row of the summary CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub n: u64,
    pub mean_t: f64,
    pub se_t: f64,
    pub var_t: f64,
    pub median_wander: f64,
    pub q90_wander: f64,
    pub replicates: usize,
}

/// Aggregate per-n summaries from records, using only unflagged
/// observations (consistent with the curve and wandering estimators).
pub fn summary_from_records(records: &[ReplicateRecord]) -> Vec<SummaryRow> {
    let mut ns: Vec<u64> = records.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut rows = Vec::with_capacity(ns.len());
    for n in ns {
        let usable: Vec<&ReplicateRecord> = records
            .iter()
            .filter(|r| r.n == n && r.unbiased())
            .collect();
        if usable.is_empty() {
            continue;
        }
        let ts: Vec<f64> = usable.iter().map(|r| r.t_n.unwrap()).collect();
        let ws: Vec<f64> = usable.iter().filter_map(|r| r.wandering).collect();
        let (mean_t, var_t) = mean_var(&ts);
        let se_t = (var_t / ts.len() as f64).sqrt();
        let (median_wander, q90_wander) = if ws.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            (quantile(&ws, 0.5), quantile(&ws, 0.9))
        };
        rows.push(SummaryRow {
            n,
            mean_t,
            se_t,
            var_t,
            median_wander,
            q90_wander,
            replicates: ts.len(),
        });
    }
    rows
}

/// CSV with a provenance comment, a fixed header, and shortest
/// round-trip decimal floats.
pub fn write_summary(
    path: &Path,
    config_hash: &str,
    rows: &[SummaryRow],
) -> Result<(), HarnessError> {
    let file = fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut w = BufWriter::new(file);
    (|| -> std::io::Result<()> {
        writeln!(w, "# config={config_hash}")?;
        writeln!(w, "n,mean_t,se_t,var_t,median_wander,q90_wander,replicates")?;
        for r in rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.n, r.mean_t, r.se_t, r.var_t, r.median_wander, r.q90_wander, r.replicates
            )?;
        }
        w.flush()
    })()
    .map_err(|e| HarnessError::io(path, e))?;
    Ok(())
}

pub fn read_summary(path: &Path) -> Result<(String, Vec<SummaryRow>), HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let mut hash = String::new();
    let mut rows = Vec::new();
    let malformed = |message: &str| HarnessError::MalformedRecords {
        path: path.into(),
        message: message.into(),
    };
    for (i, line) in text.lines().enumerate() {
        if let Some(rest) = line.strip_prefix("# config=") {
            hash = rest.trim().to_string();
            continue;
        }
        if i <= 1 && line.starts_with("n,") {
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(malformed(&format!("line {}: wrong arity", i + 1)));
        }
        let parse_f = |s: &str| s.parse::<f64>().map_err(|e| malformed(&e.to_string()));
        rows.push(SummaryRow {
            n: fields[0].parse().map_err(|_| malformed("bad n"))?,
            mean_t: parse_f(fields[1])?,
            se_t: parse_f(fields[2])?,
            var_t: parse_f(fields[3])?,
            median_wander: parse_f(fields[4])?,
            q90_wander: parse_f(fields[5])?,
            replicates: fields[6].parse().map_err(|_| malformed("bad count"))?,
        });
    }
    Ok((hash, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::RecordFlags;

    fn record(n: u64, idx: u64, t: f64, w: f64) -> ReplicateRecord {
        ReplicateRecord {
            n,
            replicate_index: idx,
            seed: idx * 7 + 1,
            t_n: Some(t),
            wandering: Some(w),
            slab: vec![(n as f64 / 2.0, Some(w / 2.0))],
            flags: RecordFlags::default(),
        }
    }

    #[test]
    fn records_round_trip_through_file() {
        let dir = std::env::temp_dir().join(format!("efpp-test-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join(RECORDS_FILE);
        let records = vec![record(16, 0, 10.0, 1.5), record(16, 1, 11.0, 2.5)];
        write_records(&path, "deadbeefdeadbeef", &records).unwrap();
        let (hash, back) = read_records(&path).unwrap();
        assert_eq!(hash, "deadbeefdeadbeef");
        assert_eq!(back, records);
        assert!(!partial_path(&path).exists());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn tolerant_read_drops_truncated_tail() {
        let dir = std::env::temp_dir().join(format!("efpp-test-tail-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("partial.jsonl");
        let records = vec![record(8, 0, 5.0, 0.5), record(8, 1, 6.0, 0.7)];
        write_records(&path, "cafe", &records).unwrap();
        let mut text = fs::read_to_string(&path).unwrap();
        text.push_str("{\"n\":8,\"replicate_index\":2,\"seed\":9,\"t_n\":5.1,");
        fs::write(&path, text).unwrap();
        assert!(read_records(&path).is_err());
        let (_, back) = read_records_tolerant(&path).unwrap();
        assert_eq!(back, records);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn summary_matches_hand_computation() {
        let records = vec![
            record(16, 0, 10.0, 1.0),
            record(16, 1, 14.0, 3.0),
            record(32, 0, 30.0, 2.0),
            record(32, 1, 34.0, 4.0),
        ];
        let rows = summary_from_records(&records);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].n, 16);
        assert_eq!(rows[0].mean_t, 12.0);
        assert_eq!(rows[0].var_t, 8.0);
        assert_eq!(rows[0].median_wander, 2.0);
        assert_eq!(rows[0].replicates, 2);
    }

    #[test]
    fn summary_csv_round_trip() {
        let dir = std::env::temp_dir().join(format!("efpp-test-csv-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join(SUMMARY_FILE);
        let rows = summary_from_records(&[record(16, 0, 10.0, 1.0), record(16, 1, 14.0, 3.0)]);
        write_summary(&path, "beef", &rows).unwrap();
        let (hash, back) = read_summary(&path).unwrap();
        assert_eq!(hash, "beef");
        assert_eq!(back, rows);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(
            "# config=beef\nn,mean_t,se_t,var_t,median_wander,q90_wander,replicates\n"
        ));
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn empty_records_give_header_only_outputs() {
        let dir = std::env::temp_dir().join(format!("efpp-test-empty-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let rec_path = dir.join(RECORDS_FILE);
        write_records(&rec_path, "00", &[]).unwrap();
        let (_, back) = read_records(&rec_path).unwrap();
        assert!(back.is_empty());
        let sum_path = dir.join(SUMMARY_FILE);
        write_summary(&sum_path, "00", &[]).unwrap();
        let text = fs::read_to_string(&sum_path).unwrap();
        assert_eq!(text.lines().count(), 2);
        fs::remove_dir_all(&dir).unwrap();
    }
}

use std::fmt::Write as _;
use std::path::Path;

use crate::estimators::{
    curve_from_records, estimate_mu_both, wandering_slope, wandering_stats, ReplicateRecord,
    ScaleFunction,
};
use crate::geometry::{iterated_log, ModelParams};

use super::persist::read_records;
use super::HarnessError;

/// Load several record files and refuse mixed config hashes.
pub fn load_records_checked(
    paths: &[impl AsRef<Path>],
) -> Result<(String, Vec<ReplicateRecord>), HarnessError> {
    let mut hash: Option<String> = None;
    let mut all = Vec::new();
    for path in paths {
        let (h, records) = read_records(path.as_ref())?;
        match &hash {
            None => hash = Some(h),
            Some(prev) if *prev != h => {
                return Err(HarnessError::MixedHashes(prev.clone(), h));
            }
            _ => {}
        }
        all.extend(records);
    }
    all.sort_by_key(|r| r.sort_key());
    all.dedup_by_key(|r| r.sort_key());
    Ok((hash.unwrap_or_default(), all))
}

/// Human-readable report over a set of records: the mean curve, both
/// time-constant estimates, the nonrandom-gap envelopes at iterate
/// levels 1 and 2, wandering quantiles and slope, and slab/flag counts.
pub fn render_report(
    records: &[ReplicateRecord],
    psi: &ScaleFunction,
    params: &ModelParams,
    config_hash: &str,
) -> Result<String, HarnessError> {
    let mut out = String::new();
    let curve = curve_from_records(records)?;
    writeln!(out, "records: {} (config {})", records.len(), config_hash).unwrap();
    writeln!(out, "\nmean curve").unwrap();
    writeln!(
        out,
        "{:>8} {:>12} {:>10} {:>12} {:>6} {:>6}",
        "n", "mean_t", "se_t", "var_t", "used", "excl"
    )
    .unwrap();
    for p in &curve.points {
        writeln!(
            out,
            "{:>8} {:>12.4} {:>10.4} {:>12.4} {:>6} {:>6}",
            p.n, p.mean, p.se, p.var, p.replicates, p.excluded
        )
        .unwrap();
    }

    if curve.points.len() >= 3 {
        match estimate_mu_both(&curve, psi, params) {
            Ok(pair) => {
                writeln!(out, "\ntime constant").unwrap();
                writeln!(
                    out,
                    "  envelope-fit: mu = {:.6} +- {:.6} (envelope coeff {:.4})",
                    pair.envelope.mu_hat, pair.envelope.mu_se, pair.envelope.envelope_coeff
                )
                .unwrap();
                writeln!(
                    out,
                    "  doubling:     mu = {:.6} +- {:.6} (envelope coeff {:.4})",
                    pair.doubling.mu_hat, pair.doubling.mu_se, pair.doubling.envelope_coeff
                )
                .unwrap();
                if pair.disagree_beyond_2se {
                    writeln!(out, "  warning: methods disagree beyond 2 joint SE").unwrap();
                }
                // Nonrandom gap against both iterate-level envelopes. At
                // desk scale the two are numerically close; both are
                // reported, neither is asserted.
                writeln!(out, "\nnonrandom gap (mean - mu_fit * n)").unwrap();
                writeln!(
                    out,
                    "{:>8} {:>12} {:>14} {:>14}",
                    "n", "gap", "gap/env(k=1)", "gap/env(k=2)"
                )
                .unwrap();
                for p in &curve.points {
                    let n = p.n as f64;
                    let gap = p.mean - pair.envelope.mu_hat * n;
                    let env = |k: u32| -> Option<f64> {
                        let it = iterated_log(k, n).ok()?;
                        if it <= 0.0 {
                            return None;
                        }
                        Some(psi.eval(n) * it.powf(1.0 / params.kappa1))
                    };
                    let r1 = env(1).map(|e| gap / e);
                    let r2 = env(2).map(|e| gap / e);
                    writeln!(
                        out,
                        "{:>8} {:>12.4} {:>14} {:>14}",
                        p.n,
                        gap,
                        r1.map_or("-".into(), |v| format!("{v:.4}")),
                        r2.map_or("-".into(), |v| format!("{v:.4}")),
                    )
                    .unwrap();
                }
            }
            Err(e) => writeln!(out, "\ntime constant unavailable: {e}").unwrap(),
        }
    }

    writeln!(out, "\ngeodesic wandering").unwrap();
    writeln!(
        out,
        "{:>8} {:>10} {:>10} {:>10} {:>6} {:>10} {:>8}",
        "n", "median", "q90", "q99", "used", "boundary", "failed"
    )
    .unwrap();
    let mut medians = Vec::new();
    let mut ns: Vec<u64> = records.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    for n in ns {
        if let Ok(s) = wandering_stats(records, n) {
            writeln!(
                out,
                "{:>8} {:>10.4} {:>10.4} {:>10.4} {:>6} {:>10} {:>8}",
                s.n, s.median, s.q90, s.q99, s.used, s.excluded_boundary, s.excluded_failed
            )
            .unwrap();
            medians.push((n, s.median));
        }
    }
    if medians.len() >= 2 {
        if let Ok(slope) = wandering_slope(&medians) {
            writeln!(out, "  log-log slope of median wandering: {slope:.4}").unwrap();
        }
    }

    // Slab bookkeeping: how often the geodesic actually crossed each slab.
    let mut slab_defined = 0usize;
    let mut slab_missed = 0usize;
    let mut slab_le_wander = 0usize;
    let mut slab_total_cmp = 0usize;
    for r in records.iter().filter(|r| r.unbiased()) {
        for (_, v) in &r.slab {
            match v {
                Some(dev) => {
                    slab_defined += 1;
                    if let Some(w) = r.wandering {
                        slab_total_cmp += 1;
                        if *dev <= w + 1e-12 {
                            slab_le_wander += 1;
                        }
                    }
                }
                None => slab_missed += 1,
            }
        }
    }
    writeln!(out, "\nslab deviations").unwrap();
    writeln!(
        out,
        "  defined: {slab_defined}, missed: {slab_missed}, <= wandering: {slab_le_wander}/{slab_total_cmp}"
    )
    .unwrap();
    Ok(out)
}

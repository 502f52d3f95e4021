use crate::stats::mean_var;

use super::measure::{run_grid, MeasureSpec};
use super::record::ReplicateRecord;
use super::EstimatorError;

/// Mean passage time at one scale.
#[derive(Clone, Copy, Debug)]
pub struct CurvePoint {
    pub n: u64,
    pub mean: f64,
    pub se: f64,
    pub var: f64,
    pub replicates: usize,
    pub excluded: usize,
}

/// The empirical mean curve n -> (mean T_n, standard error), strictly
/// increasing in n.
#[derive(Clone, Debug)]
pub struct EmpiricalMeanCurve {
    pub points: Vec<CurvePoint>,
}

impl EmpiricalMeanCurve {
    pub fn point(&self, n: u64) -> Option<&CurvePoint> {
        self.points.iter().find(|p| p.n == n)
    }
}

/// Aggregate records into the mean curve. Failed and boundary-flagged
/// records are excluded (and counted); every scale must keep at least two
/// usable replicates for a standard error.
pub fn curve_from_records(
    records: &[ReplicateRecord],
) -> Result<EmpiricalMeanCurve, EstimatorError> {
    let mut ns: Vec<u64> = records.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let mut points = Vec::with_capacity(ns.len());
    for n in ns {
        let values: Vec<f64> = records
            .iter()
            .filter(|r| r.n == n && r.unbiased())
            .map(|r| r.t_n.expect("unbiased records carry t_n"))
            .collect();
        let excluded = records.iter().filter(|r| r.n == n).count() - values.len();
        if values.len() < 2 {
            return Err(EstimatorError::TooFewScales {
                need: 2,
                got: values.len(),
            });
        }
        let (mean, var) = mean_var(&values);
        points.push(CurvePoint {
            n,
            mean,
            se: (var / values.len() as f64).sqrt(),
            var,
            replicates: values.len(),
            excluded,
        });
    }
    Ok(EmpiricalMeanCurve { points })
}

/// Generate replicates over the grid and aggregate them; deterministic
/// given the master seed. The raw records are returned alongside the
/// curve so callers can persist them.
pub fn estimate_mean_curve(
    spec: &MeasureSpec,
    n_grid: &[u64],
    replicates: u64,
    master_seed: u64,
) -> Result<(EmpiricalMeanCurve, Vec<ReplicateRecord>), EstimatorError> {
    if replicates < 2 {
        return Err(EstimatorError::TooFewScales {
            need: 2,
            got: replicates as usize,
        });
    }
    let records = run_grid(spec, n_grid, replicates, master_seed);
    let curve = curve_from_records(&records)?;
    Ok((curve, records))
}

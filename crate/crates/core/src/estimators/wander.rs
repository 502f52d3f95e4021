use crate::geodesic::geodesic;
use crate::geometry::{point_segment_distance, Point, Segment};
use crate::poisson::PoissonSample;
use crate::stats::{ols_line, quantile};

use super::record::ReplicateRecord;
use super::scale::DerivedScales;
use super::EstimatorError;

/// Default slab levels: `count` evenly spaced values in
/// [w*(n), n - w*(n)]. Empty when the starred scale is undefined at n or
/// the interval is degenerate.
pub fn slab_lambdas(scales: &DerivedScales, n: f64, count: usize) -> Vec<f64> {
    let w_star = match scales.w_star(n) {
        Ok(w) => w,
        Err(_) => return Vec::new(),
    };
    let hi = n - w_star;
    if count == 0 || !(hi > w_star) {
        return if count > 0 && hi == w_star {
            vec![w_star]
        } else {
            Vec::new()
        };
    }
    if count == 1 {
        return vec![n / 2.0];
    }
    (0..count)
        .map(|i| w_star + (hi - w_star) * i as f64 / (count - 1) as f64)
        .collect()
}

/// dist_max of the path points inside the slab |x . axis - lambda| <=
/// half_width to the segment; None when the path misses the slab, which
/// callers must keep distinct from a zero deviation.
pub fn slab_deviation_of_path(
    path: &[Point],
    segment: &Segment,
    axis: &Point,
    lambda: f64,
    half_width: f64,
) -> Option<f64> {
    let mut worst: Option<f64> = None;
    for p in path {
        if (p.dot(axis) - lambda).abs() <= half_width {
            let d = point_segment_distance(p, segment);
            worst = Some(worst.map_or(d, |w: f64| w.max(d)));
        }
    }
    worst
}

/// Slab deviation of the geodesic between x and y at level lambda,
/// measured against the segment from x to y. The slab is orthogonal to
/// the segment direction with half-width psi(n).
pub fn slab_deviation(
    sample: &PoissonSample,
    x: &Point,
    y: &Point,
    lambda: f64,
    psi_n: f64,
    alpha: f64,
) -> Result<Option<f64>, EstimatorError> {
    let geo = geodesic(sample, x, y, alpha)?;
    let diff = y.sub(x);
    let n = diff.norm();
    if n == 0.0 {
        return Ok(None);
    }
    let axis = diff.scale(1.0 / n);
    let segment = Segment::new(x.clone(), y.clone());
    Ok(slab_deviation_of_path(
        &geo.path, &segment, &axis, lambda, psi_n,
    ))
}

/// Wandering quantiles for the records at one n. Boundary-touching
/// records are excluded and counted; failed records likewise.
#[derive(Clone, Debug)]
pub struct WanderingSummary {
    pub n: u64,
    pub used: usize,
    pub excluded_boundary: usize,
    pub excluded_failed: usize,
    pub median: f64,
    pub q90: f64,
    pub q99: f64,
}

pub fn wandering_stats(
    records: &[ReplicateRecord],
    n: u64,
) -> Result<WanderingSummary, EstimatorError> {
    let mut values = Vec::new();
    let mut excluded_boundary = 0usize;
    let mut excluded_failed = 0usize;
    for rec in records.iter().filter(|r| r.n == n) {
        if rec.flags.failed || rec.wandering.is_none() {
            excluded_failed += 1;
        } else if rec.flags.touched_boundary {
            excluded_boundary += 1;
        } else {
            values.push(rec.wandering.unwrap());
        }
    }
    if values.is_empty() {
        return Err(EstimatorError::NoUsableRecords(n));
    }
    Ok(WanderingSummary {
        n,
        used: values.len(),
        excluded_boundary,
        excluded_failed,
        median: quantile(&values, 0.5),
        q90: quantile(&values, 0.9),
        q99: quantile(&values, 0.99),
    })
}

/// Log-log OLS slope of (n, median wandering) pairs.
pub fn wandering_slope(points: &[(u64, f64)]) -> Result<f64, EstimatorError> {
    if points.len() < 2 {
        return Err(EstimatorError::TooFewScales {
            need: 2,
            got: points.len(),
        });
    }
    let xs: Vec<f64> = points.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let ys: Vec<f64> = points
        .iter()
        .map(|(_, m)| if *m > 0.0 { m.ln() } else { f64::NEG_INFINITY })
        .collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(EstimatorError::Degenerate(
            "median wandering must be positive for a log-log fit".into(),
        ));
    }
    Ok(ols_line(&xs, &ys).0)
}

use crate::stats::{mean_var, wilson_interval};

use super::EstimatorError;

/// One point of the empirical concentration tail.
#[derive(Clone, Copy, Debug)]
pub struct TailPoint {
    pub lambda: f64,
    pub exceed: u64,
    pub total: u64,
    pub prob: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
}

/// Empirical P(|T_n - mean| > lambda psi(n)) over a lambda grid, with
/// 95% Wilson intervals, plus the variance estimate the tail is usually
/// read against.
#[derive(Clone, Debug)]
pub struct TailCurve {
    pub mean: f64,
    pub var: f64,
    pub psi_n: f64,
    pub points: Vec<TailPoint>,
}

pub fn concentration_tail(
    t_values: &[f64],
    psi_n: f64,
    lambda_grid: &[f64],
) -> Result<TailCurve, EstimatorError> {
    if t_values.len() < 2 {
        return Err(EstimatorError::TooFewScales {
            need: 2,
            got: t_values.len(),
        });
    }
    if !(psi_n > 0.0) {
        return Err(EstimatorError::Degenerate(format!("psi(n) = {psi_n}")));
    }
    let (mean, var) = mean_var(t_values);
    let total = t_values.len() as u64;
    let mut lambdas = lambda_grid.to_vec();
    lambdas.sort_by(|a, b| a.partial_cmp(b).expect("finite lambda grid"));
    let points = lambdas
        .into_iter()
        .map(|lambda| {
            let threshold = lambda * psi_n;
            let exceed = t_values
                .iter()
                .filter(|t| (**t - mean).abs() > threshold)
                .count() as u64;
            let (wilson_lo, wilson_hi) = wilson_interval(exceed, total, 1.96);
            TailPoint {
                lambda,
                exceed,
                total,
                prob: exceed as f64 / total as f64,
                wilson_lo,
                wilson_hi,
            }
        })
        .collect();
    Ok(TailCurve {
        mean,
        var,
        psi_n,
        points,
    })
}

use crate::geometry::ModelParams;
use crate::stats::fit_two_basis;

use super::curve::EmpiricalMeanCurve;
use super::scale::ScaleFunction;
use super::EstimatorError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MuMethod {
    /// Extrapolation from doubling gaps 2 h(n) - h(2n), which the
    /// subadditive doubling inequality bounds by the envelope.
    Doubling,
    /// Least-squares fit of h(n) = mu n + c psi(n) (log n)^(1/kappa1).
    EnvelopeFit,
}

/// A time-constant estimate with its envelope coefficient and per-scale
/// diagnostics (fit residuals, or doubling gaps in envelope units).
#[derive(Clone, Debug)]
pub struct MuEstimate {
    pub mu_hat: f64,
    pub method: MuMethod,
    pub envelope_coeff: f64,
    /// Approximate standard error propagated from the curve.
    pub mu_se: f64,
    pub per_scale: Vec<(u64, f64)>,
}

/// Both estimates plus a cross-method disagreement warning.
#[derive(Clone, Debug)]
pub struct MuPair {
    pub envelope: MuEstimate,
    pub doubling: MuEstimate,
    pub disagree_beyond_2se: bool,
}

fn envelope_scale(n: f64, psi: &ScaleFunction, params: &ModelParams) -> f64 {
    psi.eval(n) * n.ln().powf(1.0 / params.kappa1)
}

pub fn estimate_mu(
    curve: &EmpiricalMeanCurve,
    psi: &ScaleFunction,
    params: &ModelParams,
    method: MuMethod,
) -> Result<MuEstimate, EstimatorError> {
    match method {
        MuMethod::EnvelopeFit => envelope_fit(curve, psi, params),
        MuMethod::Doubling => doubling(curve, psi, params),
    }
}

/// Run both methods and flag disagreement beyond twice the joint SE.
pub fn estimate_mu_both(
    curve: &EmpiricalMeanCurve,
    psi: &ScaleFunction,
    params: &ModelParams,
) -> Result<MuPair, EstimatorError> {
    let envelope = envelope_fit(curve, psi, params)?;
    let doubling = doubling(curve, psi, params)?;
    let joint = (envelope.mu_se * envelope.mu_se + doubling.mu_se * doubling.mu_se).sqrt();
    let disagree_beyond_2se = (envelope.mu_hat - doubling.mu_hat).abs() > 2.0 * joint;
    Ok(MuPair {
        envelope,
        doubling,
        disagree_beyond_2se,
    })
}

fn envelope_fit(
    curve: &EmpiricalMeanCurve,
    psi: &ScaleFunction,
    params: &ModelParams,
) -> Result<MuEstimate, EstimatorError> {
    let pts = &curve.points;
    if pts.len() < 3 {
        return Err(EstimatorError::TooFewScales {
            need: 3,
            got: pts.len(),
        });
    }
    let ys: Vec<f64> = pts.iter().map(|p| p.mean).collect();
    let b1: Vec<f64> = pts.iter().map(|p| p.n as f64).collect();
    let b2: Vec<f64> = pts
        .iter()
        .map(|p| envelope_scale(p.n as f64, psi, params))
        .collect();
    let (mu_hat, envelope_coeff) = fit_two_basis(&ys, &b1, &b2);
    if !(mu_hat > 0.0) {
        return Err(EstimatorError::Degenerate(format!(
            "envelope fit produced mu = {mu_hat}"
        )));
    }
    // Linear estimator weights from the 2x2 normal equations give the
    // propagated standard error.
    let (a11, a12, a22) = pts.iter().zip(&b2).fold((0.0, 0.0, 0.0), |acc, (p, &v2)| {
        let v1 = p.n as f64;
        (acc.0 + v1 * v1, acc.1 + v1 * v2, acc.2 + v2 * v2)
    });
    let det = a11 * a22 - a12 * a12;
    let mu_var: f64 = pts
        .iter()
        .zip(&b2)
        .map(|(p, &v2)| {
            let w = (a22 * p.n as f64 - a12 * v2) / det;
            w * w * p.se * p.se
        })
        .sum();
    let per_scale = pts
        .iter()
        .zip(&b2)
        .map(|(p, &v2)| (p.n, p.mean - mu_hat * p.n as f64 - envelope_coeff * v2))
        .collect();
    Ok(MuEstimate {
        mu_hat,
        method: MuMethod::EnvelopeFit,
        envelope_coeff,
        mu_se: mu_var.sqrt(),
        per_scale,
    })
}

fn doubling(
    curve: &EmpiricalMeanCurve,
    psi: &ScaleFunction,
    params: &ModelParams,
) -> Result<MuEstimate, EstimatorError> {
    let pts = &curve.points;
    if pts.len() < 3 {
        return Err(EstimatorError::TooFewScales {
            need: 3,
            got: pts.len(),
        });
    }
    // Consecutive doubling pairs (n, 2n) present in the grid.
    let mut pairs = Vec::new();
    for p in pts {
        if let Some(q) = pts.iter().find(|q| q.n == 2 * p.n) {
            pairs.push((p, q));
        }
    }
    if pairs.len() < 2 {
        return Err(EstimatorError::NonDoublingGrid);
    }
    // Empirical doubling gaps sigma(n) >= 2 h(n) - h(2n), in units of the
    // envelope scale.
    let mut coeff: f64 = 0.0;
    let mut zeta: f64 = 0.0;
    let mut per_scale = Vec::with_capacity(pairs.len());
    for (p, q) in &pairs {
        let n = p.n as f64;
        let scale = envelope_scale(n, psi, params);
        let gap = 2.0 * p.mean - q.mean;
        coeff = coeff.max(gap / scale);
        zeta = zeta.max(envelope_scale(2.0 * n, psi, params) / scale);
        per_scale.push((p.n, gap / scale));
    }
    coeff = coeff.max(0.0);
    if !(zeta < 2.0) {
        return Err(EstimatorError::BadZeta(zeta));
    }
    let multiplier = 1.0 / (2.0 - zeta);
    let last = pts.last().expect("non-empty curve");
    let n_max = last.n as f64;
    let corrected =
        last.mean / n_max - multiplier * coeff * envelope_scale(n_max, psi, params) / n_max;
    // The estimate can never exceed any h(n)/n, which bounds mu from
    // above scale by scale.
    let upper = pts
        .iter()
        .map(|p| p.mean / p.n as f64)
        .fold(f64::INFINITY, f64::min);
    let mu_hat = corrected.min(upper);
    if !(mu_hat > 0.0) {
        return Err(EstimatorError::Degenerate(format!(
            "doubling extrapolation produced mu = {mu_hat}"
        )));
    }
    Ok(MuEstimate {
        mu_hat,
        method: MuMethod::Doubling,
        envelope_coeff: coeff,
        mu_se: last.se / n_max,
        per_scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::curve::CurvePoint;
    use crate::geometry::derive_constants;

    fn synthetic_curve(f: impl Fn(f64) -> f64, grid: &[u64]) -> EmpiricalMeanCurve {
        EmpiricalMeanCurve {
            points: grid
                .iter()
                .map(|&n| CurvePoint {
                    n,
                    mean: f(n as f64),
                    se: 1e-9,
                    var: 1e-18,
                    replicates: 1000,
                    excluded: 0,
                })
                .collect(),
        }
    }

    fn setup() -> (ModelParams, ScaleFunction) {
        // kappa1 = 1: the envelope is sqrt(n) log n.
        (
            derive_constants(2, 1.5, 0.4).unwrap(),
            ScaleFunction::sqrt(),
        )
    }

    #[test]
    fn exact_linear_curve_recovers_mu_with_zero_envelope() {
        let (params, psi) = setup();
        let curve = synthetic_curve(|n| 2.0 * n, &[16, 32, 64, 128, 256]);
        for method in [MuMethod::EnvelopeFit, MuMethod::Doubling] {
            let est = estimate_mu(&curve, &psi, &params, method).unwrap();
            assert!(
                (est.mu_hat - 2.0).abs() < 1e-9,
                "{method:?}: {}",
                est.mu_hat
            );
            assert!(est.envelope_coeff.abs() < 1e-9, "{method:?}");
        }
    }

    #[test]
    fn envelope_fit_recovers_synthetic_coefficients() {
        let (params, psi) = setup();
        let curve = synthetic_curve(
            |n| 2.0 * n + 3.0 * n.sqrt() * n.ln(),
            &[16, 32, 64, 128, 256],
        );
        let est = estimate_mu(&curve, &psi, &params, MuMethod::EnvelopeFit).unwrap();
        assert!((est.mu_hat - 2.0).abs() < 1e-6, "mu = {}", est.mu_hat);
        assert!(
            (est.envelope_coeff - 3.0).abs() < 1e-6,
            "c = {}",
            est.envelope_coeff
        );
        for (_, resid) in &est.per_scale {
            assert!(resid.abs() < 1e-6);
        }
    }

    #[test]
    fn doubling_respects_upper_bound_invariant() {
        let (params, psi) = setup();
        let curve = synthetic_curve(
            |n| 2.0 * n + 3.0 * n.sqrt() * n.ln(),
            &[16, 32, 64, 128, 256],
        );
        let est = estimate_mu(&curve, &psi, &params, MuMethod::Doubling).unwrap();
        let min_ratio = curve
            .points
            .iter()
            .map(|p| p.mean / p.n as f64)
            .fold(f64::INFINITY, f64::min);
        assert!(est.mu_hat <= min_ratio + 1e-12);
        assert!(est.mu_hat > 0.0);
    }

    #[test]
    fn non_doubling_grid_rejected() {
        let (params, psi) = setup();
        let curve = synthetic_curve(|n| 2.0 * n, &[16, 48, 100]);
        assert!(matches!(
            estimate_mu(&curve, &psi, &params, MuMethod::Doubling),
            Err(EstimatorError::NonDoublingGrid)
        ));
    }

    #[test]
    fn both_methods_agree_on_clean_data() {
        let (params, psi) = setup();
        let curve = synthetic_curve(|n| 1.5 * n + 0.5 * n.sqrt() * n.ln(), &[32, 64, 128, 256]);
        let pair = estimate_mu_both(&curve, &psi, &params).unwrap();
        assert!(pair.envelope.mu_hat > 0.0 && pair.doubling.mu_hat > 0.0);
    }
}

use super::GeometryError;

/// Model parameters: dimension, edge-cost exponent and the derived
/// constant algebra used by scale functions and region sizes.
///
/// kappa1 = min(1, d/alpha), kappa2 = 1/(4 alpha + 3); gamma, beta, eta
/// follow from kappa1 and the configured kappa3 via
/// gamma = 1/(kappa1 kappa3), beta = 1/(2 kappa1), eta = beta + gamma.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub d: usize,
    pub alpha: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub gamma: f64,
    pub beta: f64,
    pub eta: f64,
}

/// Populate a [`ModelParams`] from the free inputs. `alpha <= 1` is
/// rejected (straight-line paths would be optimal and the model
/// degenerates), as is `kappa3` outside (0, 1/2).
pub fn derive_constants(d: usize, alpha: f64, kappa3: f64) -> Result<ModelParams, GeometryError> {
    if d < 2 {
        return Err(GeometryError::BadDimension(d));
    }
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(GeometryError::BadAlpha(alpha));
    }
    if !(kappa3 > 0.0 && kappa3 < 0.5) {
        return Err(GeometryError::BadKappa3(kappa3));
    }
    let kappa1 = 1.0f64.min(d as f64 / alpha);
    let kappa2 = 1.0 / (4.0 * alpha + 3.0);
    let gamma = 1.0 / (kappa1 * kappa3);
    let beta = 1.0 / (2.0 * kappa1);
    let eta = beta + gamma;
    Ok(ModelParams {
        d,
        alpha,
        kappa1,
        kappa2,
        kappa3,
        gamma,
        beta,
        eta,
    })
}

impl ModelParams {
    /// Standard configuration used throughout the test suite.
    pub fn standard(d: usize, alpha: f64) -> Result<Self, GeometryError> {
        derive_constants(d, alpha, 0.4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d2_alpha2() {
        let p = derive_constants(2, 2.0, 0.4).unwrap();
        assert_eq!(p.kappa1, 1.0);
        assert_eq!(p.kappa2, 1.0 / 11.0);
        assert_eq!(p.gamma, 2.5);
        assert_eq!(p.beta, 0.5);
        assert_eq!(p.eta, 3.0);
    }

    #[test]
    fn d3_alpha2() {
        let p = derive_constants(3, 2.0, 0.4).unwrap();
        assert_eq!(p.kappa1, 1.0);
        assert_eq!(p.kappa2, 1.0 / 11.0);
    }

    #[test]
    fn d2_alpha4() {
        let p = derive_constants(2, 4.0, 0.25).unwrap();
        assert_eq!(p.kappa1, 0.5);
        assert_eq!(p.kappa2, 1.0 / 19.0);
        assert_eq!(p.beta, 1.0);
        assert_eq!(p.gamma, 8.0);
        assert_eq!(p.eta, 9.0);
    }

    #[test]
    fn eta_is_exactly_beta_plus_gamma() {
        for &(d, alpha, k3) in &[
            (2usize, 1.5, 0.4),
            (2, 2.0, 0.1),
            (3, 3.0, 0.25),
            (4, 1.01, 0.49),
            (2, 7.5, 0.3),
        ] {
            let p = derive_constants(d, alpha, k3).unwrap();
            assert_eq!(p.eta, p.beta + p.gamma);
            assert!(p.kappa1 > 0.0 && p.kappa1 <= 1.0);
        }
    }

    #[test]
    fn rejections() {
        assert!(matches!(
            derive_constants(2, 1.0, 0.4),
            Err(GeometryError::BadAlpha(_))
        ));
        assert!(matches!(
            derive_constants(2, 0.5, 0.4),
            Err(GeometryError::BadAlpha(_))
        ));
        assert!(matches!(
            derive_constants(2, f64::NAN, 0.4),
            Err(GeometryError::BadAlpha(_))
        ));
        assert!(matches!(
            derive_constants(2, 2.0, 0.0),
            Err(GeometryError::BadKappa3(_))
        ));
        assert!(matches!(
            derive_constants(2, 2.0, 0.5),
            Err(GeometryError::BadKappa3(_))
        ));
        assert!(matches!(
            derive_constants(1, 2.0, 0.4),
            Err(GeometryError::BadDimension(1))
        ));
    }
}

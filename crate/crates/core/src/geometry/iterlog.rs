use super::GeometryError;

/// k-fold natural logarithm. `iterated_log(0, x) = x`; each further
/// level requires the running value to stay strictly positive.
pub fn iterated_log(k: u32, x: f64) -> Result<f64, GeometryError> {
    let mut v = x;
    for applied in 0..k {
        if !(v > 0.0) {
            return Err(GeometryError::LogDomain {
                value: v,
                applied,
                requested: k,
            });
        }
        v = v.ln();
    }
    Ok(v)
}

/// k-fold exponential, the inverse of [`iterated_log`] on its domain.
pub fn iterated_exp(k: u32, x: f64) -> f64 {
    let mut v = x;
    for _ in 0..k {
        v = v.exp();
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_zero_is_identity() {
        assert_eq!(iterated_log(0, 5.0).unwrap(), 5.0);
        assert_eq!(iterated_log(0, -3.0).unwrap(), -3.0);
    }

    #[test]
    fn small_cases() {
        assert!((iterated_log(1, std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        let ee = std::f64::consts::E.exp();
        assert!((iterated_log(2, ee).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn domain_errors() {
        assert!(iterated_log(1, 0.0).is_err());
        assert!(iterated_log(1, -1.0).is_err());
        // ln(1) = 0, so the second application fails.
        assert!(iterated_log(2, 1.0).is_err());
        // ln(ln(2)) < 0, third application fails.
        assert!(iterated_log(3, 2.0).is_err());
    }

    // Largest x per iterate level such that iterated_exp(k, x) stays
    // comfortably inside f64 range.
    const X_MAX: [f64; 4] = [300.0, 300.0, 6.0, 1.8];

    #[test]
    fn inverse_round_trip() {
        for k in 0..4u32 {
            for i in 0..40 {
                let x = 0.25 + (X_MAX[k as usize] - 0.25) * i as f64 / 39.0;
                let y = iterated_exp(k, x);
                let back = iterated_log(k, y).unwrap();
                assert!((back - x).abs() < 1e-9, "k={k} x={x} back={back}");
            }
        }
    }

    #[test]
    fn strictly_increasing_on_domain() {
        for k in 0..4u32 {
            let mut prev = None;
            for i in 0..200 {
                // Map a grid through iterated_exp to stay in-domain.
                let t = -2.0 + (X_MAX[k as usize] + 2.0) * i as f64 / 200.0;
                let x = iterated_exp(k, t);
                let v = iterated_log(k, x).unwrap();
                if let Some(p) = prev {
                    assert!(v > p, "not increasing at k={k}, i={i}");
                }
                prev = Some(v);
            }
        }
    }
}

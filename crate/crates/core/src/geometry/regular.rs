use crate::estimators::{DerivedScales, ScaleFunction};

use super::{GeometryError, ModelParams, Point};

/// |tan theta(v)| where theta is the angle to e1; infinite when v is
/// orthogonal to e1.
fn abs_tan_theta(v: &Point) -> f64 {
    let v1 = v.coords()[0];
    let transverse_sq = v.norm_sq() - v1 * v1;
    if v1 == 0.0 {
        return f64::INFINITY;
    }
    transverse_sq.max(0.0).sqrt() / v1.abs()
}

/// Tests whether every endpoint pair is (c, K)-regular of order n:
/// separation at least n/c and direction within the controlled angle of
/// the first axis, |tan theta(x - y)| <= K psi(n) / u*(n).
pub fn is_regular(
    pairs: &[(Point, Point)],
    c: f64,
    big_k: f64,
    n: f64,
    params: &ModelParams,
    psi: &ScaleFunction,
    k0: u32,
) -> Result<bool, GeometryError> {
    debug_assert!(
        c >= 1.0 && c * c <= n * (1.0 + 1e-9),
        "requires 1 <= c <= sqrt(n)"
    );
    let scales = DerivedScales::new(psi.clone(), k0, *params)?;
    let u_star = scales.u_star(n)?;
    let angle_bound = big_k * psi.eval(n) / u_star;
    let min_dist = n / c;
    for (x, y) in pairs {
        let diff = x.sub(y);
        if diff.norm() < min_dist {
            return Ok(false);
        }
        if abs_tan_theta(&diff) > angle_bound {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::derive_constants;
    use rand::{Rng, SeedableRng};
    use rand_pcg::Pcg64Mcg;

    fn setup() -> (ModelParams, ScaleFunction) {
        (
            derive_constants(2, 1.5, 0.4).unwrap(),
            ScaleFunction::sqrt(),
        )
    }

    #[test]
    fn axis_pair_is_regular() {
        let (params, psi) = setup();
        let n = 256.0;
        let pairs = vec![(Point::origin(2), Point::from_slice(&[n, 0.0]))];
        assert!(is_regular(&pairs, 2.0, 1.0, n, &params, &psi, 2).unwrap());
    }

    #[test]
    fn short_pair_fails_distance() {
        let (params, psi) = setup();
        let n = 256.0;
        let pairs = vec![(Point::origin(2), Point::from_slice(&[0.0, n / 2.0]))];
        assert!(!is_regular(&pairs, 1.0, 1e9, n, &params, &psi, 2).unwrap());
    }

    #[test]
    fn orthogonal_pair_fails_angle() {
        let (params, psi) = setup();
        let n = 256.0;
        let pairs = vec![(Point::origin(2), Point::from_slice(&[0.0, n]))];
        assert!(!is_regular(&pairs, 1.0, 10.0, n, &params, &psi, 2).unwrap());
    }

    #[test]
    fn matches_direct_evaluation_on_random_pairs() {
        let (params, psi) = setup();
        let n = 512.0;
        let k0 = 2;
        let scales = DerivedScales::new(psi.clone(), k0, params).unwrap();
        let bound = 3.0 * psi.eval(n) / scales.u_star(n).unwrap();
        let mut rng = Pcg64Mcg::seed_from_u64(7);
        for _ in 0..500 {
            let x = Point::from_slice(&[rng.gen::<f64>() * 40.0, rng.gen::<f64>() * 40.0]);
            let y = Point::from_slice(&[
                x.coords()[0] + n * (0.2 + rng.gen::<f64>()),
                x.coords()[1] + rng.gen::<f64>() * 200.0 - 100.0,
            ]);
            let pair = vec![(x.clone(), y.clone())];
            let got = is_regular(&pair, 1.5, 3.0, n, &params, &psi, k0).unwrap();
            // Independent re-evaluation of the two defining inequalities.
            let diff = x.sub(&y);
            let want = diff.norm() >= n / 1.5 && abs_tan_theta(&diff) <= bound;
            assert_eq!(got, want);
        }
    }
}

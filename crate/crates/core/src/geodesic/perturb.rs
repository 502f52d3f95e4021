use crate::geometry::Point;
use crate::poisson::PoissonSample;

use super::{GeodesicError, GeodesicSolver};

/// Observed endpoint-perturbation gap |T(x,y) - T(x,y')| together with
/// its analytic bound (2 |q(y) - y| + 2 |y - y'|)^alpha. The bound holds
/// unconditionally: a path to q(y') extends to q(y) with one extra hop of
/// at most that length. Callers assert observed <= bound.
pub fn perturbation_gap(
    sample: &PoissonSample,
    x: &Point,
    y: &Point,
    y_prime: &Point,
    alpha: f64,
) -> Result<(f64, f64), GeodesicError> {
    let mut solver = GeodesicSolver::new(sample, alpha)?;
    let pair = solver.solve_multi(x, &[y.clone(), y_prime.clone()])?;
    let observed = (pair[0].total - pair[1].total).abs();
    let qy = sample.nearest_point(y)?;
    let bound = (2.0 * qy.dist(y) + 2.0 * y.dist(y_prime)).powf(alpha);
    Ok((observed, bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoxRegion;
    use crate::poisson::{sample_poisson, SeedPolicy};

    #[test]
    fn identical_endpoints_have_zero_gap() {
        let bounds = BoxRegion::cube(Point::origin(2), 10.0).unwrap();
        let sample = sample_poisson(&bounds, 1.0, SeedPolicy::new(8, 0)).unwrap();
        let x = Point::from_slice(&[-8.0, 0.0]);
        let y = Point::from_slice(&[8.0, 1.0]);
        let (observed, bound) = perturbation_gap(&sample, &x, &y, &y, 1.5).unwrap();
        assert_eq!(observed, 0.0);
        // Bound collapses to (2 |q(y) - y|)^alpha.
        let qy = sample.nearest_point(&y).unwrap();
        let expect = (2.0 * qy.dist(&y)).powf(1.5);
        assert!((bound - expect).abs() < 1e-12 * expect.max(1.0));
    }

    #[test]
    fn snapping_to_entry_point_gives_zero_gap() {
        let bounds = BoxRegion::cube(Point::origin(2), 10.0).unwrap();
        let sample = sample_poisson(&bounds, 1.0, SeedPolicy::new(9, 0)).unwrap();
        let x = Point::from_slice(&[-8.0, -2.0]);
        let y = Point::from_slice(&[7.0, 3.0]);
        let q_y = sample.nearest_point(&y).unwrap();
        // y' = q(y) shares the entry point, so passage times coincide.
        let (observed, bound) = perturbation_gap(&sample, &x, &y, &q_y, 2.0).unwrap();
        assert_eq!(observed, 0.0);
        assert!(observed <= bound);
    }
}

use crate::geometry::Point;
use crate::poisson::PoissonSample;

use super::edge_cost_sq;

/// The midpoint-ball radius ratio for two-hop domination: any point c
/// within distance ratio * l of the midpoint of an edge of length l
/// satisfies |a-c|^alpha + |c-b|^alpha <= l^alpha, because both new edges
/// are at most 2^(-1/alpha) * l long. Positive exactly when alpha > 1.
pub fn domination_ratio(alpha: f64) -> f64 {
    0.5f64.powf(1.0 / alpha) - 0.5
}

/// Conservative two-hop domination test: true only when an explicit
/// sample point c is found with |a-c|^alpha + |c-b|^alpha <= |a-b|^alpha,
/// so the direct edge is never strictly needed on an optimal path. Only
/// the midpoint ball is searched; false negatives are fine, false
/// positives are impossible because the inequality is evaluated outright.
pub fn edge_dominated(a: &Point, b: &Point, sample: &PoissonSample, alpha: f64) -> bool {
    let l_sq = a.dist_sq(b);
    if l_sq == 0.0 {
        return false;
    }
    let l = l_sq.sqrt();
    let rho = domination_ratio(alpha) * l;
    let mid = a.add(b).scale(0.5);
    let direct = edge_cost_sq(l_sq, alpha);
    for idx in sample.ball_query_indices(&mid, rho) {
        let c = sample.coords_of(idx as usize);
        if c == a.coords() || c == b.coords() {
            continue;
        }
        let d1 = crate::poisson::grid_dist_sq(c, a.coords());
        let d2 = crate::poisson::grid_dist_sq(c, b.coords());
        if edge_cost_sq(d1, alpha) + edge_cost_sq(d2, alpha) <= direct {
            return true;
        }
    }
    false
}

/// Cone-covering parameters for the 2-D domination stopping rule.
///
/// Directions are covered by `count` equal sectors. If the nearest sample
/// point to u inside sector j sits at distance m_j, then every edge (u,v)
/// with v in sector j and |u - v| >= m_j / t_max is dominated by that
/// point: the witness is within angle 2 pi / count of the edge direction
/// and within t_max * |u - v| of u, which forces the two-hop replacement
/// to cost no more than the direct edge.
#[derive(Clone, Debug)]
pub struct ConeRule {
    pub count: usize,
    pub t_max: f64,
    /// tan of the sector boundaries strictly inside a quadrant,
    /// ascending; length count/4 - 1.
    quad_tans: Vec<f64>,
}

impl ConeRule {
    /// Pick the coarsest covering whose witness ratio is still useful for
    /// this alpha. Returns None when alpha is so close to 1 that the rule
    /// degenerates (the solver then falls back to budget pruning alone).
    pub fn for_alpha(alpha: f64) -> Option<ConeRule> {
        for &count in &[16usize, 32, 64, 96] {
            let spread = 2.0 * std::f64::consts::PI / count as f64;
            let t = witness_ratio(alpha, spread);
            let good_enough = t >= 0.55 || (count == 96 && t >= 0.2);
            if good_enough {
                let per_quad = count / 4;
                let quad_tans = (1..per_quad)
                    .map(|k| (k as f64 * std::f64::consts::FRAC_PI_2 / per_quad as f64).tan())
                    .collect();
                return Some(ConeRule {
                    count,
                    t_max: t,
                    quad_tans,
                });
            }
        }
        None
    }

    /// Sector index of the direction (dx, dy), branch-and-compare only.
    #[inline]
    pub fn sector_of(&self, dx: f64, dy: f64) -> usize {
        let ax = dx.abs();
        let ay = dy.abs();
        let mut s = 0usize;
        for t in &self.quad_tans {
            if ay > t * ax {
                s += 1;
            } else {
                break;
            }
        }
        let q = self.count / 4;
        match (dx >= 0.0, dy >= 0.0) {
            (true, true) => s,
            (false, true) => 2 * q - 1 - s,
            (false, false) => 2 * q + s,
            (true, false) => 4 * q - 1 - s,
        }
    }
}

/// Largest t <= 0.98 such that a witness at distance t*l from u, within
/// `spread` radians of the edge direction, still dominates an edge of
/// length l: t^alpha + (1 + t^2 - 2 t cos(spread))^(alpha/2) <= 1.
fn witness_ratio(alpha: f64, spread: f64) -> f64 {
    let cos_s = spread.cos();
    let f =
        |t: f64| -> f64 { t.powf(alpha) + (1.0 + t * t - 2.0 * t * cos_s).powf(alpha / 2.0) - 1.0 };
    let mut hi = 0.98f64;
    if f(hi) <= 0.0 {
        return hi;
    }
    // f(0) = 0 and f dips negative before crossing up; scan for a
    // bracket, then bisect.
    let mut bracket = None;
    for i in 1..=98 {
        let t = i as f64 / 100.0;
        if f(t) <= 0.0 {
            bracket = Some(t);
        } else if bracket.is_some() {
            hi = t;
            break;
        }
    }
    let mut lo = match bracket {
        Some(t) => t,
        None => return 0.0,
    };
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoxRegion;

    fn sample_of(points: &[[f64; 2]]) -> PoissonSample {
        let pts: Vec<Point> = points.iter().map(|c| Point::from_slice(c)).collect();
        let bounds = BoxRegion::cube(Point::origin(2), 100.0).unwrap();
        PoissonSample::from_points(&pts, bounds, 1.0, 0).unwrap()
    }

    #[test]
    fn domination_ratio_positive_above_one() {
        assert!(domination_ratio(1.5) > 0.0);
        assert!((domination_ratio(2.0) - (0.5f64.sqrt() - 0.5)).abs() < 1e-15);
        assert!(domination_ratio(1.0).abs() < 1e-15);
    }

    #[test]
    fn midpoint_witness_dominates() {
        let s = sample_of(&[[0.0, 0.0], [4.0, 0.0], [2.0, 0.0]]);
        let a = Point::from_slice(&[0.0, 0.0]);
        let b = Point::from_slice(&[4.0, 0.0]);
        assert!(edge_dominated(&a, &b, &s, 2.0));
    }

    #[test]
    fn no_third_point_no_domination() {
        let s = sample_of(&[[0.0, 0.0], [4.0, 0.0]]);
        let a = Point::from_slice(&[0.0, 0.0]);
        let b = Point::from_slice(&[4.0, 0.0]);
        assert!(!edge_dominated(&a, &b, &s, 2.0));
    }

    #[test]
    fn witness_ratio_matches_hand_values() {
        // alpha = 1.5 with a 30 degree spread admits witnesses out to
        // roughly 0.73 of the edge length.
        let t = witness_ratio(1.5, 30f64.to_radians());
        assert!(t > 0.70 && t < 0.76, "t = {t}");
        let t3 = witness_ratio(3.0, 30f64.to_radians());
        assert!(t3 > 0.90, "t3 = {t3}");
    }

    #[test]
    fn cone_rule_selection() {
        let r = ConeRule::for_alpha(1.5).unwrap();
        assert_eq!(r.count % 4, 0);
        assert!(r.t_max >= 0.55);
        // Extremely flat alpha falls back to no cone rule.
        assert!(ConeRule::for_alpha(1.0000001).is_none());
    }

    #[test]
    fn sector_classification_matches_angle_arithmetic() {
        let tau = 2.0 * std::f64::consts::PI;
        for alpha in [1.2, 1.5, 2.0, 3.0] {
            let r = ConeRule::for_alpha(alpha).unwrap();
            for i in 0..3600 {
                let ang = i as f64 * tau / 3600.0 + 1e-7;
                let s = r.sector_of(ang.cos(), ang.sin());
                let want = ((ang / tau * r.count as f64) as usize) % r.count;
                assert_eq!(s, want, "alpha={alpha} angle={ang}");
            }
        }
        let r = ConeRule::for_alpha(2.0).unwrap();
        assert_ne!(r.sector_of(1.0, 0.0), r.sector_of(-1.0, 0.0));
    }
}

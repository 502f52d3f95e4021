//! Exact passage times and geodesics for the powered-Euclidean cost on a
//! Poisson sample: a pruned Dijkstra solver whose totals are certified
//! against an unpruned complete-graph oracle, plus path diagnostics.

mod oracle;
mod perturb;
mod prune;
mod solver;

pub use oracle::{brute_force_geodesic, exhaustive_geodesic, BRUTE_FORCE_CAP, EXHAUSTIVE_CAP};
pub use perturb::perturbation_gap;
pub use prune::{domination_ratio, edge_dominated};
pub use solver::{geodesic, geodesic_multi, GeodesicSolver};

use thiserror::Error;

use crate::geometry::{GeometryError, Point};
use crate::poisson::PoissonError;

/// Fraction of each half-width treated as the boundary shell for the
/// bias flag on geodesics.
pub const BOUNDARY_SHELL_FRACTION: f64 = 0.05;

#[derive(Debug, Error)]
pub enum GeodesicError {
    #[error("path must contain at least one point")]
    EmptyPath,
    #[error("alpha must exceed 1, got {0}")]
    BadAlpha(f64),
    #[error("endpoint {index} lies outside the sample box")]
    EndpointOutsideBox { index: usize },
    #[error("instance has {n} points, above the cap {cap} for this oracle")]
    OracleTooLarge { n: usize, cap: usize },
    #[error(transparent)]
    Poisson(#[from] PoissonError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Edge cost d^alpha from the squared length. This is the one canonical
/// cost evaluation shared by the solver, the oracles and every
/// recomputation, so that totals agree bit-for-bit where paths agree.
#[inline(always)]
pub fn edge_cost_sq(dist_sq: f64, alpha: f64) -> f64 {
    let d = dist_sq.sqrt();
    if alpha == 2.0 {
        d * d
    } else if alpha == 1.5 {
        d * d.sqrt()
    } else if alpha == 3.0 {
        d * d * d
    } else {
        d.powf(alpha)
    }
}

/// Total passage time of an explicit point sequence: the left-to-right
/// sum of powered edge lengths. A single point costs zero.
pub fn path_time(path: &[Point], alpha: f64) -> Result<f64, GeodesicError> {
    if path.is_empty() {
        return Err(GeodesicError::EmptyPath);
    }
    if !(alpha > 1.0) {
        return Err(GeodesicError::BadAlpha(alpha));
    }
    let mut total = 0.0;
    for pair in path.windows(2) {
        total += edge_cost_sq(pair[0].dist_sq(&pair[1]), alpha);
    }
    Ok(total)
}

/// A concrete path with its total cost and longest edge.
#[derive(Clone, Debug)]
pub struct PathCost {
    pub path: Vec<Point>,
    pub total: f64,
    pub max_edge: f64,
}

impl PathCost {
    pub fn from_path(path: Vec<Point>, alpha: f64) -> Result<Self, GeodesicError> {
        let total = path_time(&path, alpha)?;
        let max_edge = path
            .windows(2)
            .map(|p| p[0].dist(&p[1]))
            .fold(0.0f64, f64::max);
        Ok(PathCost {
            path,
            total,
            max_edge,
        })
    }
}

/// An optimal path between the sample points nearest to the query
/// endpoints. The passage time is defined through those entry points;
/// travel from `x` to q(x) is free.
#[derive(Clone, Debug)]
pub struct Geodesic {
    pub path: Vec<Point>,
    pub total: f64,
    pub max_edge: f64,
    pub x: Point,
    pub y: Point,
    /// True when some path point lies in the outer shell of the sample
    /// box, i.e. the geodesic may be distorted by the boundary.
    pub touched_boundary: bool,
}

impl Geodesic {
    /// Entry point q(x): where the path starts.
    pub fn entry(&self) -> &Point {
        self.path.first().expect("geodesic paths are non-empty")
    }

    /// Entry point q(y): where the path ends.
    pub fn exit(&self) -> &Point {
        self.path.last().expect("geodesic paths are non-empty")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coords: &[f64]) -> Point {
        Point::from_slice(coords)
    }

    #[test]
    fn path_time_examples() {
        assert_eq!(path_time(&[p(&[0.0, 0.0])], 2.0).unwrap(), 0.0);
        assert_eq!(
            path_time(&[p(&[0.0, 0.0]), p(&[2.0, 0.0])], 2.0).unwrap(),
            4.0
        );
        let three = [p(&[0.0, 0.0]), p(&[1.0, 0.0]), p(&[3.0, 0.0])];
        assert_eq!(path_time(&three, 2.0).unwrap(), 5.0);
    }

    #[test]
    fn path_time_errors() {
        assert!(matches!(path_time(&[], 2.0), Err(GeodesicError::EmptyPath)));
        assert!(matches!(
            path_time(&[p(&[0.0, 0.0])], 1.0),
            Err(GeodesicError::BadAlpha(_))
        ));
    }

    #[test]
    fn edge_cost_specializations_match_powf() {
        for &alpha in &[1.5, 2.0, 3.0, 2.5, 1.17] {
            for &d2 in &[0.25, 1.0, 2.0, 9.0, 1e4] {
                let got = edge_cost_sq(d2, alpha);
                let want = (d2 as f64).sqrt().powf(alpha);
                assert!(
                    crate::stats::rel_close(got, want, 1e-12),
                    "alpha={alpha} d2={d2}"
                );
            }
        }
    }

    #[test]
    fn path_cost_tracks_max_edge() {
        let pc =
            PathCost::from_path(vec![p(&[0.0, 0.0]), p(&[1.0, 0.0]), p(&[4.0, 0.0])], 2.0).unwrap();
        assert_eq!(pc.max_edge, 3.0);
        assert_eq!(pc.total, 10.0);
    }
}

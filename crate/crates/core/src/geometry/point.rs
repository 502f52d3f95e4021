use std::cmp::Ordering;
use std::fmt;

use super::GeometryError;

/// A point of R^d. Coordinates are finite f64 by construction.
#[derive(Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point{:?}", self.coords)
    }
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        Ok(Point { coords })
    }

    /// Shorthand for small literal points in tests and call sites.
    pub fn from_slice(coords: &[f64]) -> Self {
        Point::new(coords.to_vec()).expect("finite coordinates")
    }

    pub fn origin(dim: usize) -> Self {
        Point {
            coords: vec![0.0; dim],
        }
    }

    /// The i-th standard basis vector of R^dim.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut coords = vec![0.0; dim];
        coords[axis] = 1.0;
        Point { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn dot(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn sub(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Point {
        Point {
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    pub fn normalized(&self) -> Result<Point, GeometryError> {
        let n = self.norm();
        if n == 0.0 {
            return Err(GeometryError::ZeroVector);
        }
        Ok(self.scale(1.0 / n))
    }

    /// Total order on coordinates, used wherever a deterministic tie-break
    /// between equidistant points is required.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        for (a, b) in self.coords.iter().zip(&other.coords) {
            match a.partial_cmp(b).expect("finite coordinates") {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.dim().cmp(&other.dim())
    }
}

/// Closed segment between two points.
#[derive(Clone, Debug)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        debug_assert_eq!(a.dim(), b.dim());
        Segment { a, b }
    }
}

/// Euclidean distance from `p` to the segment, via closed-form projection
/// with the parameter clamped to [0, 1].
pub fn point_segment_distance(p: &Point, seg: &Segment) -> f64 {
    let dir = seg.b.sub(&seg.a);
    let len_sq = dir.norm_sq();
    if len_sq == 0.0 {
        return p.dist(&seg.a);
    }
    let t = (p.sub(&seg.a).dot(&dir) / len_sq).clamp(0.0, 1.0);
    let closest = seg.a.add(&dir.scale(t));
    p.dist(&closest)
}

/// One-sided Hausdorff distance from a finite point set to a segment:
/// max over points of the distance to the segment. Empty input is
/// undefined (`None`), deliberately distinct from 0 so that callers can
/// tell "no points in the region" apart from "points on the segment".
pub fn dist_max(points: &[Point], seg: &Segment) -> Option<f64> {
    points
        .iter()
        .map(|p| point_segment_distance(p, seg))
        .fold(None, |acc, d| Some(acc.map_or(d, |m: f64| m.max(d))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(a: &[f64], b: &[f64]) -> Segment {
        Segment::new(Point::from_slice(a), Point::from_slice(b))
    }

    #[test]
    fn segment_distance_interior_projection() {
        let s = seg(&[0.0, 0.0], &[10.0, 0.0]);
        assert_eq!(
            point_segment_distance(&Point::from_slice(&[0.0, 1.0]), &s),
            1.0
        );
        assert_eq!(
            point_segment_distance(&Point::from_slice(&[3.0, 0.0]), &s),
            0.0
        );
    }

    #[test]
    fn segment_distance_endpoint_projection() {
        let s = seg(&[0.0, 0.0], &[10.0, 0.0]);
        assert_eq!(
            point_segment_distance(&Point::from_slice(&[-1.0, 0.0]), &s),
            1.0
        );
        let d = point_segment_distance(&Point::from_slice(&[13.0, 4.0]), &s);
        assert!((d - 5.0).abs() < 1e-15);
    }

    #[test]
    fn segment_degenerate_to_point() {
        let s = seg(&[1.0, 1.0], &[1.0, 1.0]);
        let d = point_segment_distance(&Point::from_slice(&[4.0, 5.0]), &s);
        assert!((d - 5.0).abs() < 1e-15);
    }

    #[test]
    fn dist_max_examples() {
        let s = seg(&[0.0, 0.0], &[10.0, 0.0]);
        let a1 = [Point::from_slice(&[0.0, 1.0])];
        assert_eq!(dist_max(&a1, &s), Some(1.0));
        let a2 = [Point::from_slice(&[3.0, 0.0])];
        assert_eq!(dist_max(&a2, &s), Some(0.0));
        let a3 = [
            Point::from_slice(&[-1.0, 0.0]),
            Point::from_slice(&[5.0, 2.0]),
        ];
        assert_eq!(dist_max(&a3, &s), Some(2.0));
    }

    #[test]
    fn dist_max_empty_is_undefined() {
        let s = seg(&[0.0, 0.0], &[10.0, 0.0]);
        assert_eq!(dist_max(&[], &s), None);
    }

    #[test]
    fn dist_max_monotone_in_point_set() {
        // A subset never has a larger dist_max than its superset.
        let s = seg(&[0.0, 0.0], &[7.0, 3.0]);
        let mut pts = Vec::new();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 20.0 - 5.0
        };
        for _ in 0..64 {
            pts.push(Point::from_slice(&[next(), next()]));
        }
        let mut prev = 0.0f64;
        for k in 1..=pts.len() {
            let d = dist_max(&pts[..k], &s).unwrap();
            assert!(d >= prev);
            prev = d;
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Point::new(vec![0.0, f64::NAN]).is_err());
        assert!(Point::new(vec![f64::INFINITY]).is_err());
    }
}

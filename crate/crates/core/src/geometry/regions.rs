use super::{GeometryError, Point, RotationMap};

/// Axis-aligned box given by center and per-axis half-widths
/// (membership in the l-infinity sense).
#[derive(Clone, Debug)]
pub struct BoxRegion {
    center: Point,
    half_widths: Vec<f64>,
}

impl BoxRegion {
    pub fn new(center: Point, half_widths: Vec<f64>) -> Result<Self, GeometryError> {
        if half_widths.len() != center.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: center.dim(),
                got: half_widths.len(),
            });
        }
        if half_widths.iter().any(|h| !h.is_finite() || *h < 0.0) {
            return Err(GeometryError::BadHalfWidth);
        }
        Ok(BoxRegion {
            center,
            half_widths,
        })
    }

    /// Box from opposite corners (lo must be <= hi coordinate-wise).
    pub fn from_corners(lo: &Point, hi: &Point) -> Result<Self, GeometryError> {
        let center = lo.add(hi).scale(0.5);
        let half: Vec<f64> = lo
            .coords()
            .iter()
            .zip(hi.coords())
            .map(|(l, h)| (h - l) * 0.5)
            .collect();
        BoxRegion::new(center, half)
    }

    /// Cube {y : |y - x|_inf <= r}.
    pub fn cube(center: Point, r: f64) -> Result<Self, GeometryError> {
        let d = center.dim();
        BoxRegion::new(center, vec![r; d])
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn half_widths(&self) -> &[f64] {
        &self.half_widths
    }

    pub fn lo(&self, axis: usize) -> f64 {
        self.center.coords()[axis] - self.half_widths[axis]
    }

    pub fn hi(&self, axis: usize) -> f64 {
        self.center.coords()[axis] + self.half_widths[axis]
    }

    pub fn volume(&self) -> f64 {
        self.half_widths.iter().map(|h| 2.0 * h).product()
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.coords()
            .iter()
            .zip(self.center.coords())
            .zip(&self.half_widths)
            .all(|((x, c), h)| (x - c).abs() <= *h)
    }

    /// True when some coordinate of `p` lies in the outer `shell_fraction`
    /// of the corresponding half-width (boundary-bias diagnostic).
    pub fn in_outer_shell(&self, p: &Point, shell_fraction: f64) -> bool {
        p.coords()
            .iter()
            .zip(self.center.coords())
            .zip(&self.half_widths)
            .any(|((x, c), h)| (x - c).abs() > (1.0 - shell_fraction) * h)
    }
}

/// Rotated-frame cylinder: in frame coordinates y = R^-1 (x - t),
/// membership is |y_1| <= longitudinal_half_width and
/// ||(y_2..y_d)|| <= transverse_radius.
#[derive(Clone, Debug)]
pub struct CylinderRegion {
    pub longitudinal_half_width: f64,
    pub transverse_radius: f64,
    rotation: RotationMap,
    translation: Point,
}

impl CylinderRegion {
    pub fn new(
        longitudinal_half_width: f64,
        transverse_radius: f64,
        rotation: RotationMap,
        translation: Point,
    ) -> Result<Self, GeometryError> {
        if translation.dim() != rotation.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: rotation.dim(),
                got: translation.dim(),
            });
        }
        if !(longitudinal_half_width >= 0.0) || !(transverse_radius >= 0.0) {
            return Err(GeometryError::BadHalfWidth);
        }
        Ok(CylinderRegion {
            longitudinal_half_width,
            transverse_radius,
            rotation,
            translation,
        })
    }

    /// Cylinder with axis e1 centered at `center`.
    pub fn axis_aligned(
        longitudinal_half_width: f64,
        transverse_radius: f64,
        center: Point,
    ) -> Result<Self, GeometryError> {
        let dim = center.dim();
        CylinderRegion::new(
            longitudinal_half_width,
            transverse_radius,
            RotationMap::identity(dim),
            center,
        )
    }

    pub fn contains(&self, p: &Point) -> bool {
        let y = self.rotation.apply_inverse(&p.sub(&self.translation));
        let c = y.coords();
        if c[0].abs() > self.longitudinal_half_width {
            return false;
        }
        let transverse_sq: f64 = c[1..].iter().map(|v| v * v).sum();
        transverse_sq.sqrt() <= self.transverse_radius
    }

    /// A point of the cylinder given frame coordinates (x1, x2 direction
    /// scaled by rho): used to enumerate probe grids.
    pub fn frame_point(&self, frame_coords: &[f64]) -> Point {
        let y = Point::new(frame_coords.to_vec()).expect("finite frame coords");
        self.rotation.apply(&y).add(&self.translation)
    }

    pub fn translation(&self) -> &Point {
        &self.translation
    }
}

/// Slab of points whose projection on `axis` is within `half_width`
/// of level `lambda`.
#[derive(Clone, Debug)]
pub struct SlabRegion {
    pub lambda: f64,
    pub half_width: f64,
    axis: Point,
}

impl SlabRegion {
    pub fn new(lambda: f64, half_width: f64, axis: Point) -> Result<Self, GeometryError> {
        let axis = axis.normalized()?;
        if !(half_width >= 0.0) {
            return Err(GeometryError::BadHalfWidth);
        }
        Ok(SlabRegion {
            lambda,
            half_width,
            axis,
        })
    }

    /// Slab orthogonal to e1, the common case.
    pub fn along_first_axis(lambda: f64, half_width: f64, dim: usize) -> Self {
        SlabRegion::new(lambda, half_width, Point::unit(dim, 0)).expect("unit axis")
    }

    pub fn contains(&self, p: &Point) -> bool {
        (p.dot(&self.axis) - self.lambda).abs() <= self.half_width
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_membership_and_volume() {
        let b = BoxRegion::new(Point::from_slice(&[1.0, 2.0]), vec![2.0, 0.5]).unwrap();
        assert!(b.contains(&Point::from_slice(&[3.0, 2.5])));
        assert!(!b.contains(&Point::from_slice(&[3.1, 2.0])));
        assert_eq!(b.volume(), 4.0);
        assert_eq!(b.lo(0), -1.0);
        assert_eq!(b.hi(1), 2.5);
    }

    #[test]
    fn degenerate_box_allowed() {
        let b = BoxRegion::new(Point::from_slice(&[0.0, 0.0]), vec![1.0, 0.0]).unwrap();
        assert_eq!(b.volume(), 0.0);
        assert!(BoxRegion::new(Point::from_slice(&[0.0]), vec![-1.0]).is_err());
    }

    #[test]
    fn outer_shell_detection() {
        let b = BoxRegion::cube(Point::origin(2), 10.0).unwrap();
        assert!(!b.in_outer_shell(&Point::from_slice(&[9.0, 0.0]), 0.05));
        assert!(b.in_outer_shell(&Point::from_slice(&[9.9, 0.0]), 0.05));
        assert!(b.in_outer_shell(&Point::from_slice(&[0.0, -9.6]), 0.05));
    }

    #[test]
    fn cylinder_membership_rotated() {
        let target = Point::from_slice(&[0.0, 1.0]);
        let rot = RotationMap::rotate_e1_to(&target).unwrap();
        let cyl = CylinderRegion::new(4.0, 1.0, rot, Point::from_slice(&[0.0, 0.0])).unwrap();
        // Axis now points along e2.
        assert!(cyl.contains(&Point::from_slice(&[0.0, 3.9])));
        assert!(cyl.contains(&Point::from_slice(&[0.9, -3.0])));
        assert!(!cyl.contains(&Point::from_slice(&[0.0, 4.1])));
        assert!(!cyl.contains(&Point::from_slice(&[1.1, 0.0])));
    }

    #[test]
    fn slab_membership() {
        let s = SlabRegion::along_first_axis(5.0, 1.5, 2);
        assert!(s.contains(&Point::from_slice(&[6.4, 100.0])));
        assert!(!s.contains(&Point::from_slice(&[6.6, 0.0])));
        assert!(s.contains(&Point::from_slice(&[3.5, -2.0])));
    }
}

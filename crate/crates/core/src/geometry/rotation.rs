use super::{GeometryError, Point};

/// Angle in [0, pi] between a nonzero vector and the first axis.
pub fn theta(x: &Point) -> Result<f64, GeometryError> {
    let n = x.norm();
    if n == 0.0 {
        return Err(GeometryError::ZeroVector);
    }
    Ok((x.coords()[0] / n).clamp(-1.0, 1.0).acos())
}

/// Dense d x d orthogonal matrix that rotates e1 onto a target unit
/// direction inside the plane spanned by e1 and the target, fixing the
/// orthogonal complement of that plane.
#[derive(Clone, Debug)]
pub struct RotationMap {
    dim: usize,
    // row-major
    m: Vec<f64>,
}

impl RotationMap {
    pub fn identity(dim: usize) -> Self {
        let mut m = vec![0.0; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = 1.0;
        }
        RotationMap { dim, m }
    }

    /// Build the rotation carrying e1 to `target` (normalized internally).
    pub fn rotate_e1_to(target: &Point) -> Result<Self, GeometryError> {
        let dim = target.dim();
        if dim < 2 {
            return Err(GeometryError::BadDimension(dim));
        }
        let u = target.normalized()?;
        let c = u.coords()[0];
        // Transverse part of u; taken directly from the coordinates, so
        // its direction stays accurate even when the norm is tiny.
        let mut w = u.coords().to_vec();
        w[0] = 0.0;
        let s = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if s == 0.0 {
            if c > 0.0 {
                return Ok(RotationMap::identity(dim));
            }
            // target is exactly -e1: half-turn in the (e1, e2) plane.
            let mut r = RotationMap::identity(dim);
            r.m[0] = -1.0;
            r.m[dim + 1] = -1.0;
            return Ok(r);
        }
        for x in &mut w {
            *x /= s;
        }
        // In-plane rotation over the orthonormal pair (e1, w):
        //   R = I + (c-1)(e1 e1^T + w w^T) + s (w e1^T - e1 w^T).
        let mut m = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let mut v = if i == j { 1.0 } else { 0.0 };
                if i == 0 && j == 0 {
                    v += c - 1.0;
                }
                v += (c - 1.0) * w[i] * w[j];
                if j == 0 {
                    v += s * w[i];
                }
                if i == 0 {
                    v -= s * w[j];
                }
                m[i * dim + j] = v;
            }
        }
        Ok(RotationMap { dim, m })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, x: &Point) -> Point {
        debug_assert_eq!(x.dim(), self.dim);
        let mut out = vec![0.0; self.dim];
        for i in 0..self.dim {
            let row = &self.m[i * self.dim..(i + 1) * self.dim];
            out[i] = row.iter().zip(x.coords()).map(|(a, b)| a * b).sum();
        }
        Point::new(out).expect("rotation of finite point is finite")
    }

    /// Apply the inverse rotation (the transpose).
    pub fn apply_inverse(&self, x: &Point) -> Point {
        debug_assert_eq!(x.dim(), self.dim);
        let mut out = vec![0.0; self.dim];
        for j in 0..self.dim {
            let mut acc = 0.0;
            for i in 0..self.dim {
                acc += self.m[i * self.dim + j] * x.coords()[i];
            }
            out[j] = acc;
        }
        Point::new(out).expect("rotation of finite point is finite")
    }

    /// Max-abs entry of M^T M - I; orthogonality defect for diagnostics.
    pub fn orthogonality_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0.0;
                for k in 0..d {
                    acc += self.m[k * d + i] * self.m[k * d + j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - target).abs());
            }
        }
        worst
    }
}

/// The shrink factor a / (|sin t| b + |cos t| a) such that
/// factor * B_{a,b} fits inside the rotation (by angle `t`) of the
/// cylinder B_{a,b} = {|x1| <= a, ||x2..|| <= b}, b >= a > 0.
///
/// In the plane the containment holds for every angle and the factor is
/// optimal (the corner of the box attains it). In dimension >= 3 the
/// out-of-plane transverse component is not shrunk by the rotation, and
/// the containment additionally requires (b/a)^2 to be at least the
/// golden ratio (b/a >= 1.2721...); elongated cylinders, which is what
/// rotated-box covering arguments use, satisfy this with a wide margin.
/// See `containment_needs_elongation_in_3d` for the boundary case.
pub fn rotation_containment_factor(a: f64, b: f64, t: f64) -> f64 {
    assert!(a > 0.0 && b >= a, "requires b >= a > 0");
    a / (t.sin().abs() * b + t.cos().abs() * a)
}

/// Aspect ratio b/a above which `rotation_containment_factor` certifies
/// containment for every rotation angle in every dimension.
pub const CONTAINMENT_SAFE_ASPECT: f64 = 1.2720196495140689;

use crate::geodesic::GeodesicSolver;
use crate::geometry::{ModelParams, Point};
use crate::poisson::PoissonSample;

use super::scale::{DerivedScales, ScaleFunction};
use super::EstimatorError;

/// Finite-grid lower-bound proxy for the sup of |T(x,y) - T(x',y')| over
/// the cylinder pair at scale n: max minus min of T over all grid-point
/// pairs, reported in units of psi(n).
#[derive(Clone, Debug)]
pub struct ProbeResult {
    pub n: u64,
    pub k: u32,
    pub psi_n: f64,
    pub max_diff: f64,
    pub ratio_to_psi: f64,
    pub grid_per_cylinder: usize,
    pub pairs_evaluated: usize,
    pub t_min: f64,
    pub t_max: f64,
}

/// Probe the passage-time spread between the cylinder at the origin and
/// its translate by n e1. The cylinder transverse radius is the u-scale
/// at iterate level k; both cylinders must fit inside the sample box.
/// Grid points are the cylinder corners, face centers and a
/// `grid_resolution`^d interior lattice (in inscribed-box coordinates).
pub fn box_pair_sup_probe(
    sample: &PoissonSample,
    n: u64,
    k: u32,
    psi: &ScaleFunction,
    params: &ModelParams,
    grid_resolution: usize,
    alpha: f64,
) -> Result<ProbeResult, EstimatorError> {
    let nf = n as f64;
    let dim = params.d;
    let scales = DerivedScales::new(psi.clone(), k, *params)?;
    let psi_n = psi.eval(nf);
    let transverse = scales.u(nf)?;
    let base = cylinder_grid(dim, psi_n, transverse, grid_resolution);
    let shift = Point::unit(dim, 0).scale(nf);
    let grid1: Vec<Point> = base.clone();
    let grid2: Vec<Point> = base.iter().map(|p| p.add(&shift)).collect();
    for p in grid1.iter().chain(&grid2) {
        if !sample.bounds().contains(p) {
            return Err(EstimatorError::CylinderOutsideBox);
        }
    }
    let mut solver = GeodesicSolver::new(sample, alpha)?;
    let mut t_min = f64::INFINITY;
    let mut t_max = f64::NEG_INFINITY;
    let mut pairs = 0usize;
    for x in &grid1 {
        let geos = solver.solve_multi(x, &grid2)?;
        for g in geos {
            t_min = t_min.min(g.total);
            t_max = t_max.max(g.total);
            pairs += 1;
        }
    }
    let max_diff = t_max - t_min;
    Ok(ProbeResult {
        n,
        k,
        psi_n,
        max_diff,
        ratio_to_psi: max_diff / psi_n,
        grid_per_cylinder: grid1.len(),
        pairs_evaluated: pairs,
        t_min,
        t_max,
    })
}

/// Corner, face-center and interior lattice points of the box
/// [-a, a] x [-b', b']^(d-1) inscribed in the cylinder
/// {|x1| <= a, |x2..| <= b}, with b' = b / sqrt(d - 1).
fn cylinder_grid(dim: usize, a: f64, b: f64, resolution: usize) -> Vec<Point> {
    let bt = b / ((dim - 1) as f64).sqrt();
    let mut half = vec![bt; dim];
    half[0] = a;
    let mut pts = Vec::new();
    // corners
    for mask in 0..(1usize << dim) {
        let coords: Vec<f64> = (0..dim)
            .map(|i| {
                if mask & (1 << i) != 0 {
                    half[i]
                } else {
                    -half[i]
                }
            })
            .collect();
        pts.push(Point::new(coords).expect("finite corner"));
    }
    // face centers
    for axis in 0..dim {
        for sign in [-1.0, 1.0] {
            let mut coords = vec![0.0; dim];
            coords[axis] = sign * half[axis];
            pts.push(Point::new(coords).expect("finite face center"));
        }
    }
    // interior lattice at cell centers
    let mut idx = vec![0usize; dim];
    if resolution > 0 {
        loop {
            let coords: Vec<f64> = (0..dim)
                .map(|i| -half[i] + (2.0 * half[i]) * (idx[i] as f64 + 0.5) / resolution as f64)
                .collect();
            pts.push(Point::new(coords).expect("finite lattice point"));
            let mut axis = dim;
            let done = loop {
                if axis == 0 {
                    break true;
                }
                axis -= 1;
                if idx[axis] + 1 < resolution {
                    idx[axis] += 1;
                    for a in axis + 1..dim {
                        idx[a] = 0;
                    }
                    break false;
                }
            };
            if done {
                break;
            }
        }
    }
    // dedupe exact coincidences (resolution 1 center == some face layouts)
    pts.sort_by(|p, q| p.lex_cmp(q));
    pts.dedup_by(|p, q| p.coords() == q.coords());
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{derive_constants, BoxRegion};
    use crate::poisson::{sample_poisson, SeedPolicy};

    #[test]
    fn grid_contains_corners_faces_interior() {
        let pts = cylinder_grid(2, 4.0, 1.0, 2);
        // 4 corners + 4 face centers + 4 interior for d = 2, res = 2.
        assert_eq!(pts.len(), 12);
        assert!(pts.iter().all(|p| p.coords()[0].abs() <= 4.0 + 1e-12));
        assert!(pts.iter().all(|p| p.coords()[1].abs() <= 1.0 + 1e-12));
    }

    #[test]
    fn probe_on_crafted_grid_matches_enumeration() {
        // Sample with enough structure for four distinct entry points.
        let params = derive_constants(2, 1.5, 0.4).unwrap();
        let bounds = BoxRegion::new(Point::from_slice(&[16.0, 0.0]), vec![40.0, 40.0]).unwrap();
        let sample = sample_poisson(&bounds, 1.0, SeedPolicy::new(3, 3)).unwrap();
        let psi = ScaleFunction::sqrt();
        let res = box_pair_sup_probe(&sample, 32, 2, &psi, &params, 1, 1.5).unwrap();
        assert!(res.max_diff >= 0.0);
        assert!(res.ratio_to_psi >= 0.0);
        assert_eq!(
            res.pairs_evaluated,
            res.grid_per_cylinder * res.grid_per_cylinder
        );
        // Direct re-evaluation of min and max over the same grid.
        let mut solver = GeodesicSolver::new(&sample, 1.5).unwrap();
        let base = cylinder_grid(
            2,
            psi.eval(32.0),
            {
                let scales = DerivedScales::new(psi.clone(), 2, params).unwrap();
                scales.u(32.0).unwrap()
            },
            1,
        );
        let shift = Point::from_slice(&[32.0, 0.0]);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for x in &base {
            for y in &base {
                let t = solver.solve(x, &y.add(&shift)).unwrap().total;
                lo = lo.min(t);
                hi = hi.max(t);
            }
        }
        assert!((res.max_diff - (hi - lo)).abs() <= 1e-9 * (hi - lo).max(1.0));
    }

    #[test]
    fn cylinder_outside_box_rejected() {
        let params = derive_constants(2, 1.5, 0.4).unwrap();
        let bounds = BoxRegion::cube(Point::origin(2), 5.0).unwrap();
        let sample = sample_poisson(&bounds, 1.0, SeedPolicy::new(4, 4)).unwrap();
        let res = box_pair_sup_probe(&sample, 64, 2, &ScaleFunction::sqrt(), &params, 1, 1.5);
        assert!(matches!(res, Err(EstimatorError::CylinderOutsideBox)));
    }
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geodesic::GeodesicSolver;
use crate::geometry::{dist_max, BoxRegion, ModelParams, Point, Segment};
use crate::poisson::{largest_empty_ball_radius, sample_poisson, splitmix64, SeedPolicy};

use super::record::{RecordFlags, ReplicateRecord};
use super::scale::{DerivedScales, ScaleFunction};
use super::wander::{slab_deviation_of_path, slab_lambdas};

/// Boundary-bias control for the sample box around a segment of length n:
/// the box is the segment inflated longitudinally by `longitudinal_pad * n`
/// on each side and transversely to half-width
/// max(wander_coeff * n^(3/4) * (1 + ln n), entry_coeff * psi(n)^(1/alpha)),
/// sized so that geodesics and their entry points essentially never feel
/// the boundary; the residual is quantified by the shell flag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PaddingPolicy {
    pub longitudinal_pad: f64,
    pub wander_coeff: f64,
    pub entry_coeff: f64,
}

impl Default for PaddingPolicy {
    fn default() -> Self {
        PaddingPolicy {
            longitudinal_pad: 0.25,
            wander_coeff: 8.0,
            entry_coeff: 4.0,
        }
    }
}

impl PaddingPolicy {
    pub fn transverse_half_width(&self, n: f64, psi_n: f64, alpha: f64) -> f64 {
        let wander = self.wander_coeff * n.powf(0.75) * (1.0 + n.ln().max(0.0));
        let entry = self.entry_coeff * psi_n.max(0.0).powf(1.0 / alpha);
        wander.max(entry)
    }

    /// Axis-aligned bounding box of the padded cylinder around a -> b.
    pub fn sample_box(
        &self,
        a: &Point,
        b: &Point,
        psi_n: f64,
        alpha: f64,
    ) -> Result<BoxRegion, crate::geometry::GeometryError> {
        let diff = b.sub(a);
        let n = diff.norm();
        let dim = a.dim();
        let mid = a.add(b).scale(0.5);
        if n == 0.0 {
            return BoxRegion::new(mid, vec![1.0; dim]);
        }
        let u = diff.scale(1.0 / n);
        let long_half = n / 2.0 + self.longitudinal_pad * n;
        let trans_half = self.transverse_half_width(n, psi_n, alpha);
        let half_widths: Vec<f64> = (0..dim)
            .map(|i| {
                let ui = u.coords()[i];
                long_half * ui.abs() + trans_half * (1.0 - ui * ui).max(0.0).sqrt()
            })
            .collect();
        BoxRegion::new(mid, half_widths)
    }
}

/// Everything needed to measure one replicate of T(0, n u) and its path
/// statistics.
#[derive(Clone, Debug)]
pub struct MeasureSpec {
    pub params: ModelParams,
    pub psi: ScaleFunction,
    /// Iterate level for the slab-level range (phi = log^(k-1)).
    pub k: u32,
    pub intensity: f64,
    pub padding: PaddingPolicy,
    pub lambda_count: usize,
    /// Unit direction of the segment; e1 when None.
    pub direction: Option<Point>,
}

impl MeasureSpec {
    pub fn new(params: ModelParams, psi: ScaleFunction, k: u32) -> Self {
        MeasureSpec {
            params,
            psi,
            k,
            intensity: 1.0,
            padding: PaddingPolicy::default(),
            lambda_count: 5,
            direction: None,
        }
    }

    fn direction_vector(&self) -> Point {
        match &self.direction {
            Some(u) => u.normalized().expect("non-zero direction"),
            None => Point::unit(self.params.d, 0),
        }
    }

    /// Stream label so distinct directions decorrelate.
    fn direction_label(&self) -> u64 {
        let u = self.direction_vector();
        u.coords()
            .iter()
            .fold(0u64, |acc, c| splitmix64(acc ^ c.to_bits()))
    }
}

/// Run one replicate: sample, solve the geodesic of the length-n segment,
/// and extract T_n, wandering, slab deviations and diagnostic flags.
/// Sampling or solver failures yield a flagged record, never a panic.
pub fn measure_one(
    spec: &MeasureSpec,
    n: u64,
    replicate_index: u64,
    master_seed: u64,
) -> ReplicateRecord {
    let seed_policy = SeedPolicy::new(master_seed, replicate_index);
    let seed = seed_policy.derive(&[n, spec.direction_label()]);
    let nf = n as f64;
    let psi_n = spec.psi.eval(nf);
    let alpha = spec.params.alpha;
    let dim = spec.params.d;
    let u = spec.direction_vector();
    let a = Point::origin(dim);
    let b = u.scale(nf);

    let failed = |flags: RecordFlags| ReplicateRecord {
        n,
        replicate_index,
        seed,
        t_n: None,
        wandering: None,
        slab: Vec::new(),
        flags,
    };
    let fail_flags = RecordFlags {
        failed: true,
        ..Default::default()
    };

    let bounds = match spec.padding.sample_box(&a, &b, psi_n, alpha) {
        Ok(bx) => bx,
        Err(_) => return failed(fail_flags),
    };
    let sample = match sample_poisson(&bounds, spec.intensity, SeedPolicy::new(seed, 0)) {
        Ok(s) if !s.is_empty() => s,
        _ => return failed(fail_flags),
    };
    let mut solver = match GeodesicSolver::new(&sample, alpha) {
        Ok(s) => s,
        Err(_) => return failed(fail_flags),
    };
    let geo = match solver.solve(&a, &b) {
        Ok(g) => g,
        Err(_) => return failed(fail_flags),
    };

    let segment = Segment::new(a.clone(), b.clone());
    let wandering = dist_max(&geo.path, &segment).unwrap_or(0.0);

    let scales =
        DerivedScales::new(spec.psi.clone(), spec.k, spec.params).expect("k >= 1 by construction");
    let lambdas = slab_lambdas(&scales, nf, spec.lambda_count);
    let slab: Vec<(f64, Option<f64>)> = lambdas
        .into_iter()
        .map(|lambda| {
            (
                lambda,
                slab_deviation_of_path(&geo.path, &segment, &u, lambda, psi_n),
            )
        })
        .collect();

    let f_n_violated = f_n_check(&sample, &a, &b, psi_n, alpha, &spec.padding);

    ReplicateRecord {
        n,
        replicate_index,
        seed,
        t_n: Some(geo.total),
        wandering: Some(wandering),
        slab,
        flags: RecordFlags {
            failed: false,
            touched_boundary: geo.touched_boundary,
            f_n_violated,
        },
    }
}

/// Empty-ball diagnostic on the corridor the geodesic lives in: flags the
/// replicate when a grid scan already certifies a hole larger than
/// psi(n)^(1/alpha). The scan corridor is transversely capped at
/// psi(n) + sqrt(n * psi(n)), the scale the slab statistics live on.
fn f_n_check(
    sample: &crate::poisson::PoissonSample,
    a: &Point,
    b: &Point,
    psi_n: f64,
    alpha: f64,
    padding: &PaddingPolicy,
) -> bool {
    let threshold = psi_n.max(0.0).powf(1.0 / alpha);
    if threshold <= 0.0 {
        return false;
    }
    let diff = b.sub(a);
    let n = diff.norm();
    if n == 0.0 {
        return false;
    }
    let dim = a.dim();
    let u = diff.scale(1.0 / n);
    let trans = (psi_n + (n * psi_n).sqrt()).min(padding.transverse_half_width(n, psi_n, alpha));
    let long_half = n / 2.0 + padding.longitudinal_pad * n;
    let mid = a.add(b).scale(0.5);
    let half_widths: Vec<f64> = (0..dim)
        .map(|i| {
            let ui = u.coords()[i];
            long_half * ui.abs() + trans * (1.0 - ui * ui).max(0.0).sqrt()
        })
        .collect();
    let region = match BoxRegion::new(mid, half_widths) {
        Ok(r) => r,
        Err(_) => return false,
    };
    match largest_empty_ball_radius(sample, &region, threshold / 2.0) {
        Ok(est) => est.radius > threshold,
        Err(_) => false,
    }
}

/// All replicates of a grid, embarrassingly parallel over
/// (n, replicate_index) with counter-based seeds; the output is sorted by
/// that key, so it is identical for any worker count.
pub fn run_grid(
    spec: &MeasureSpec,
    n_grid: &[u64],
    replicates: u64,
    master_seed: u64,
) -> Vec<ReplicateRecord> {
    let mut jobs: Vec<(u64, u64)> = Vec::with_capacity(n_grid.len() * replicates as usize);
    for &n in n_grid {
        for r in 0..replicates {
            jobs.push((n, r));
        }
    }
    let mut records: Vec<ReplicateRecord> = jobs
        .par_iter()
        .map(|&(n, r)| measure_one(spec, n, r, master_seed))
        .collect();
    records.sort_by_key(|r| r.sort_key());
    records
}

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::geometry::Point;
use crate::poisson::{grid_dist_sq, grid_lex_less, PoissonSample};

use super::prune::{domination_ratio, ConeRule};
use super::{edge_cost_sq, Geodesic, GeodesicError, BOUNDARY_SHELL_FRACTION};

const NO_NODE: u32 = u32::MAX;

/// Heap key ordered by (cost, hops, node); the node index is the final,
/// canonical tie-break so runs are deterministic.
#[derive(PartialEq)]
struct HeapKey {
    cost: f64,
    hops: u32,
    node: u32,
}

impl Eq for HeapKey {}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then_with(|| self.hops.cmp(&other.hops))
            .then_with(|| self.node.cmp(&other.node))
    }
}

struct Scratch {
    dist: Vec<f64>,
    hops: Vec<u32>,
    pred: Vec<u32>,
    settled: Vec<bool>,
    touched: Vec<u32>,
    heap: BinaryHeap<Reverse<HeapKey>>,
    sector_d2: Vec<f64>,
    sector_cut2: Vec<f64>,
}

impl Scratch {
    fn new(n: usize, sectors: usize) -> Self {
        Scratch {
            dist: vec![f64::INFINITY; n],
            hops: vec![0; n],
            pred: vec![NO_NODE; n],
            settled: vec![false; n],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
            sector_d2: vec![f64::INFINITY; sectors],
            sector_cut2: vec![f64::INFINITY; sectors],
        }
    }

    fn reset(&mut self) {
        for &i in &self.touched {
            let i = i as usize;
            self.dist[i] = f64::INFINITY;
            self.hops[i] = 0;
            self.pred[i] = NO_NODE;
            self.settled[i] = false;
        }
        self.touched.clear();
        self.heap.clear();
    }

    /// Relax edge (from -> v) with new cost `nd`. Ties on cost prefer
    /// fewer hops, then the smaller predecessor index, keeping the
    /// solution unique and deterministic.
    #[inline]
    fn relax(&mut self, v: u32, nd: f64, nh: u32, from: u32) {
        let vi = v as usize;
        let cur = self.dist[vi];
        let better = nd < cur
            || (nd == cur && (nh < self.hops[vi] || (nh == self.hops[vi] && from < self.pred[vi])));
        if better {
            if cur.is_infinite() {
                self.touched.push(v);
            }
            self.dist[vi] = nd;
            self.hops[vi] = nh;
            self.pred[vi] = from;
            self.heap.push(Reverse(HeapKey {
                cost: nd,
                hops: nh,
                node: v,
            }));
        }
    }
}

/// Dijkstra solver with lazy neighbor generation over the sample grid.
///
/// Two prunes bound the work, neither of which can discard a needed
/// edge:
///  - budget: with B an upper bound on the total to every remaining
///    target (seeded by an explicit greedy path), an edge with
///    d(u) + w > B cannot lie on an improving path;
///  - domination: an edge long enough that an already-seen sample point
///    yields a two-hop replacement of no greater cost is skipped
///    (cone-witness rule in 2-D, a global empty-ball bound otherwise).
///
/// Scratch state is reused across solves on the same sample; resets are
/// sparse (only touched nodes), so repeated queries stay cheap.
pub struct GeodesicSolver<'a> {
    sample: &'a PoissonSample,
    alpha: f64,
    cone: Option<ConeRule>,
    hole_cap: Option<f64>,
    scratch: Scratch,
}

impl<'a> GeodesicSolver<'a> {
    pub fn new(sample: &'a PoissonSample, alpha: f64) -> Result<Self, GeodesicError> {
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(GeodesicError::BadAlpha(alpha));
        }
        let cone = if sample.dim() == 2 {
            ConeRule::for_alpha(alpha)
        } else {
            None
        };
        let sectors = cone.as_ref().map(|c| c.count).unwrap_or(0);
        Ok(GeodesicSolver {
            sample,
            alpha,
            cone,
            hole_cap: None,
            scratch: Scratch::new(sample.len(), sectors),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Optimal geodesic between the sample points nearest to x and y.
    pub fn solve(&mut self, x: &Point, y: &Point) -> Result<Geodesic, GeodesicError> {
        self.check_endpoint(x, 0)?;
        self.check_endpoint(y, 1)?;
        let qx = self.sample.nearest_index(x)?;
        let qy = self.sample.nearest_index(y)?;
        // Canonical orientation: always search from the lexicographically
        // smaller entry point, making T(x, y) and T(y, x) the same
        // computation bit for bit.
        let swap = grid_lex_less(
            self.sample.coords_of(qy as usize),
            self.sample.coords_of(qx as usize),
        );
        let (src, dst) = if swap { (qy, qx) } else { (qx, qy) };
        self.run(src, &[dst]);
        let mut path_idx = self.extract(src, dst);
        if swap {
            path_idx.reverse();
        }
        let total = self.scratch.dist[dst as usize];
        Ok(self.build_geodesic(&path_idx, total, x.clone(), y.clone()))
    }

    /// Geodesics from x to each of several targets in one search.
    pub fn solve_multi(&mut self, x: &Point, ys: &[Point]) -> Result<Vec<Geodesic>, GeodesicError> {
        self.check_endpoint(x, 0)?;
        for (i, y) in ys.iter().enumerate() {
            self.check_endpoint(y, i + 1)?;
        }
        let src = self.sample.nearest_index(x)?;
        let mut targets: Vec<u32> = Vec::with_capacity(ys.len());
        for y in ys {
            targets.push(self.sample.nearest_index(y)?);
        }
        let mut unique = targets.clone();
        unique.sort_unstable();
        unique.dedup();
        self.run(src, &unique);
        let mut out = Vec::with_capacity(ys.len());
        for (y, &t) in ys.iter().zip(&targets) {
            let path_idx = self.extract(src, t);
            let total = self.scratch.dist[t as usize];
            out.push(self.build_geodesic(&path_idx, total, x.clone(), y.clone()));
        }
        Ok(out)
    }

    fn check_endpoint(&self, p: &Point, index: usize) -> Result<(), GeodesicError> {
        if p.dim() != self.sample.dim() {
            return Err(GeodesicError::Geometry(
                crate::geometry::GeometryError::DimensionMismatch {
                    expected: self.sample.dim(),
                    got: p.dim(),
                },
            ));
        }
        if !self.sample.bounds().contains(p) {
            return Err(GeodesicError::EndpointOutsideBox { index });
        }
        Ok(())
    }

    fn build_geodesic(&self, path_idx: &[u32], total: f64, x: Point, y: Point) -> Geodesic {
        let bounds = self.sample.bounds();
        let mut touched_boundary = false;
        let mut max_edge = 0.0f64;
        let mut path = Vec::with_capacity(path_idx.len());
        for (k, &i) in path_idx.iter().enumerate() {
            let c = self.sample.coords_of(i as usize);
            if k > 0 {
                let prev = self.sample.coords_of(path_idx[k - 1] as usize);
                max_edge = max_edge.max(grid_dist_sq(prev, c).sqrt());
            }
            let pt = self.sample.point(i as usize);
            if bounds.in_outer_shell(&pt, BOUNDARY_SHELL_FRACTION) {
                touched_boundary = true;
            }
            path.push(pt);
        }
        Geodesic {
            path,
            total,
            max_edge,
            x,
            y,
            touched_boundary,
        }
    }

    fn run(&mut self, src: u32, targets: &[u32]) {
        self.scratch.reset();
        let alpha = self.alpha;
        let ubs: Vec<f64> = targets
            .iter()
            .map(|&t| self.greedy_upper_bound(src, t))
            .collect();
        let hole_cap = if self.sample.dim() != 2 || self.cone.is_none() {
            self.hole_cap_radius()
        } else {
            f64::INFINITY
        };
        let mut remaining = targets.len();
        self.scratch.dist[src as usize] = 0.0;
        self.scratch.touched.push(src);
        self.scratch.heap.push(Reverse(HeapKey {
            cost: 0.0,
            hops: 0,
            node: src,
        }));
        while let Some(Reverse(HeapKey { cost, hops, node })) = self.scratch.heap.pop() {
            if self.scratch.settled[node as usize] {
                continue;
            }
            self.scratch.settled[node as usize] = true;
            if targets.contains(&node) {
                remaining -= 1;
                if remaining == 0 {
                    break;
                }
            }
            let budget = targets
                .iter()
                .zip(&ubs)
                .map(|(&t, &ub)| ub.min(self.scratch.dist[t as usize]))
                .fold(0.0f64, f64::max);
            if cost > budget {
                break;
            }
            // Tiny relative slack: the radius goes through powf and a
            // squaring, so an optimal edge hitting the budget exactly
            // could otherwise miss by an ulp. Admission is still gated by
            // the exact nd <= budget fold comparison.
            let r_budget = (budget - cost).powf(1.0 / alpha) * (1.0 + 1e-9) + 1e-12;
            if self.cone.is_some() {
                self.relax_2d(node, cost, hops, r_budget, budget);
            } else {
                self.relax_generic(node, cost, hops, r_budget.min(hole_cap), budget);
            }
        }
    }

    fn relax_2d(&mut self, u: u32, cost: f64, hops: u32, r_budget: f64, budget: f64) {
        let alpha = self.alpha;
        let cone = self.cone.as_ref().expect("2-D cone rule present").clone();
        let inv_t2 = 1.0 / (cone.t_max * cone.t_max);
        let sample = self.sample;
        let coords = sample.flat_coords();
        let grid = sample.grid();
        let side = grid.side();
        let nx = grid.dims()[0] as isize;
        let ny = grid.dims()[1] as isize;
        let scratch = &mut self.scratch;
        for m in &mut scratch.sector_d2 {
            *m = f64::INFINITY;
        }
        for m in &mut scratch.sector_cut2 {
            *m = f64::INFINITY;
        }
        let mut unfilled = cone.count;
        let ux = coords[2 * u as usize];
        let uy = coords[2 * u as usize + 1];
        let cx = grid.axis_cell(0, ux) as isize;
        let cy = grid.axis_cell(1, uy) as isize;
        let r_bud2 = r_budget * r_budget;

        // A candidate is admitted when it clears the budget radius and is
        // not yet cone-dominated in its own sector; every point updates
        // its sector's nearest-witness distance first.
        macro_rules! visit_cell {
            ($cell_id:expr) => {{
                for i in grid.cell_range_by_id($cell_id) {
                    if i as u32 == u {
                        continue;
                    }
                    let dx = coords[2 * i] - ux;
                    let dy = coords[2 * i + 1] - uy;
                    let d2 = dx * dx + dy * dy;
                    let sector = cone.sector_of(dx, dy);
                    if d2 < scratch.sector_d2[sector] {
                        if scratch.sector_d2[sector].is_infinite() {
                            #[allow(unused_assignments)]
                            {
                                unfilled -= 1;
                            }
                        }
                        scratch.sector_d2[sector] = d2;
                        scratch.sector_cut2[sector] = d2 * inv_t2;
                    }
                    if d2 <= r_bud2 && d2 <= scratch.sector_cut2[sector] && !scratch.settled[i] {
                        let nd = cost + edge_cost_sq(d2, alpha);
                        if nd <= budget {
                            scratch.relax(i as u32, nd, hops + 1, u);
                        }
                    }
                }
            }};
        }

        // Phase A: expanding square rings until every sector has a
        // witness (or the budget radius is exhausted).
        let max_ring = (cx.max(nx - 1 - cx)).max(cy.max(ny - 1 - cy));
        let mut ring_done = 0isize;
        for ring in 0..=max_ring {
            if unfilled == 0 || (ring as f64 - 1.0).max(0.0) * side > r_budget {
                break;
            }
            let y_lo = (cy - ring).max(0);
            let y_hi = (cy + ring).min(ny - 1);
            for ycell in y_lo..=y_hi {
                if (ycell - cy).abs() == ring {
                    let x_lo = (cx - ring).max(0);
                    let x_hi = (cx + ring).min(nx - 1);
                    for xcell in x_lo..=x_hi {
                        visit_cell!(xcell as usize * ny as usize + ycell as usize);
                    }
                } else {
                    for xcell in [cx - ring, cx + ring] {
                        if xcell >= 0 && xcell < nx {
                            visit_cell!(xcell as usize * ny as usize + ycell as usize);
                        }
                    }
                }
            }
            ring_done = ring;
        }

        // Phase B: exact disc scan out to the frozen stopping radius,
        // skipping the phase-A square.
        let r_stop = if unfilled == 0 {
            let worst = scratch.sector_d2.iter().cloned().fold(0.0f64, f64::max);
            r_budget.min((worst * inv_t2).sqrt())
        } else {
            // Budget radius already exhausted in phase A.
            return;
        };
        let r_stop2 = r_stop * r_stop;
        let y_lo = grid.axis_cell(1, uy - r_stop) as isize;
        let y_hi = grid.axis_cell(1, uy + r_stop) as isize;
        for ycell in y_lo..=y_hi {
            let row_lo = grid.origin_of(1) + ycell as f64 * side;
            let row_hi = row_lo + side;
            let dy_min = (row_lo - uy).max(uy - row_hi).max(0.0);
            let w2 = r_stop2 - dy_min * dy_min;
            if w2 < 0.0 {
                continue;
            }
            let w = w2.sqrt();
            let x_lo = grid.axis_cell(0, ux - w) as isize;
            let x_hi = grid.axis_cell(0, ux + w) as isize;
            let in_a_rows = (ycell - cy).abs() <= ring_done;
            for xcell in x_lo..=x_hi {
                if in_a_rows && (xcell - cx).abs() <= ring_done {
                    continue;
                }
                visit_cell!(xcell as usize * ny as usize + ycell as usize);
            }
        }
    }

    fn relax_generic(&mut self, u: u32, cost: f64, hops: u32, radius: f64, budget: f64) {
        let alpha = self.alpha;
        let sample = self.sample;
        let dim = sample.dim();
        let coords = sample.flat_coords();
        let center: Vec<f64> = sample.coords_of(u as usize).to_vec();
        let lo: Vec<f64> = center.iter().map(|c| c - radius).collect();
        let hi: Vec<f64> = center.iter().map(|c| c + radius).collect();
        let r2 = radius * radius;
        let scratch = &mut self.scratch;
        sample.grid().for_each_in_aabb(&lo, &hi, |i| {
            if i as u32 == u || scratch.settled[i] {
                return;
            }
            let d2 = grid_dist_sq(&coords[i * dim..(i + 1) * dim], &center);
            if d2 <= r2 {
                let nd = cost + edge_cost_sq(d2, alpha);
                if nd <= budget {
                    scratch.relax(i as u32, nd, hops + 1, u);
                }
            }
        });
    }

    /// Radius beyond which every edge is dominated, from a coarse
    /// empty-ball bound: every ball of radius H + S sqrt(d)/2 centered in
    /// the box contains a sample point, where H is the worst distance
    /// from a supercell center (side S) to its nearest sample point.
    fn hole_cap_radius(&mut self) -> f64 {
        if let Some(r) = self.hole_cap {
            return r;
        }
        let sample = self.sample;
        let dim = sample.dim();
        let grid = sample.grid();
        let side = 2.0 * grid.side();
        let bounds = sample.bounds();
        let counts: Vec<usize> = (0..dim)
            .map(|a| (((bounds.hi(a) - bounds.lo(a)) / side).ceil() as usize).max(1))
            .collect();
        let coords = sample.flat_coords();
        let mut idx = vec![0usize; dim];
        let mut center = vec![0.0f64; dim];
        let mut worst = 0.0f64;
        'sweep: loop {
            for a in 0..dim {
                center[a] = bounds.lo(a) + (idx[a] as f64 + 0.5) * side;
            }
            match grid.nearest(coords, &center) {
                Some(i) => {
                    let d2 = grid_dist_sq(sample.coords_of(i as usize), &center);
                    worst = worst.max(d2.sqrt());
                }
                None => {
                    worst = f64::INFINITY;
                    break 'sweep;
                }
            }
            let mut axis = dim;
            loop {
                if axis == 0 {
                    break 'sweep;
                }
                axis -= 1;
                if idx[axis] + 1 < counts[axis] {
                    idx[axis] += 1;
                    for a in axis + 1..dim {
                        idx[a] = 0;
                    }
                    break;
                }
            }
        }
        let slack = side * (dim as f64).sqrt() / 2.0;
        let cap = (worst + slack) / domination_ratio(self.alpha);
        self.hole_cap = Some(cap);
        cap
    }

    /// Cost of an explicit greedy chain of hops toward the target; any
    /// valid path gives a sound budget.
    fn greedy_upper_bound(&self, src: u32, dst: u32) -> f64 {
        if src == dst {
            return 0.0;
        }
        let sample = self.sample;
        let dim = sample.dim();
        let coords = sample.flat_coords();
        let grid = sample.grid();
        let alpha = self.alpha;
        let target: Vec<f64> = sample.coords_of(dst as usize).to_vec();
        let direct = edge_cost_sq(grid_dist_sq(sample.coords_of(src as usize), &target), alpha);
        let step = grid.side().max(1e-9);
        let mut cur = src as usize;
        let mut total = 0.0f64;
        let start_gap = grid_dist_sq(sample.coords_of(src as usize), &target).sqrt();
        let max_hops = (4.0 * start_gap / step) as usize + 16;
        let mut probe = vec![0.0f64; dim];
        for _ in 0..max_hops {
            if cur == dst as usize {
                return total.min(direct);
            }
            let cc = sample.coords_of(cur);
            let gap2 = grid_dist_sq(cc, &target);
            let gap = gap2.sqrt();
            if gap <= 1.5 * step {
                total += edge_cost_sq(gap2, alpha);
                return total.min(direct);
            }
            let mut reach = step;
            let next = loop {
                if reach >= gap {
                    break dst as usize;
                }
                for a in 0..dim {
                    probe[a] = cc[a] + (target[a] - cc[a]) * (reach / gap);
                }
                if let Some(cand) = grid.nearest(coords, &probe) {
                    let cand = cand as usize;
                    if cand != cur && grid_dist_sq(sample.coords_of(cand), &target) < gap2 {
                        break cand;
                    }
                }
                reach *= 2.0;
            };
            total += edge_cost_sq(grid_dist_sq(cc, sample.coords_of(next)), alpha);
            cur = next;
        }
        if cur != dst as usize {
            total += edge_cost_sq(grid_dist_sq(sample.coords_of(cur), &target), alpha);
        }
        total.min(direct)
    }

    fn extract(&self, src: u32, dst: u32) -> Vec<u32> {
        let mut idx = Vec::new();
        let mut cur = dst;
        loop {
            idx.push(cur);
            if cur == src {
                break;
            }
            cur = self.scratch.pred[cur as usize];
            assert_ne!(cur, NO_NODE, "target unreachable: broken predecessor chain");
        }
        idx.reverse();
        idx
    }
}

/// One-shot solve; see [`GeodesicSolver`] for reuse across many queries.
pub fn geodesic(
    sample: &PoissonSample,
    x: &Point,
    y: &Point,
    alpha: f64,
) -> Result<Geodesic, GeodesicError> {
    GeodesicSolver::new(sample, alpha)?.solve(x, y)
}

/// One-shot multi-target solve from a common source.
pub fn geodesic_multi(
    sample: &PoissonSample,
    x: &Point,
    ys: &[Point],
    alpha: f64,
) -> Result<Vec<Geodesic>, GeodesicError> {
    GeodesicSolver::new(sample, alpha)?.solve_multi(x, ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::{brute_force_geodesic, exhaustive_geodesic, path_time};
    use crate::geometry::BoxRegion;
    use crate::poisson::{sample_poisson, SeedPolicy};
    use crate::stats::rel_close;
    use rand::{Rng, SeedableRng};
    use rand_pcg::Pcg64Mcg;

    fn crafted(points: &[[f64; 2]]) -> PoissonSample {
        let pts: Vec<Point> = points.iter().map(|c| Point::from_slice(c)).collect();
        let bounds = BoxRegion::cube(Point::origin(2), 50.0).unwrap();
        PoissonSample::from_points(&pts, bounds, 1.0, 0).unwrap()
    }

    #[test]
    fn collinear_goes_through_middle() {
        let s = crafted(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
        let g = geodesic(
            &s,
            &Point::from_slice(&[0.0, 0.0]),
            &Point::from_slice(&[2.0, 0.0]),
            2.0,
        )
        .unwrap();
        assert_eq!(g.path.len(), 3);
        assert_eq!(g.total, 2.0);
        assert_eq!(g.max_edge, 1.0);
    }

    #[test]
    fn two_points_take_direct_edge() {
        let s = crafted(&[[0.0, 0.0], [2.0, 0.0]]);
        let g = geodesic(
            &s,
            &Point::from_slice(&[0.0, 0.0]),
            &Point::from_slice(&[2.0, 0.0]),
            2.0,
        )
        .unwrap();
        assert_eq!(g.path.len(), 2);
        assert_eq!(g.total, 4.0);
    }

    #[test]
    fn same_entry_point_costs_zero() {
        let s = crafted(&[[0.0, 0.0], [9.0, 9.0]]);
        let g = geodesic(
            &s,
            &Point::from_slice(&[0.1, 0.0]),
            &Point::from_slice(&[-0.1, 0.0]),
            2.0,
        )
        .unwrap();
        assert_eq!(g.total, 0.0);
        assert_eq!(g.path.len(), 1);
    }

    #[test]
    fn endpoint_outside_box_rejected() {
        let s = crafted(&[[0.0, 0.0], [2.0, 0.0]]);
        let far = Point::from_slice(&[1000.0, 0.0]);
        assert!(matches!(
            geodesic(&s, &far, &Point::from_slice(&[0.0, 0.0]), 2.0),
            Err(GeodesicError::EndpointOutsideBox { index: 0 })
        ));
    }

    #[test]
    fn empty_sample_rejected() {
        let bounds = BoxRegion::cube(Point::origin(2), 1.0).unwrap();
        let s = PoissonSample::from_points(&[], bounds, 1.0, 0).unwrap();
        assert!(geodesic(&s, &Point::origin(2), &Point::origin(2), 2.0).is_err());
    }

    #[test]
    fn symmetry_is_bit_exact() {
        let bounds = BoxRegion::cube(Point::origin(2), 15.0).unwrap();
        let s = sample_poisson(&bounds, 1.0, SeedPolicy::new(99, 0)).unwrap();
        let a = Point::from_slice(&[-10.0, -7.0]);
        let b = Point::from_slice(&[11.0, 8.0]);
        let t_ab = geodesic(&s, &a, &b, 1.5).unwrap().total;
        let t_ba = geodesic(&s, &b, &a, 1.5).unwrap().total;
        assert_eq!(t_ab.to_bits(), t_ba.to_bits());
    }

    #[test]
    fn totals_recomputable_from_path() {
        let bounds = BoxRegion::cube(Point::origin(2), 12.0).unwrap();
        let s = sample_poisson(&bounds, 1.0, SeedPolicy::new(5, 1)).unwrap();
        let g = geodesic(
            &s,
            &Point::from_slice(&[-10.0, 0.0]),
            &Point::from_slice(&[10.0, 0.0]),
            1.5,
        )
        .unwrap();
        let recomputed = path_time(&g.path, 1.5).unwrap();
        assert!(rel_close(recomputed, g.total, 1e-12));
    }

    #[test]
    fn pruned_matches_brute_force_small_battery() {
        let mut rng = Pcg64Mcg::seed_from_u64(2024);
        for &(d, alpha) in &[
            (2usize, 1.5f64),
            (2, 2.0),
            (2, 3.0),
            (3, 1.5),
            (3, 2.0),
            (3, 3.0),
        ] {
            for trial in 0..30 {
                let half = 4.0 + rng.gen::<f64>() * 2.0;
                let bounds = BoxRegion::cube(Point::origin(d), half).unwrap();
                let s =
                    sample_poisson(&bounds, 0.5, SeedPolicy::new(1000 + trial, d as u64)).unwrap();
                if s.len() < 2 {
                    continue;
                }
                let x = random_in(&mut rng, &bounds);
                let y = random_in(&mut rng, &bounds);
                let fast = geodesic(&s, &x, &y, alpha).unwrap();
                let slow = brute_force_geodesic(&s, &x, &y, alpha).unwrap();
                assert!(
                    rel_close(fast.total, slow.total, 1e-12),
                    "d={d} alpha={alpha} trial={trial}: {} vs {}",
                    fast.total,
                    slow.total
                );
            }
        }
    }

    #[test]
    fn dijkstra_matches_exhaustive_tiny_battery() {
        let mut rng = Pcg64Mcg::seed_from_u64(77);
        for trial in 0..40 {
            let bounds = BoxRegion::cube(Point::origin(2), 3.0).unwrap();
            let n = 3 + (trial % 7) as usize;
            let pts: Vec<Point> = (0..n)
                .map(|_| {
                    Point::from_slice(&[rng.gen::<f64>() * 6.0 - 3.0, rng.gen::<f64>() * 6.0 - 3.0])
                })
                .collect();
            let s = PoissonSample::from_points(&pts, bounds, 1.0, trial).unwrap();
            let x = random_in(&mut rng, s.bounds());
            let y = random_in(&mut rng, s.bounds());
            let a = brute_force_geodesic(&s, &x, &y, 2.0).unwrap();
            let b = exhaustive_geodesic(&s, &x, &y, 2.0).unwrap();
            assert!(rel_close(a.total, b.total, 1e-12), "trial {trial}");
            let c = geodesic(&s, &x, &y, 2.0).unwrap();
            assert!(rel_close(c.total, b.total, 1e-12), "trial {trial} pruned");
        }
    }

    #[test]
    fn multi_target_matches_single_solves() {
        let bounds = BoxRegion::cube(Point::origin(2), 14.0).unwrap();
        let s = sample_poisson(&bounds, 1.0, SeedPolicy::new(31, 4)).unwrap();
        let x = Point::from_slice(&[-12.0, -12.0]);
        let ys = [
            Point::from_slice(&[12.0, 12.0]),
            Point::from_slice(&[12.0, -12.0]),
            Point::from_slice(&[0.0, 12.0]),
        ];
        let multi = geodesic_multi(&s, &x, &ys, 1.5).unwrap();
        for (y, g) in ys.iter().zip(&multi) {
            let single = geodesic(&s, &x, y, 1.5).unwrap();
            assert!(rel_close(single.total, g.total, 1e-12));
        }
    }

    fn random_in(rng: &mut Pcg64Mcg, bounds: &BoxRegion) -> Point {
        let coords: Vec<f64> = (0..bounds.dim())
            .map(|a| bounds.lo(a) + rng.gen::<f64>() * (bounds.hi(a) - bounds.lo(a)))
            .collect();
        Point::new(coords).unwrap()
    }
}

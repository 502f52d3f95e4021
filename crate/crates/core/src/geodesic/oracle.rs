use crate::geometry::Point;
use crate::poisson::{grid_dist_sq, PoissonSample};

use super::{edge_cost_sq, Geodesic, GeodesicError, BOUNDARY_SHELL_FRACTION};

/// Instance-size caps for the two oracles; these exist to keep test
/// batteries honest about what they can afford, not as tuning knobs.
pub const BRUTE_FORCE_CAP: usize = 2000;
pub const EXHAUSTIVE_CAP: usize = 9;

/// Unpruned complete-graph Dijkstra. Every pair of sample points is an
/// edge; no spatial reasoning at all. The reference the pruned solver is
/// certified against.
pub fn brute_force_geodesic(
    sample: &PoissonSample,
    x: &Point,
    y: &Point,
    alpha: f64,
) -> Result<Geodesic, GeodesicError> {
    if !(alpha > 1.0) {
        return Err(GeodesicError::BadAlpha(alpha));
    }
    let n = sample.len();
    if n > BRUTE_FORCE_CAP {
        return Err(GeodesicError::OracleTooLarge {
            n,
            cap: BRUTE_FORCE_CAP,
        });
    }
    if !sample.bounds().contains(x) {
        return Err(GeodesicError::EndpointOutsideBox { index: 0 });
    }
    if !sample.bounds().contains(y) {
        return Err(GeodesicError::EndpointOutsideBox { index: 1 });
    }
    let src = sample.nearest_index(x)? as usize;
    let dst = sample.nearest_index(y)? as usize;

    let mut dist = vec![f64::INFINITY; n];
    let mut hops = vec![0u32; n];
    let mut pred = vec![usize::MAX; n];
    let mut settled = vec![false; n];
    dist[src] = 0.0;
    loop {
        // Linear scan for the (cost, hops, index)-smallest unsettled node.
        let mut u = usize::MAX;
        for i in 0..n {
            if settled[i] || dist[i].is_infinite() {
                continue;
            }
            if u == usize::MAX
                || dist[i] < dist[u]
                || (dist[i] == dist[u] && (hops[i] < hops[u] || (hops[i] == hops[u] && i < u)))
            {
                u = i;
            }
        }
        if u == usize::MAX {
            break;
        }
        settled[u] = true;
        if u == dst {
            break;
        }
        let cu = sample.coords_of(u);
        for v in 0..n {
            if settled[v] || v == u {
                continue;
            }
            let nd = dist[u] + edge_cost_sq(grid_dist_sq(cu, sample.coords_of(v)), alpha);
            let better = nd < dist[v]
                || (nd == dist[v]
                    && (hops[u] + 1 < hops[v] || (hops[u] + 1 == hops[v] && u < pred[v])));
            if better {
                dist[v] = nd;
                hops[v] = hops[u] + 1;
                pred[v] = u;
            }
        }
    }

    let mut idx = vec![dst];
    let mut cur = dst;
    while cur != src {
        cur = pred[cur];
        assert_ne!(cur, usize::MAX, "complete graph must reach the target");
        idx.push(cur);
    }
    idx.reverse();
    Ok(assemble(
        sample,
        &idx,
        dist[dst],
        x.clone(),
        y.clone(),
        alpha,
    ))
}

/// Exhaustive enumeration of every simple path between the entry points;
/// only for tiny instances. The strongest (and slowest) reference.
pub fn exhaustive_geodesic(
    sample: &PoissonSample,
    x: &Point,
    y: &Point,
    alpha: f64,
) -> Result<Geodesic, GeodesicError> {
    if !(alpha > 1.0) {
        return Err(GeodesicError::BadAlpha(alpha));
    }
    let n = sample.len();
    if n > EXHAUSTIVE_CAP {
        return Err(GeodesicError::OracleTooLarge {
            n,
            cap: EXHAUSTIVE_CAP,
        });
    }
    let src = sample.nearest_index(x)? as usize;
    let dst = sample.nearest_index(y)? as usize;

    struct Dfs<'s> {
        sample: &'s PoissonSample,
        alpha: f64,
        dst: usize,
        stack: Vec<usize>,
        visited: Vec<bool>,
        best_cost: f64,
        best_hops: usize,
        best_path: Vec<usize>,
    }
    impl Dfs<'_> {
        fn go(&mut self, u: usize, cost: f64) {
            if u == self.dst {
                let hops = self.stack.len() - 1;
                if cost < self.best_cost || (cost == self.best_cost && hops < self.best_hops) {
                    self.best_cost = cost;
                    self.best_hops = hops;
                    self.best_path = self.stack.clone();
                }
                return;
            }
            for v in 0..self.sample.len() {
                if self.visited[v] {
                    continue;
                }
                let w = edge_cost_sq(
                    grid_dist_sq(self.sample.coords_of(u), self.sample.coords_of(v)),
                    self.alpha,
                );
                self.visited[v] = true;
                self.stack.push(v);
                self.go(v, cost + w);
                self.stack.pop();
                self.visited[v] = false;
            }
        }
    }

    let mut dfs = Dfs {
        sample,
        alpha,
        dst,
        stack: vec![src],
        visited: vec![false; n],
        best_cost: f64::INFINITY,
        best_hops: usize::MAX,
        best_path: Vec::new(),
    };
    dfs.visited[src] = true;
    dfs.go(src, 0.0);
    let path = dfs.best_path.clone();
    Ok(assemble(
        sample,
        &path,
        dfs.best_cost,
        x.clone(),
        y.clone(),
        alpha,
    ))
}

fn assemble(
    sample: &PoissonSample,
    idx: &[usize],
    total: f64,
    x: Point,
    y: Point,
    alpha: f64,
) -> Geodesic {
    let _ = alpha;
    let bounds = sample.bounds();
    let mut max_edge = 0.0f64;
    let mut touched_boundary = false;
    let mut path = Vec::with_capacity(idx.len());
    for (k, &i) in idx.iter().enumerate() {
        if k > 0 {
            max_edge = max_edge
                .max(grid_dist_sq(sample.coords_of(idx[k - 1]), sample.coords_of(i)).sqrt());
        }
        let pt = sample.point(i);
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

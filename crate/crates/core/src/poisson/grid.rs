use crate::geometry::BoxRegion;

/// Uniform-grid spatial index over a flat coordinate array. Cell side is
/// chosen near the expected nearest-neighbor spacing so that cells hold
/// O(1) points at the sampled intensity. Construction reorders the point
/// array by cell (stable within a cell), which is also the canonical
/// point order used everywhere downstream.
#[derive(Clone, Debug)]
pub struct GridIndex {
    dim: usize,
    side: f64,
    inv_side: f64,
    origin: Vec<f64>,
    dims: Vec<usize>,
    strides: Vec<usize>,
    starts: Vec<u32>,
}

impl GridIndex {
    /// Build the index, reordering `coords` (length = n * dim) in place.
    pub fn build(dim: usize, coords: &mut Vec<f64>, bounds: &BoxRegion, mut side: f64) -> Self {
        let n = coords.len() / dim;
        assert!(side > 0.0 && side.is_finite());
        // Cap the cell count so pathological intensity labels cannot blow
        // up memory: at most ~4 cells per point (plus slack).
        let cell_cap = (4 * n + 1024) as f64;
        loop {
            let total: f64 = (0..dim)
                .map(|a| ((bounds.hi(a) - bounds.lo(a)) / side).ceil().max(1.0))
                .product();
            if total <= cell_cap {
                break;
            }
            side *= 2.0;
        }
        let origin: Vec<f64> = (0..dim).map(|a| bounds.lo(a)).collect();
        let dims: Vec<usize> = (0..dim)
            .map(|a| (((bounds.hi(a) - bounds.lo(a)) / side).ceil() as usize).max(1))
            .collect();
        let mut strides = vec![0usize; dim];
        let mut acc = 1usize;
        for a in (0..dim).rev() {
            strides[a] = acc;
            acc *= dims[a];
        }
        let total_cells = acc;

        let mut index = GridIndex {
            dim,
            side,
            inv_side: 1.0 / side,
            origin,
            dims,
            strides,
            starts: vec![0u32; total_cells + 1],
        };

        // Counting sort of points by cell id (stable).
        let mut cell_of_point = vec![0u32; n];
        for i in 0..n {
            let cell = index.cell_id_of(&coords[i * dim..(i + 1) * dim]);
            cell_of_point[i] = cell as u32;
            index.starts[cell + 1] += 1;
        }
        for c in 0..total_cells {
            index.starts[c + 1] += index.starts[c];
        }
        let mut cursor: Vec<u32> = index.starts[..total_cells].to_vec();
        let mut sorted = vec![0.0f64; coords.len()];
        for i in 0..n {
            let cell = cell_of_point[i] as usize;
            let dst = cursor[cell] as usize;
            cursor[cell] += 1;
            sorted[dst * dim..(dst + 1) * dim].copy_from_slice(&coords[i * dim..(i + 1) * dim]);
        }
        *coords = sorted;
        index
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn origin_of(&self, axis: usize) -> f64 {
        self.origin[axis]
    }

    #[inline]
    pub fn axis_cell(&self, axis: usize, x: f64) -> usize {
        let c = ((x - self.origin[axis]) * self.inv_side).floor();
        (c.max(0.0) as usize).min(self.dims[axis] - 1)
    }

    #[inline]
    fn cell_id_of(&self, coords: &[f64]) -> usize {
        (0..self.dim)
            .map(|a| self.axis_cell(a, coords[a]) * self.strides[a])
            .sum()
    }

    /// Point-index range for a cell given per-axis cell coordinates.
    #[inline]
    pub fn cell_range(&self, cell: &[usize]) -> std::ops::Range<usize> {
        let id: usize = cell.iter().zip(&self.strides).map(|(c, s)| c * s).sum();
        self.starts[id] as usize..self.starts[id + 1] as usize
    }

    #[inline]
    pub fn cell_range_by_id(&self, id: usize) -> std::ops::Range<usize> {
        self.starts[id] as usize..self.starts[id + 1] as usize
    }

    #[inline]
    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Visit the indices of all points in cells overlapping the AABB
    /// [lo, hi], in canonical (ascending index) order.
    pub fn for_each_in_aabb(&self, lo: &[f64], hi: &[f64], mut f: impl FnMut(usize)) {
        let lo_cell: Vec<usize> = (0..self.dim).map(|a| self.axis_cell(a, lo[a])).collect();
        let hi_cell: Vec<usize> = (0..self.dim).map(|a| self.axis_cell(a, hi[a])).collect();
        let mut cur = lo_cell.clone();
        loop {
            let range = self.cell_range(&cur);
            for i in range {
                f(i);
            }
            // odometer increment
            let mut axis = self.dim;
            loop {
                if axis == 0 {
                    return;
                }
                axis -= 1;
                if cur[axis] < hi_cell[axis] {
                    cur[axis] += 1;
                    for a in axis + 1..self.dim {
                        cur[a] = lo_cell[a];
                    }
                    break;
                }
            }
        }
    }

    /// Indices of all points within `radius` (inclusive) of `center`.
    pub fn ball_indices(&self, coords: &[f64], center: &[f64], radius: f64) -> Vec<u32> {
        let lo: Vec<f64> = center.iter().map(|c| c - radius).collect();
        let hi: Vec<f64> = center.iter().map(|c| c + radius).collect();
        let r2 = radius * radius;
        let mut out = Vec::new();
        self.for_each_in_aabb(&lo, &hi, |i| {
            let d2 = dist_sq(&coords[i * self.dim..(i + 1) * self.dim], center);
            if d2 <= r2 {
                out.push(i as u32);
            }
        });
        out
    }

    /// Nearest point to `query` (expanding ring search). Ties on the
    /// squared distance are broken toward lexicographically smallest
    /// coordinates. Returns None for an empty index.
    pub fn nearest(&self, coords: &[f64], query: &[f64]) -> Option<u32> {
        let n = coords.len() / self.dim;
        if n == 0 {
            return None;
        }
        let center: Vec<usize> = (0..self.dim).map(|a| self.axis_cell(a, query[a])).collect();
        let max_ring = (0..self.dim)
            .map(|a| center[a].max(self.dims[a] - 1 - center[a]))
            .max()
            .unwrap();
        let mut best: Option<(f64, u32)> = None;
        for r in 0..=max_ring {
            if let Some((best_d2, _)) = best {
                // The closest a ring-r cell can come to the query.
                let min_gap = (r as f64 - 1.0).max(0.0) * self.side;
                if min_gap * min_gap > best_d2 {
                    break;
                }
            }
            self.for_each_cell_in_ring(&center, r, |id| {
                for i in self.cell_range_by_id(id) {
                    let p = &coords[i * self.dim..(i + 1) * self.dim];
                    let d2 = dist_sq(p, query);
                    let better = match best {
                        None => true,
                        Some((bd2, bi)) => {
                            d2 < bd2
                                || (d2 == bd2
                                    && lex_less(
                                        p,
                                        &coords
                                            [bi as usize * self.dim..(bi as usize + 1) * self.dim],
                                    ))
                        }
                    };
                    if better {
                        best = Some((d2, i as u32));
                    }
                }
            });
        }
        best.map(|(_, i)| i)
    }

    /// Visit cell ids at Chebyshev cell-distance exactly `r` from
    /// `center`, clipped to the grid.
    fn for_each_cell_in_ring(&self, center: &[usize], r: usize, mut f: impl FnMut(usize)) {
        let lo: Vec<isize> = center.iter().map(|&c| c as isize - r as isize).collect();
        let hi: Vec<isize> = center.iter().map(|&c| c as isize + r as isize).collect();
        let mut cur = lo.clone();
        'outer: loop {
            let mut cheb = 0usize;
            let mut valid = true;
            for a in 0..self.dim {
                if cur[a] < 0 || cur[a] >= self.dims[a] as isize {
                    valid = false;
                    break;
                }
                cheb = cheb.max((cur[a] - center[a] as isize).unsigned_abs());
            }
            if valid && cheb == r {
                let id: usize = (0..self.dim)
                    .map(|a| cur[a] as usize * self.strides[a])
                    .sum();
                f(id);
            }
            let mut axis = self.dim;
            loop {
                if axis == 0 {
                    break 'outer;
                }
                axis -= 1;
                if cur[axis] < hi[axis] {
                    cur[axis] += 1;
                    for a in axis + 1..self.dim {
                        cur[a] = lo[a];
                    }
                    break;
                }
            }
        }
    }
}

#[inline]
pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub(crate) fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

use std::io::{self, BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;

use crate::geometry::{BoxRegion, Point};

use super::grid::{dist_sq, lex_less, GridIndex};
use super::{PoissonError, SeedPolicy};

/// Default cap on the expected number of points per sample.
pub const DEFAULT_POINT_BUDGET: f64 = 1e8;

/// An immutable seeded Poisson point set in a box, with a grid index.
/// Point order is canonical (sorted by grid cell, stable), so a sample is
/// fully determined by (box, intensity, seed) regardless of how or where
/// it is used.
#[derive(Clone, Debug)]
pub struct PoissonSample {
    dim: usize,
    coords: Vec<f64>,
    bounds: BoxRegion,
    intensity: f64,
    seed: u64,
    grid: GridIndex,
}

/// Draw a sample at the given intensity with the default point budget.
pub fn sample_poisson(
    bounds: &BoxRegion,
    intensity: f64,
    seed: SeedPolicy,
) -> Result<PoissonSample, PoissonError> {
    sample_poisson_with_budget(bounds, intensity, seed, DEFAULT_POINT_BUDGET)
}

/// Draw a sample with an explicit budget on the expected point count.
///
/// Generation is cell-by-cell: the box is tiled at the index cell scale
/// and each tile draws an independent Poisson count (seeded from the
/// sample seed and the tile id) and then uniform coordinates inside the
/// tile. A sum of independent Poisson tiles is exactly the homogeneous
/// process on the box, and the points come out in near-canonical order,
/// which keeps the index build cheap at large volumes.
pub fn sample_poisson_with_budget(
    bounds: &BoxRegion,
    intensity: f64,
    seed: SeedPolicy,
    budget: f64,
) -> Result<PoissonSample, PoissonError> {
    assert!(intensity >= 0.0 && intensity.is_finite());
    let expected = intensity * bounds.volume();
    if expected > budget {
        return Err(PoissonError::CapacityExceeded { expected, budget });
    }
    let seed_value = seed.seed();
    let dim = bounds.dim();
    let mut coords = Vec::with_capacity((expected as usize + 16) * dim);
    if expected > 0.0 {
        let mut side = if intensity > 0.0 {
            intensity.powf(-1.0 / dim as f64)
        } else {
            1.0
        };
        // Keep the tile count proportional to the expected point count.
        let cell_cap = 4.0 * expected + 1024.0;
        loop {
            let total: f64 = (0..dim)
                .map(|a| ((bounds.hi(a) - bounds.lo(a)) / side).ceil().max(1.0))
                .product();
            if total <= cell_cap {
                break;
            }
            side *= 2.0;
        }
        let dims: Vec<usize> = (0..dim)
            .map(|a| (((bounds.hi(a) - bounds.lo(a)) / side).ceil() as usize).max(1))
            .collect();
        let total_cells: usize = dims.iter().product();
        // Tail tiles are clipped by the box; precompute the Poisson
        // inversion constant exp(-lambda) for each clip pattern.
        let full_len: Vec<f64> = (0..dim).map(|_| side).collect();
        let tail_len: Vec<f64> = (0..dim)
            .map(|a| {
                let lo = bounds.lo(a) + (dims[a] - 1) as f64 * side;
                (bounds.hi(a) - lo).max(0.0)
            })
            .collect();
        let mut exp_neg: Vec<f64> = Vec::with_capacity(1 << dim);
        for mask in 0..(1usize << dim) {
            let mut vol = intensity;
            for a in 0..dim {
                vol *= if mask & (1 << a) != 0 {
                    tail_len[a]
                } else {
                    full_len[a]
                };
            }
            exp_neg.push((-vol).exp());
        }
        let mut idx = vec![0usize; dim];
        for cell in 0..total_cells {
            let mut rng = Pcg64Mcg::seed_from_u64(splitmix_pair(seed_value, cell as u64));
            let mut mask = 0usize;
            for a in 0..dim {
                if idx[a] == dims[a] - 1 {
                    mask |= 1 << a;
                }
            }
            // Knuth inversion; tile means are O(1) by construction.
            let threshold = exp_neg[mask];
            let mut count = 0usize;
            if threshold < 1.0 {
                let mut prod = rng.gen::<f64>();
                while prod > threshold {
                    count += 1;
                    prod *= rng.gen::<f64>();
                }
            }
            for _ in 0..count {
                for a in 0..dim {
                    let lo = bounds.lo(a) + idx[a] as f64 * side;
                    let len = if mask & (1 << a) != 0 {
                        tail_len[a]
                    } else {
                        side
                    };
                    coords.push(lo + rng.gen::<f64>() * len);
                }
            }
            // odometer over tiles, last axis fastest
            let mut axis = dim;
            while axis > 0 {
                axis -= 1;
                if idx[axis] + 1 < dims[axis] {
                    idx[axis] += 1;
                    for a in axis + 1..dim {
                        idx[a] = 0;
                    }
                    break;
                }
            }
        }
    }
    Ok(PoissonSample::from_parts(
        dim,
        coords,
        bounds.clone(),
        intensity,
        seed_value,
    ))
}

fn splitmix_pair(seed: u64, label: u64) -> u64 {
    use super::seed::splitmix64;
    splitmix64(seed.wrapping_add(splitmix64(label)))
}

impl PoissonSample {
    fn from_parts(
        dim: usize,
        mut coords: Vec<f64>,
        bounds: BoxRegion,
        intensity: f64,
        seed: u64,
    ) -> Self {
        let side = grid_side(intensity, dim);
        let grid = GridIndex::build(dim, &mut coords, &bounds, side);
        PoissonSample {
            dim,
            coords,
            bounds,
            intensity,
            seed,
            grid,
        }
    }

    /// Build a sample from explicit points (crafted configurations in
    /// tests and the brute-force oracles). Duplicate points and points
    /// outside the box are rejected.
    pub fn from_points(
        points: &[Point],
        bounds: BoxRegion,
        intensity: f64,
        seed: u64,
    ) -> Result<Self, PoissonError> {
        let dim = bounds.dim();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.dim() != dim {
                return Err(PoissonError::Geometry(
                    crate::geometry::GeometryError::DimensionMismatch {
                        expected: dim,
                        got: p.dim(),
                    },
                ));
            }
            if !bounds.contains(p) {
                return Err(PoissonError::OutOfBox { index: i });
            }
            coords.extend_from_slice(p.coords());
        }
        let sample = PoissonSample::from_parts(dim, coords, bounds, intensity, seed);
        for i in 1..sample.len() {
            if sample.coords_of(i) == sample.coords_of(i - 1) {
                return Err(PoissonError::DuplicatePoint(i));
            }
        }
        Ok(sample)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn bounds(&self) -> &BoxRegion {
        &self.bounds
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn grid(&self) -> &GridIndex {
        &self.grid
    }

    pub fn flat_coords(&self) -> &[f64] {
        &self.coords
    }

    #[inline]
    pub fn coords_of(&self, index: usize) -> &[f64] {
        &self.coords[index * self.dim..(index + 1) * self.dim]
    }

    pub fn point(&self, index: usize) -> Point {
        Point::new(self.coords_of(index).to_vec()).expect("stored coordinates are finite")
    }

    pub fn points(&self) -> Vec<Point> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Index of q(x), the sample point nearest to `x`; ties go to the
    /// lexicographically smallest coordinates.
    pub fn nearest_index(&self, x: &Point) -> Result<u32, PoissonError> {
        self.grid
            .nearest(&self.coords, x.coords())
            .ok_or(PoissonError::EmptySample)
    }

    /// q(x) as a point.
    pub fn nearest_point(&self, x: &Point) -> Result<Point, PoissonError> {
        Ok(self.point(self.nearest_index(x)? as usize))
    }

    /// Indices of sample points within `radius` of `center`, ascending.
    pub fn ball_query_indices(&self, center: &Point, radius: f64) -> Vec<u32> {
        assert!(radius >= 0.0);
        self.grid
            .ball_indices(&self.coords, center.coords(), radius)
    }

    /// The points within `radius` of `center`.
    pub fn ball_query(&self, center: &Point, radius: f64) -> Vec<Point> {
        self.ball_query_indices(center, radius)
            .into_iter()
            .map(|i| self.point(i as usize))
            .collect()
    }

    /// Linear-scan nearest point, the oracle for `nearest_index`.
    pub fn nearest_index_linear(&self, x: &Point) -> Result<u32, PoissonError> {
        if self.is_empty() {
            return Err(PoissonError::EmptySample);
        }
        let q = x.coords();
        let mut best = 0usize;
        let mut best_d2 = dist_sq(self.coords_of(0), q);
        for i in 1..self.len() {
            let d2 = dist_sq(self.coords_of(i), q);
            if d2 < best_d2 || (d2 == best_d2 && lex_less(self.coords_of(i), self.coords_of(best)))
            {
                best = i;
                best_d2 = d2;
            }
        }
        Ok(best as u32)
    }

    /// Linear-scan ball query, the oracle for `ball_query_indices`.
    pub fn ball_query_indices_linear(&self, center: &Point, radius: f64) -> Vec<u32> {
        let r2 = radius * radius;
        (0..self.len())
            .filter(|&i| dist_sq(self.coords_of(i), center.coords()) <= r2)
            .map(|i| i as u32)
            .collect()
    }

    /// Write the sample in the one-point-per-line dump format.
    pub fn dump_points(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "# efpp-points d={} seed={}", self.dim, self.seed)?;
        for i in 0..self.len() {
            let coords = self.coords_of(i);
            let line: Vec<String> = coords.iter().map(|c| format!("{c}")).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }

    /// Parse the dump format back into (dim, seed, points).
    pub fn parse_dump(r: impl BufRead) -> io::Result<(usize, u64, Vec<Point>)> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "empty dump"))??;
        let (dim, seed) = parse_points_header(&header)
            .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "bad dump header"))?;
        let mut points = Vec::new();
        for line in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let coords: Result<Vec<f64>, _> =
                line.split_whitespace().map(|t| t.parse::<f64>()).collect();
            let coords =
                coords.map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
            if coords.len() != dim {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    "bad point arity",
                ));
            }
            points.push(
                Point::new(coords)
                    .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?,
            );
        }
        Ok((dim, seed, points))
    }
}

pub(crate) fn parse_points_header(header: &str) -> Option<(usize, u64)> {
    let rest = header.strip_prefix("# efpp-points ")?;
    let mut dim = None;
    let mut seed = None;
    for token in rest.split_whitespace() {
        if let Some(v) = token.strip_prefix("d=") {
            dim = v.parse().ok();
        } else if let Some(v) = token.strip_prefix("seed=") {
            seed = v.parse().ok();
        }
    }
    Some((dim?, seed?))
}

fn grid_side(intensity: f64, dim: usize) -> f64 {
    if intensity > 0.0 {
        intensity.powf(-1.0 / dim as f64)
    } else {
        1.0
    }
}

/// Lower-bound estimate of sup_{x in region} |x - q(x)| from a regular
/// grid of centers with the stated spacing.
#[derive(Clone, Copy, Debug)]
pub struct EmptyBallEstimate {
    /// Max over grid centers of the distance to the nearest sample point.
    pub radius: f64,
    /// The continuum supremum exceeds `radius` by at most this much.
    pub additive_slack: f64,
}

/// Scan a regular grid of centers inside `region` and report the largest
/// observed nearest-point distance. Approximates the largest empty ball
/// radius from below with additive error at most spacing * sqrt(d) / 2.
pub fn largest_empty_ball_radius(
    sample: &PoissonSample,
    region: &BoxRegion,
    grid_spacing: f64,
) -> Result<EmptyBallEstimate, PoissonError> {
    if !(grid_spacing > 0.0) {
        return Err(PoissonError::BadSpacing(grid_spacing));
    }
    if sample.is_empty() {
        return Err(PoissonError::EmptySample);
    }
    let dim = sample.dim();
    let counts: Vec<usize> = (0..dim)
        .map(|a| {
            let extent = region.hi(a) - region.lo(a);
            ((extent / grid_spacing).ceil() as usize).max(1)
        })
        .collect();
    let steps: Vec<f64> = (0..dim)
        .map(|a| (region.hi(a) - region.lo(a)) / counts[a] as f64)
        .collect();
    let mut worst = 0.0f64;
    let mut idx = vec![0usize; dim];
    let mut center = vec![0.0f64; dim];
    loop {
        for a in 0..dim {
            center[a] = region.lo(a) + (idx[a] as f64 + 0.5) * steps[a];
        }
        let nearest = sample
            .grid
            .nearest(&sample.coords, &center)
            .expect("non-empty sample");
        let d2 = dist_sq(sample.coords_of(nearest as usize), &center);
        worst = worst.max(d2);
        let mut axis = dim;
        let done = loop {
            if axis == 0 {
                break true;
            }
            axis -= 1;
            if idx[axis] + 1 < counts[axis] {
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
    let max_step = steps.iter().cloned().fold(0.0f64, f64::max);
    Ok(EmptyBallEstimate {
        radius: worst.sqrt(),
        additive_slack: max_step * (dim as f64).sqrt() / 2.0,
    })
}

//! Reproducible Poisson point samples in boxes with a uniform-grid
//! spatial index: nearest-point and ball queries backing the geodesic
//! solver and the diagnostics.

mod grid;
mod sample;
mod seed;

pub use grid::GridIndex;
pub(crate) use grid::{dist_sq as grid_dist_sq, lex_less as grid_lex_less};
pub use sample::{
    largest_empty_ball_radius, sample_poisson, sample_poisson_with_budget, EmptyBallEstimate,
    PoissonSample, DEFAULT_POINT_BUDGET,
};
pub use seed::{splitmix64, SeedPolicy};

use thiserror::Error;

use crate::geometry::GeometryError;

#[derive(Debug, Error)]
pub enum PoissonError {
    #[error("sample contains no points")]
    EmptySample,
    #[error("expected point count {expected:.3e} exceeds budget {budget:.3e}")]
    CapacityExceeded { expected: f64, budget: f64 },
    #[error("point {index} lies outside the sample box")]
    OutOfBox { index: usize },
    #[error("duplicate point at index {0}")]
    DuplicatePoint(usize),
    #[error("grid spacing must be positive, got {0}")]
    BadSpacing(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

//! Euclidean first-passage percolation on Poisson point clouds: exact
//! geodesics for powered-Euclidean passage times, plus the Monte Carlo
//! estimator suite (time constant, concentration tails, gap envelopes,
//! geodesic wandering, slab deviations) and a reproducible experiment
//! harness.

pub mod estimators;
pub mod geodesic;
pub mod geometry;
pub mod harness;
pub mod poisson;
pub mod stats;

pub use estimators::{DerivedScales, ScaleFunction};

pub use geometry::{BoxRegion, ModelParams, Point, RotationMap, Segment};
pub use poisson::{PoissonSample, SeedPolicy};

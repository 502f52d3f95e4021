//! Pure deterministic geometry: points, regions, rotations, distances,
//! iterated logarithms and the model's constant algebra.

mod iterlog;
mod params;
mod point;
mod regions;
mod regular;
mod rotation;

pub use iterlog::{iterated_exp, iterated_log};
pub use params::{derive_constants, ModelParams};
pub use point::{dist_max, point_segment_distance, Point, Segment};
pub use regions::{BoxRegion, CylinderRegion, SlabRegion};
pub use regular::is_regular;
pub use rotation::{rotation_containment_factor, theta, RotationMap, CONTAINMENT_SAFE_ASPECT};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension must be at least 2, got {0}")]
    BadDimension(usize),
    #[error("alpha must exceed 1, got {0} (paths degenerate to straight lines otherwise)")]
    BadAlpha(f64),
    #[error("kappa3 must lie strictly inside (0, 1/2), got {0}")]
    BadKappa3(f64),
    #[error("iterated log undefined: intermediate value {value} after {applied} of {requested} iterations")]
    LogDomain {
        value: f64,
        applied: u32,
        requested: u32,
    },
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("non-finite coordinate encountered")]
    NonFinite,
    #[error("half-widths must be finite and non-negative")]
    BadHalfWidth,
    #[error("scale undefined at n = {0}")]
    ScaleDomain(f64),
}

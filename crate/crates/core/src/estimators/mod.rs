//! Monte Carlo estimators: scale functions, the empirical mean curve and
//! time-constant extrapolation, concentration tails, geodesic wandering
//! and slab-deviation statistics.

mod curve;
mod measure;
mod mu;
mod probe;
mod record;
mod scale;
mod tail;
mod wander;

pub use curve::{curve_from_records, estimate_mean_curve, CurvePoint, EmpiricalMeanCurve};
pub use measure::{measure_one, run_grid, MeasureSpec, PaddingPolicy};
pub use mu::{estimate_mu, estimate_mu_both, MuEstimate, MuMethod, MuPair};
pub use probe::{box_pair_sup_probe, ProbeResult};
pub use record::{RecordFlags, ReplicateRecord};
pub use scale::{check_scale_assumption, DerivedScales, ScaleAssumptionReport, ScaleFunction};
pub use tail::{concentration_tail, TailCurve, TailPoint};
pub use wander::{
    slab_deviation, slab_deviation_of_path, slab_lambdas, wandering_slope, wandering_stats,
    WanderingSummary,
};

use thiserror::Error;

use crate::geodesic::GeodesicError;
use crate::geometry::GeometryError;
use crate::poisson::PoissonError;

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("curve needs at least {need} scales, got {got}")]
    TooFewScales { need: usize, got: usize },
    #[error("grid contains fewer than two doubling pairs (n, 2n)")]
    NonDoublingGrid,
    #[error("empirical scale ratio zeta = {0} is not below 2; doubling extrapolation undefined")]
    BadZeta(f64),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("probe cylinder does not fit inside the sample box")]
    CylinderOutsideBox,
    #[error("no usable records for n = {0}")]
    NoUsableRecords(u64),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error(transparent)]
    Poisson(#[from] PoissonError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

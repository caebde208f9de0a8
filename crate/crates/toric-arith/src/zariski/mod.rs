//! Zariski decompositions of rotation-invariant divisors on the arithmetic
//! surface `P^1_Z`, with sampled nef certificates and verifiers.

mod probes;
mod rot;
mod solver;
mod verify;

pub use probes::{plane_minorant_gap, vertical_condition_drop, PlaneMinorantGap, VerticalDrop};
pub use rot::{
    certify_nef, rational_test_points, NefCertificate, RotInvariantDivisor, RotTransform, GRID_TOL,
};
pub use solver::{
    greatest_nef_minorant, nef_minorant, sampled_theta, Decomposition, Provenance, SolverConfig,
};
pub use verify::{
    check_multiplicity_identity, deg_self_intersection, nef_comparison_check, verify_zariski,
    MuCheck, MultiplicityReport, ZariskiReport, HEIGHT_TEST_BOUND, VOLUME_TOL,
};

use thiserror::Error;

use crate::convex::ConvexError;
use crate::divisor::DivisorError;

#[derive(Debug, Error)]
pub enum ZariskiError {
    #[error("inconsistent decomposition: {0}")]
    Inconsistent(String),
    #[error("not nef: {0}")]
    NotNef(String),
    #[error("order violated: {0}")]
    NotBelow(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Divisor(#[from] DivisorError),
    #[error(transparent)]
    Convex(#[from] ConvexError),
}

pub type Result<T> = std::result::Result<T, ZariskiError>;

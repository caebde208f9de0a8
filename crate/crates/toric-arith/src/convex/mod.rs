//! Convex-geometry kernel.
//!
//! Polytopes with paired vertex/halfspace representations, uniform-grid convex
//! functions with exact discrete Legendre conjugation, slope-constrained convex
//! minorants, quadrature of concave functions over convex regions, and a small
//! dense simplex solver used for interior-point certificates.

mod grid;
mod lp;
mod minorant;
mod optimize;
mod polytope;
mod quadrature;
mod slice;

pub use grid::{
    legendre_conjugate, ExactConjugate, GridConvexFunction, UniformGrid, DUAL_RESOLUTION_1D,
};
pub use lp::{maximize as lp_maximize, LpOutcome};
pub use minorant::constrained_convex_minorant;
pub use optimize::{bisect_boundary, golden_max, superlevel_interval};
pub use polytope::{convex_hull, Halfspace, Polytope};
pub use quadrature::{
    integrate_positive_part, maximize_concave, minimize_linear, ConcaveFunction, Quadrature,
    QuadratureOnly, Region, Shifted,
};
pub use slice::{chebyshev_center, slice_interior_witness, sliced_interior_nonempty};

use thiserror::Error;

/// Absolute tolerance for geometric predicates.
pub const GEOM_TOL: f64 = 1e-9;

/// Tolerance for discrete convexity of grid samples.
pub const CONVEXITY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConvexError {
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("grid function is not convex along axis {axis} at index {index} (second difference {value:e})")]
    NotConvex {
        axis: usize,
        index: usize,
        value: f64,
    },
    #[error(
        "slope {slope} at the grid boundary leaves the recession range [{lo}, {hi}] on axis {axis}"
    )]
    RecessionMismatch {
        axis: usize,
        slope: f64,
        lo: f64,
        hi: f64,
    },
    #[error("conjugate is unbounded at x = {x} (recession range [{lo}, {hi}])")]
    Unbounded { x: f64, lo: f64, hi: f64 },
    #[error(
        "infeasible: barrier exceeds the minorant by {deficit:e} at grid point {index} (s = {s})"
    )]
    Infeasible { index: usize, s: f64, deficit: f64 },
    #[error("invalid slope range [{lo}, {hi}]")]
    InvalidSlopeRange { lo: f64, hi: f64 },
    #[error("grids differ")]
    GridMismatch,
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, ConvexError>;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

//! Torus-invariant arithmetic divisors on projective space over the integers.
//!
//! A divisor `D = Σ c_k H_k` on `P^d` carries a rotation-invariant Green
//! function `g(z) = u(s) + λ` in the variables `s_i = log|z_i|^2`. Everything
//! arithmetic about it is read off the concave transform
//! `G(x) = -u*(x)/2 + λ/2` on the polytope
//! `Δ_D = {x : x_i >= -c_i (i >= 1), Σ x_i <= c_0}`.
//!
//! It is convenient to work with the multiplicity coordinates
//! `w_i = x_i + c_i` for `i >= 1` and `w_0 = c_0 - Σ x_i`. For a monomial
//! section `z^m` of `nD` the number `n·w_i(m/n)` is the order of vanishing of
//! `nD + (z^m)` along `H_i`, and `Δ_D` is the simplex `{w >= 0, Σ w = deg D}`.

mod model;
mod multiplicity;
mod norms;
mod transform;
mod volume;

pub use model::{DivisorRecord, Potential, PotentialRecord, ToricArithDivisor};
pub use multiplicity::{
    discrete_lipschitz, mu_monotone_continuity_profile, mu_r, mu_r_by_region,
    proposition_2_1_suite, ItemCheck, PropositionInput, PropositionReport,
};
pub use norms::{
    admissible_monomials, filtration_summary, log_sup_norm_monomial, multiplicities,
    sup_norm_monomial, FiltrationSummary,
};
pub use transform::ConcaveTransform;
pub use volume::{theta_region, vol_hat, vol_hat_base, BaseCondition, Center, Theta, VolumeReport};

use thiserror::Error;

use crate::convex::ConvexError;

/// Slack for sign tests on `G` and for admissibility of exponents.
pub const SIGN_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DivisorError {
    #[error("invalid divisor: {0}")]
    Invalid(String),
    #[error("parameter a[{index}] = {value} must be positive and finite")]
    NonPositiveParameter { index: usize, value: f64 },
    #[error("sampled potential has slope range [{found_lo}, {found_hi}] but the coefficients require [{lo}, {hi}]")]
    RecessionMismatch {
        lo: f64,
        hi: f64,
        found_lo: f64,
        found_hi: f64,
    },
    #[error(transparent)]
    Convex(#[from] ConvexError),
    #[error("monomial {m:?} violates the divisor constraint at level {n}")]
    OutOfRange { n: u64, m: Vec<i64> },
    #[error("divisor is not big (max G = {max_g})")]
    BignessRequired { max_g: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("center index {index} out of range for P^{d}")]
    CenterOutOfRange { index: usize, d: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("multiplicity bound {0} must be finite and nonnegative")]
    InvalidBound(f64),
}

pub type Result<T> = std::result::Result<T, DivisorError>;

/// `w log(A / w)` with `0 log 0 = 0`.
pub(crate) fn entropy_term(w: f64, big_a: f64) -> f64 {
    if w <= 0.0 {
        0.0
    } else {
        w * (big_a / w).ln()
    }
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= p {
        if p.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

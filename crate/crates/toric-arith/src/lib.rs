//! Toric arithmetic divisors on projective space over the integers.
//!
//! - [`convex`]: conjugates, minorants, polytopes, quadrature and LP helpers.
//! - [`divisor`]: divisors with canonical or sampled Green functions, their
//!   concave transforms, volumes with base conditions and asymptotic
//!   multiplicities.
//! - [`okounkov`]: lexicographic valuations and convex bodies of monomial series.
//! - [`oracle`]: brute-force section enumeration and counting.
//! - [`zariski`]: Zariski decompositions on the arithmetic surface `P^1_Z`.
//! - [`cli`]: the batch front end behind the `toric-arith` binary.

pub mod cli;
pub mod convex;
pub mod divisor;
pub mod okounkov;
pub mod oracle;
pub mod zariski;

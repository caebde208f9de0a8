use serde::Serialize;

use super::rot::{
    certify_nef, rational_test_points, NefCertificate, RotInvariantDivisor, GRID_TOL,
};
use super::solver::Decomposition;
use super::{Result, ZariskiError};
use crate::divisor::{mu_r, vol_hat, Center, ToricArithDivisor};

/// Default volume tolerance: quadrature plus sampling error.
pub const VOLUME_TOL: f64 = 1e-3;

/// Height bound of the rational test points used by the verifiers.
pub const HEIGHT_TEST_BOUND: i64 = 6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZariskiReport {
    pub positive_nef: NefCertificate,
    pub negative_effective: bool,
    pub vol_input: f64,
    pub vol_positive: f64,
    pub volume_equal: bool,
    pub pass: bool,
}

/// Checks the three defining conditions of a Zariski decomposition after
/// confirming that the parts add up to the input.
pub fn verify_zariski(
    divisor: &ToricArithDivisor,
    dec: &Decomposition,
    tol: f64,
) -> Result<ZariskiReport> {
    let input = RotInvariantDivisor::from_divisor(divisor, dec.positive.grid())?;
    let sum = dec.positive.try_add(&dec.negative)?;
    let mismatch = sum
        .values
        .iter()
        .zip(&input.values)
        .map(|(a, b)| (a - b).abs() / (1.0 + b.abs()))
        .fold(
            (sum.e0 - input.e0).abs().max((sum.e1 - input.e1).abs()),
            f64::max,
        );
    if mismatch > GRID_TOL || sum.vertical.values().any(|g| g.abs() > GRID_TOL) {
        return Err(ZariskiError::Inconsistent(format!(
            "parts differ from the input by {mismatch:e}"
        )));
    }
    let positive_nef = certify_nef(&dec.positive, &rational_test_points(HEIGHT_TEST_BOUND));
    let negative_effective = dec.negative.is_effective();
    let vol_input = vol_hat(divisor)?.value;
    let vol_positive = if positive_nef.convex {
        dec.positive.volume()?
    } else {
        0.0
    };
    let volume_equal = (vol_positive - vol_input).abs() <= tol;
    Ok(ZariskiReport {
        pass: positive_nef.passed && negative_effective && volume_equal,
        positive_nef,
        negative_effective,
        vol_input,
        vol_positive,
        volume_equal,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuCheck {
    pub center: Center,
    pub mu_r: f64,
    pub coefficient: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplicityReport {
    pub checks: Vec<MuCheck>,
    pub pass: bool,
}

/// Compares `μ_R(D)` at `H_1` and `H_0` with the coefficients of the negative
/// part, and at each vertical fiber of `N` with zero.
pub fn check_multiplicity_identity(
    divisor: &ToricArithDivisor,
    dec: &Decomposition,
    tol: f64,
) -> Result<MultiplicityReport> {
    let mut checks = Vec::new();
    for (center, coefficient) in [
        (Center::Hyperplane(1), dec.negative.e1),
        (Center::Hyperplane(0), dec.negative.e0),
    ] {
        let mu = mu_r(divisor, center)?;
        checks.push(MuCheck {
            center,
            mu_r: mu,
            coefficient,
            holds: (mu - coefficient).abs() <= tol,
        });
    }
    for (&p, &gamma) in &dec.negative.vertical {
        let mu = mu_r(divisor, Center::VerticalFiber(p))?;
        checks.push(MuCheck {
            center: Center::VerticalFiber(p),
            mu_r: mu,
            coefficient: gamma,
            holds: (mu - gamma).abs() <= tol,
        });
    }
    let pass = checks.iter().all(|c| c.holds);
    Ok(MultiplicityReport { checks, pass })
}

/// For nef `P <= Q`: equal positive volumes force `P = Q`.
///
/// Returns `true` when the volumes agree (after confirming the divisors agree
/// to grid tolerance) and `false` when `vol P < vol Q`.
pub fn nef_comparison_check(p: &RotInvariantDivisor, q: &RotInvariantDivisor) -> Result<bool> {
    let points = rational_test_points(HEIGHT_TEST_BOUND);
    for (name, x) in [("P", p), ("Q", q)] {
        if !certify_nef(x, &points).passed {
            return Err(ZariskiError::NotNef(format!(
                "{name} fails the sampled nef certificate"
            )));
        }
    }
    let excess = p.excess_over(q)?;
    if excess > GRID_TOL {
        return Err(ZariskiError::NotBelow(format!("P exceeds Q by {excess:e}")));
    }
    let (vp, vq) = (p.volume()?, q.volume()?);
    if (vp - vq).abs() <= 1e-9 && vp > 0.0 {
        let reverse = q.excess_over(p)?;
        if reverse > 1e-6 {
            return Err(ZariskiError::Inconsistent(format!(
                "equal volumes {vp} but Q exceeds P by {reverse:e}"
            )));
        }
        return Ok(true);
    }
    if vp > vq + 1e-9 {
        return Err(ZariskiError::Inconsistent(format!(
            "vol P = {vp} exceeds vol Q = {vq} although P <= Q"
        )));
    }
    Ok(false)
}

/// `deg(P^2)`, which equals `vol(P)` for nef `P`; refused without a passing
/// certificate since the identity is only available for nef divisors.
pub fn deg_self_intersection(p: &RotInvariantDivisor, certificate: &NefCertificate) -> Result<f64> {
    if !certificate.passed {
        return Err(ZariskiError::NotNef(
            "self-intersection needs a passing nef certificate".into(),
        ));
    }
    p.volume()
}

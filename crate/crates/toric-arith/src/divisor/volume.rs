use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::model::ToricArithDivisor;
use super::transform::ConcaveTransform;
use super::{factorial, is_prime, DivisorError, Result};
use crate::convex::{
    bisect_boundary, integrate_positive_part, ConcaveFunction, Halfspace, Quadrature,
    QuadratureOnly, Region, Shifted,
};

/// Where a base condition is imposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum Center {
    /// The generic point of the coordinate hyperplane `H_i`.
    Hyperplane(usize),
    /// The torus-fixed point where every coordinate but the `j`-th vanishes.
    TorusFixedPoint(usize),
    /// The fiber over the prime `p`.
    VerticalFiber(u64),
}

impl Center {
    pub fn validate(&self, d: usize) -> Result<()> {
        match *self {
            Center::Hyperplane(i) | Center::TorusFixedPoint(i) if i > d => {
                Err(DivisorError::CenterOutOfRange { index: i, d })
            }
            Center::VerticalFiber(p) if !is_prime(p) => Err(DivisorError::NotPrime(p)),
            _ => Ok(()),
        }
    }

    /// Multiplicity at this center of a divisor with multiplicity coordinates
    /// `w` and degree `deg` (zero for vertical fibers, which carry no
    /// horizontal part).
    pub fn mult(&self, w: &[f64], deg: f64) -> f64 {
        match *self {
            Center::Hyperplane(i) => w[i],
            Center::TorusFixedPoint(j) => deg - w[j],
            Center::VerticalFiber(_) => 0.0,
        }
    }
}

/// The requirement `mult_ξ(nD + (φ)) >= nμ` on sections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseCondition {
    pub center: Center,
    pub mu: f64,
}

impl BaseCondition {
    pub fn new(center: Center, mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(DivisorError::InvalidBound(mu));
        }
        if let Center::VerticalFiber(p) = center {
            if !is_prime(p) {
                return Err(DivisorError::NotPrime(p));
            }
        }
        Ok(Self { center, mu })
    }

    /// The halfspace cutting the body, for horizontal centers.
    pub(crate) fn halfspace(&self, divisor: &ToricArithDivisor) -> Option<Halfspace> {
        let d = divisor.d();
        let c = divisor.coeffs();
        let deg = divisor.degree();
        let unit = |i: usize, sign: f64| {
            let mut n = vec![0.0; d];
            n[i - 1] = sign;
            n
        };
        match self.center {
            // w_i >= μ
            Center::Hyperplane(0) => Some(Halfspace::new(vec![1.0; d], c[0] - self.mu)),
            Center::Hyperplane(i) => Some(Halfspace::new(unit(i, -1.0), c[i] - self.mu)),
            // w_j <= deg - μ
            Center::TorusFixedPoint(0) => Some(Halfspace::new(vec![-1.0; d], deg - self.mu - c[0])),
            Center::TorusFixedPoint(j) => Some(Halfspace::new(unit(j, 1.0), deg - self.mu - c[j])),
            Center::VerticalFiber(_) => None,
        }
    }
}

/// The closure of `{G > 0}` in the body.
#[derive(Debug, Clone)]
pub struct Theta {
    region: Region,
    transform: Arc<ConcaveTransform>,
    argmax: Vec<f64>,
    max_g: f64,
}

impl Theta {
    /// Empty exactly when `max G <= 0`.
    pub fn is_empty(&self) -> bool {
        self.max_g <= 0.0
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn transform(&self) -> &ConcaveTransform {
        &self.transform
    }

    pub fn max_g(&self) -> f64 {
        self.max_g
    }

    pub fn argmax(&self) -> &[f64] {
        &self.argmax
    }

    /// Endpoints of `Θ` on the projective line, located by bisection to
    /// floating-point resolution.
    pub fn interval(&self) -> Option<(f64, f64)> {
        if self.is_empty() || self.argmax.len() != 1 {
            return None;
        }
        let g = |t: f64| self.transform.eval_point(&[t]);
        let (lo, hi) = self.region.base().bounding_box()[0];
        let xm = self.argmax[0];
        let left = if g(lo) >= 0.0 {
            lo
        } else {
            bisect_boundary(g, xm, lo)
        };
        let right = if g(hi) >= 0.0 {
            hi
        } else {
            bisect_boundary(g, xm, hi)
        };
        Some((left, right))
    }
}

pub fn theta_region(divisor: &ToricArithDivisor) -> Result<Theta> {
    let transform = Arc::new(divisor.transform()?);
    let (argmax, max_g) = transform.argmax();
    let region = Region::new(divisor.body()?).with_superlevel(transform.clone());
    Ok(Theta {
        region,
        transform,
        argmax,
        max_g,
    })
}

/// Arithmetic volume together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeReport {
    /// Reported value: the closed-form path when one exists.
    pub value: f64,
    /// Closed-form line integrals along the last coordinate.
    pub closed_form: f64,
    /// Independent adaptive Gauss–Kronrod quadrature of `G`.
    pub quadrature: f64,
    pub method: &'static str,
}

fn integrate(g: &dyn ConcaveFunction, region: &Region, d: usize) -> Result<(f64, f64)> {
    let scale = factorial(d + 1);
    let closed = integrate_positive_part(g, region, Quadrature::default())?;
    let quad = integrate_positive_part(
        &QuadratureOnly(g),
        region,
        Quadrature::Adaptive { abs_tol: 1e-10 },
    )?;
    Ok((scale * closed, scale * quad))
}

fn report(divisor: &ToricArithDivisor, closed: f64, quad: f64) -> VolumeReport {
    let method = if divisor.family().is_some() {
        "closed-form+quadrature"
    } else {
        "piecewise-linear+quadrature"
    };
    VolumeReport {
        value: closed,
        closed_form: closed,
        quadrature: quad,
        method,
    }
}

/// `(d+1)! ∫_Θ G`.
pub fn vol_hat(divisor: &ToricArithDivisor) -> Result<VolumeReport> {
    let transform = divisor.transform()?;
    if transform.max_value() <= 0.0 {
        return Ok(report(divisor, 0.0, 0.0));
    }
    let region = Region::new(divisor.body()?);
    let (closed, quad) = integrate(&transform, &region, divisor.d())?;
    Ok(report(divisor, closed, quad))
}

/// Volume of the sections satisfying every base condition.
///
/// Horizontal conditions cut the body by `mult_ξ >= μ`; a vertical condition
/// at `p` lowers the integrand by `μ log p` (per prime, the largest `μ`
/// applies). Conditions with `μ = 0` change nothing.
pub fn vol_hat_base(
    divisor: &ToricArithDivisor,
    conditions: &[BaseCondition],
) -> Result<VolumeReport> {
    let mut cuts = Vec::new();
    let mut vertical: BTreeMap<u64, f64> = BTreeMap::new();
    for c in conditions {
        c.center.validate(divisor.d())?;
        if c.mu == 0.0 {
            continue;
        }
        match c.center {
            Center::VerticalFiber(p) => {
                let e = vertical.entry(p).or_insert(0.0);
                *e = e.max(c.mu);
            }
            _ => cuts.extend(c.halfspace(divisor)),
        }
    }
    if cuts.is_empty() && vertical.is_empty() {
        return vol_hat(divisor);
    }
    let shift: f64 = vertical.iter().map(|(&p, &mu)| mu * (p as f64).ln()).sum();
    let g = Shifted {
        inner: divisor.transform()?,
        shift,
    };
    let region = Region::with_constraints(divisor.body()?, cuts)?;
    let (closed, quad) = integrate(&g, &region, divisor.d())?;
    Ok(report(divisor, closed, quad))
}

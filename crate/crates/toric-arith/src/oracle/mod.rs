//! Brute-force ground truth: section enumeration and counting, numeric
//! sup-norms, and finite-level multiplicity approximants.
//!
//! Nothing here reuses the concave transform or the volume integrals; norms
//! come from the monomial closed form (itself checked against
//! [`sup_norm_numeric`]) and everything else is enumeration.

mod counting;

pub use counting::{exact_log_count_d1, CircleGrid};

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{Float, One};
use rayon::prelude::*;
use serde::Serialize;

use crate::convex::golden_max;
use crate::divisor::{
    admissible_monomials, log_sup_norm_monomial, multiplicities, BaseCondition, Center,
    DivisorError, Potential, ToricArithDivisor,
};

pub type Result<T> = std::result::Result<T, DivisorError>;

/// Relative guard band around integer values of a radius.
const GUARD: f64 = 1e-9;

/// A monomial section `z^m` of `nD` with its vanishing orders and radius
/// `R_m = 1 / ‖z^m‖` (stored as `log R_m`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionEntry {
    pub m: Vec<i64>,
    pub mults: Vec<f64>,
    pub log_radius: f64,
}

impl SectionEntry {
    pub fn radius(&self) -> f64 {
        self.log_radius.exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionEnumeration {
    pub n: u64,
    pub entries: Vec<SectionEntry>,
    pub conditions: Vec<BaseCondition>,
}

impl SectionEnumeration {
    /// `(p, ⌈nμ⌉)` for each vertical condition, largest `μ` per prime.
    fn vertical_exponents(&self) -> BTreeMap<u64, u64> {
        let mut out = BTreeMap::new();
        for c in &self.conditions {
            if let Center::VerticalFiber(p) = c.center {
                let k = (self.n as f64 * c.mu - GUARD).ceil().max(0.0) as u64;
                let e = out.entry(p).or_insert(0);
                *e = (*e).max(k);
            }
        }
        out
    }
}

/// All monomials `z^m` with `nD + (z^m) >= 0` meeting the horizontal
/// conditions `mult_ξ >= nμ`, in lexicographic order of `m`.
pub fn enumerate_sections(
    divisor: &ToricArithDivisor,
    n: u64,
    conditions: &[BaseCondition],
) -> Result<SectionEnumeration> {
    if n == 0 {
        return Err(DivisorError::Invalid("level must be positive".into()));
    }
    for c in conditions {
        c.center.validate(divisor.d())?;
    }
    let nd = n as f64 * divisor.degree();
    let entries = admissible_monomials(divisor, n)
        .into_par_iter()
        .map(|m| -> Result<Option<SectionEntry>> {
            let mults = multiplicities(divisor, n, &m);
            let keep = conditions.iter().all(|c| match c.center {
                Center::VerticalFiber(_) => true,
                center => center.mult(&mults, nd) >= n as f64 * c.mu - GUARD,
            });
            if !keep {
                return Ok(None);
            }
            let log_radius = -log_sup_norm_monomial(divisor, n, &m)?;
            Ok(Some(SectionEntry {
                m,
                mults,
                log_radius,
            }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(SectionEnumeration {
        n,
        entries,
        conditions: conditions.to_vec(),
    })
}

/// Exact data for `R_m^2 = Π (N a_i / M_i)^{M_i}` when the twist vanishes and
/// every `M_i` is an integer.
struct ExactRadius {
    /// `(numerator, denominator)` of each `a_i`, as dyadic integers.
    a: Vec<(BigUint, BigUint)>,
}

impl ExactRadius {
    fn new(divisor: &ToricArithDivisor) -> Option<Self> {
        let Potential::Canonical { a } = divisor.potential() else {
            return None;
        };
        if divisor.twist() != 0.0 {
            return None;
        }
        let a = a
            .iter()
            .map(|&v| {
                let (mant, exp, _) = v.integer_decode();
                let mant = BigUint::from(mant);
                if exp >= 0 {
                    (mant << exp as usize, BigUint::one())
                } else {
                    (mant, BigUint::one() << (-exp) as usize)
                }
            })
            .collect();
        Some(Self { a })
    }

    /// Whether `R_m >= k · Π p^{e_p}`, decided in exact arithmetic; `None`
    /// when some `M_i` is not an integer.
    fn at_least(&self, mults: &[f64], k: u64, vertical: &BTreeMap<u64, u64>) -> Option<bool> {
        let ints: Vec<u32> = mults
            .iter()
            .map(|&m| {
                let r = m.round();
                ((m - r).abs() < 1e-12 && r >= 0.0).then_some(r as u32)
            })
            .collect::<Option<_>>()?;
        let total: u32 = ints.iter().sum();
        let mut lhs = BigUint::one();
        let mut rhs = BigUint::from(k) * BigUint::from(k);
        for (&mi, (num, den)) in ints.iter().zip(&self.a) {
            if mi == 0 {
                continue;
            }
            lhs *= (BigUint::from(total) * num).pow(mi);
            rhs *= (BigUint::from(mi) * den).pow(mi);
        }
        for (&p, &e) in vertical {
            rhs *= BigUint::from(p).pow(2 * e as u32);
        }
        Some(lhs >= rhs)
    }
}

/// `⌊R_m / Π p^{⌈nμ_p⌉}⌋`, as a float (exact below `2^53`).
fn floor_radius(
    entry: &SectionEntry,
    vertical: &BTreeMap<u64, u64>,
    exact: Option<&ExactRadius>,
) -> f64 {
    let q = entry.log_radius
        - vertical
            .iter()
            .map(|(&p, &e)| e as f64 * (p as f64).ln())
            .sum::<f64>();
    if q > 36.0 {
        return q.exp();
    }
    let r = q.exp();
    let nearest = r.round();
    if nearest >= 1.0 && (r - nearest).abs() <= GUARD * r.max(1.0) {
        // a boundary tie within the guard band; ties count the section in
        let decided = exact.and_then(|x| x.at_least(&entry.mults, nearest as u64, vertical));
        return match decided {
            Some(false) => nearest - 1.0,
            _ => nearest,
        };
    }
    r.floor()
}

/// `L(n) = Σ_m log(2⌊R_m / Π p^{⌈nμ_p⌉}⌋ + 1)`.
///
/// This is the log-count of the diagonal box of integer coefficient vectors
/// `|c_m| <= ⌊R_m⌋`, which contains the sup-norm lattice ball of `nD`; the two
/// differ by `O(n^d log n)`, which vanishes after dividing by `n^{d+1}`.
pub fn log_count(divisor: &ToricArithDivisor, n: u64, conditions: &[BaseCondition]) -> Result<f64> {
    let e = enumerate_sections(divisor, n, conditions)?;
    Ok(log_count_of(divisor, &e))
}

pub fn log_count_of(divisor: &ToricArithDivisor, e: &SectionEnumeration) -> f64 {
    let vertical = e.vertical_exponents();
    let exact = ExactRadius::new(divisor);
    let terms: Vec<f64> = e
        .entries
        .par_iter()
        .map(|entry| {
            let k = floor_radius(entry, &vertical, exact.as_ref());
            if k > 1e15 {
                // log(2k + 1) without overflow concerns
                (2.0 * k).ln()
            } else {
                (2.0 * k + 1.0).ln()
            }
        })
        .collect();
    terms.iter().sum()
}

/// `(d+1)! L(n) / n^{d+1}`, the oracle's volume estimate.
pub fn volume_estimate(
    divisor: &ToricArithDivisor,
    n: u64,
    conditions: &[BaseCondition],
) -> Result<f64> {
    let d = divisor.d() as i32;
    let fact: f64 = (1..=divisor.d() + 1).map(|k| k as f64).product();
    Ok(fact * log_count(divisor, n, conditions)? / (n as f64).powi(d + 1))
}

/// `min mult_ξ(nD + (z^m)) / n` over monomials with `R_m >= 1`, i.e. over
/// the sections `z^m` of `nD` of sup-norm at most one; `None` when there are
/// none.
pub fn mu_q_at_level(divisor: &ToricArithDivisor, center: Center, n: u64) -> Result<Option<f64>> {
    center.validate(divisor.d())?;
    let e = enumerate_sections(divisor, n, &[])?;
    let exact = ExactRadius::new(divisor);
    let none = BTreeMap::new();
    let nd = n as f64 * divisor.degree();
    let best = e
        .entries
        .iter()
        .filter(|entry| floor_radius(entry, &none, exact.as_ref()) >= 1.0)
        .map(|entry| center.mult(&entry.mults, nd) / n as f64)
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.min(v)))
        });
    Ok(best.map(|v| v.max(0.0)))
}

/// Finite-level approximants of `μ_Q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuQApprox {
    /// `(n, value)`; each value bounds `μ_Q` from above.
    pub levels: Vec<(u64, Option<f64>)>,
    /// Running minimum over the levels in increasing order of `n`.
    pub envelope: Vec<(u64, f64)>,
    /// Set when no requested level carries a section of norm at most one.
    pub bigness_warning: bool,
}

pub fn mu_q_approx(
    divisor: &ToricArithDivisor,
    center: Center,
    n_list: &[u64],
) -> Result<MuQApprox> {
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let levels: Vec<(u64, Option<f64>)> = ns
        .iter()
        .map(|&n| mu_q_at_level(divisor, center, n).map(|v| (n, v)))
        .collect::<Result<_>>()?;
    let mut envelope = Vec::new();
    let mut best = f64::INFINITY;
    for &(n, v) in &levels {
        if let Some(v) = v {
            best = best.min(v);
        }
        if best.is_finite() {
            envelope.push((n, best));
        }
    }
    let bigness_warning = levels.iter().all(|(_, v)| v.is_none());
    Ok(MuQApprox {
        levels,
        envelope,
        bigness_warning,
    })
}

/// Half-width of the search window in each `τ_i = s_i + log(a_i / a_0)`.
const WINDOW: f64 = 80.0;

/// `‖z^m‖` by direct maximization of `m·s - n g(s)` over `s`, nested
/// golden-section search in the shifted variables `τ_i`; no closed form is
/// used. Sampled potentials are maximized over their grid points.
pub fn sup_norm_numeric(divisor: &ToricArithDivisor, n: u64, m: &[i64]) -> Result<f64> {
    multiplicities(divisor, n, m)
        .iter()
        .all(|&v| v >= -GUARD)
        .then_some(())
        .ok_or(DivisorError::OutOfRange { n, m: m.to_vec() })?;
    let nf = n as f64;
    let f = |s: &[f64]| -> f64 {
        let ms: f64 = m.iter().zip(s).map(|(&mi, si)| mi as f64 * si).sum();
        ms - nf * divisor.green_at(s)
    };
    let sup = match divisor.potential() {
        Potential::Sampled(u) => {
            let g = &u.axes()[0];
            g.points()
                .iter()
                .map(|&s| f(&[s]))
                .fold(f64::NEG_INFINITY, f64::max)
        }
        Potential::Canonical { a } => {
            let centre: Vec<f64> = a[1..].iter().map(|ai| (a[0] / ai).ln()).collect();
            match divisor.d() {
                1 => golden_max(|t| f(&[t]), centre[0] - WINDOW, centre[0] + WINDOW).1,
                2 => {
                    let inner = |s1: f64| {
                        golden_max(|s2| f(&[s1, s2]), centre[1] - WINDOW, centre[1] + WINDOW).1
                    };
                    golden_max(inner, centre[0] - WINDOW, centre[0] + WINDOW).1
                }
                d => {
                    return Err(DivisorError::Unsupported(format!(
                        "numeric norms in dimension {d}"
                    )))
                }
            }
        }
    };
    Ok((0.5 * sup).exp())
}

/// Ratio of two positive numbers as a relative error.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

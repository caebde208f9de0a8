//! Lexicographic valuations at torus-fixed flags, graded semigroups of
//! monomial series and their convex bodies.
//!
//! Monomials are written in the affine coordinates `z_k = X_k / X_0`. The
//! series `V_m ⊆ H^0(mD)` of a divisor `D = Σ c_k H_k` with integer
//! coefficients is spanned by monomials `z^a`, and the flag at the
//! torus-fixed point `P_j` reads off the coefficients of `(z^a) + mD` along
//! the hyperplanes through `P_j`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Rational64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::convex::{convex_hull, ConvexError, Polytope};

#[derive(Debug, Error)]
pub enum OkounkovError {
    #[error("valuation of zero")]
    ValuationOfZero,
    #[error("unsupported flag center: {0}")]
    UnsupportedCenter(String),
    #[error("parameter order {0:?} is not a permutation")]
    NotAPermutation(Vec<usize>),
    #[error("grading violation: z^{left:?} (level {left_level}) times z^{right:?} (level {right_level}) is missing from level {}", left_level + right_level)]
    GradingViolation {
        left: Vec<i64>,
        left_level: u64,
        right: Vec<i64>,
        right_level: u64,
    },
    #[error("empty series up to level {0}")]
    EmptySeries(u64),
    #[error("monomial z^{exponent:?} is not a section of {level}D")]
    NotASection { exponent: Vec<i64>, level: u64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Convex(#[from] ConvexError),
}

pub type Result<T> = std::result::Result<T, OkounkovError>;

/// Exponent vector `(a_1, …, a_d)` in the local parameters of a flag.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(d: usize) -> Self {
        Self(vec![0; d])
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Polynomial in the local parameters with nonzero rational coefficients.
pub type Poly = BTreeMap<MultiIndex, Rational64>;

pub fn poly_add(f: &Poly, g: &Poly) -> Poly {
    let mut out = f.clone();
    for (k, v) in g {
        *out.entry(k.clone()).or_insert_with(Rational64::zero) += v;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

pub fn poly_mul(f: &Poly, g: &Poly) -> Poly {
    let mut out = Poly::new();
    for (a, x) in f {
        for (b, y) in g {
            *out.entry(a.add(b)).or_insert_with(Rational64::zero) += x * y;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Where a flag sits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum FlagCenter {
    /// The torus-fixed point `P_j` where every `X_k` with `k ≠ j` vanishes;
    /// the local parameters are `X_k / X_j`, `k ≠ j`, in increasing `k`.
    TorusFixed(usize),
    /// A point of the open torus, given by its coordinates.
    Regular(Vec<f64>),
}

/// A flag: a center and the order in which its local parameters are read.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValuationFlag {
    d: usize,
    center: FlagCenter,
    order: Vec<usize>,
}

impl ValuationFlag {
    /// `order[r]` is the (zero-based) local parameter compared at rank `r`.
    pub fn new(d: usize, center: FlagCenter, order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; d];
        if order.len() != d
            || order
                .iter()
                .any(|&i| i >= d || std::mem::replace(&mut seen[i], true))
        {
            return Err(OkounkovError::NotAPermutation(order));
        }
        if let FlagCenter::TorusFixed(j) = center {
            if j > d {
                return Err(OkounkovError::UnsupportedCenter(format!(
                    "torus-fixed point {j} on P^{d}"
                )));
            }
        }
        Ok(Self { d, center, order })
    }

    /// The flag at `P_0` (the origin of the affine chart) with the identity
    /// order.
    pub fn origin(d: usize) -> Self {
        Self {
            d,
            center: FlagCenter::TorusFixed(0),
            order: (0..d).collect(),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn center(&self) -> &FlagCenter {
        &self.center
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    fn fixed_point(&self) -> Result<usize> {
        match &self.center {
            FlagCenter::TorusFixed(j) => Ok(*j),
            FlagCenter::Regular(p) => Err(OkounkovError::UnsupportedCenter(format!(
                "point {p:?} does not lie on a coordinate subvariety"
            ))),
        }
    }

    /// Hyperplane indices cut out by the local parameters, in rank order.
    pub fn hyperplanes(&self) -> Result<Vec<usize>> {
        let j = self.fixed_point()?;
        let params: Vec<usize> = (0..=self.d).filter(|&k| k != j).collect();
        Ok(self.order.iter().map(|&r| params[r]).collect())
    }

    fn permute<T: Copy>(&self, v: &[T]) -> Vec<T> {
        self.order.iter().map(|&r| v[r]).collect()
    }
}

/// The lexicographically smallest exponent of `poly` after reordering the
/// parameters by the flag.
pub fn ord_lex(poly: &Poly, flag: &ValuationFlag) -> Result<MultiIndex> {
    poly.keys()
        .map(|k| {
            if k.0.len() != flag.d {
                return Err(OkounkovError::DimensionMismatch {
                    expected: flag.d,
                    found: k.0.len(),
                });
            }
            Ok(MultiIndex(flag.permute(&k.0)))
        })
        .collect::<Result<BTreeSet<_>>>()?
        .into_iter()
        .next()
        .ok_or(OkounkovError::ValuationOfZero)
}

/// `mult_{z_P}(L)` for `L = Σ c_k H_k`: the coefficients of the hyperplanes
/// through the flag's center, in rank order.
pub fn mult_vector(coeffs: &[f64], flag: &ValuationFlag) -> Result<Vec<f64>> {
    if coeffs.len() != flag.d + 1 {
        return Err(OkounkovError::DimensionMismatch {
            expected: flag.d + 1,
            found: coeffs.len(),
        });
    }
    Ok(flag.hyperplanes()?.into_iter().map(|k| coeffs[k]).collect())
}

/// First coordinate of `mult_{z_P}(L)`: the coefficient in `L` of the
/// hyperplane whose local equation is the first parameter.
pub fn mult_first_coordinate(coeffs: &[f64], flag: &ValuationFlag) -> Result<f64> {
    Ok(mult_vector(coeffs, flag)?[0])
}

/// `V_m`: the span of monomials `z^a` inside `H^0(mD)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonomialSeries {
    level: u64,
    coeffs: Vec<i64>,
    support: BTreeSet<Vec<i64>>,
}

impl MonomialSeries {
    /// Checks that every `z^a` is a section: `(z^a) + mD >= 0`.
    pub fn new(
        level: u64,
        coeffs: Vec<i64>,
        support: impl IntoIterator<Item = Vec<i64>>,
    ) -> Result<Self> {
        let d = coeffs.len().saturating_sub(1);
        let support: BTreeSet<Vec<i64>> = support.into_iter().collect();
        for a in &support {
            if a.len() != d {
                return Err(OkounkovError::DimensionMismatch {
                    expected: d,
                    found: a.len(),
                });
            }
            if divisor_of(&coeffs, level, a).iter().any(|&v| v < 0) {
                return Err(OkounkovError::NotASection {
                    exponent: a.clone(),
                    level,
                });
            }
        }
        Ok(Self {
            level,
            coeffs,
            support,
        })
    }

    /// All of `H^0(mD)`.
    pub fn full(level: u64, coeffs: Vec<i64>) -> Result<Self> {
        let d = coeffs.len().saturating_sub(1);
        let m = level as i64;
        let lower: Vec<i64> = coeffs[1..].iter().map(|c| -m * c).collect();
        let top = m * coeffs[0];
        let mut support = Vec::new();
        if lower.iter().sum::<i64>() <= top {
            let mut a = lower.clone();
            'outer: loop {
                support.push(a.clone());
                let mut i = d;
                loop {
                    if i == 0 {
                        break 'outer;
                    }
                    i -= 1;
                    a[i] += 1;
                    if a.iter().sum::<i64>() <= top {
                        break;
                    }
                    a[i] = lower[i];
                }
            }
        }
        Self::new(level, coeffs, support)
    }

    /// Restricts to monomials with `mult_{H_i} >= ⌈mμ⌉`.
    pub fn with_hyperplane_condition(&self, i: usize, mu: f64) -> Self {
        let bound = (self.level as f64 * mu - 1e-12).ceil() as i64;
        let support = self
            .support
            .iter()
            .filter(|a| divisor_of(&self.coeffs, self.level, a)[i] >= bound)
            .cloned()
            .collect();
        Self {
            level: self.level,
            coeffs: self.coeffs.clone(),
            support,
        }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn support(&self) -> &BTreeSet<Vec<i64>> {
        &self.support
    }

    pub fn d(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `mult_{z_P}((z^a) + mD)`.
    pub fn valuation(&self, a: &[i64], flag: &ValuationFlag) -> Result<MultiIndex> {
        let w = divisor_of(&self.coeffs, self.level, a);
        let picked: Vec<u32> = flag
            .hyperplanes()?
            .into_iter()
            .map(|k| w[k] as u32)
            .collect();
        Ok(MultiIndex(picked))
    }
}

/// Coefficients of `(z^a) + mD` along `H_0, …, H_d`.
fn divisor_of(coeffs: &[i64], level: u64, a: &[i64]) -> Vec<i64> {
    let m = level as i64;
    let mut w = Vec::with_capacity(coeffs.len());
    w.push(m * coeffs[0] - a.iter().sum::<i64>());
    w.extend(a.iter().zip(&coeffs[1..]).map(|(ai, ci)| ai + m * ci));
    w
}

/// `Γ(V_•)`: valuation vectors tagged by level.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SemigroupPoints {
    pub points: BTreeSet<(MultiIndex, u64)>,
}

impl SemigroupPoints {
    pub fn at_level(&self, m: u64) -> impl Iterator<Item = &MultiIndex> {
        self.points
            .iter()
            .filter(move |(_, l)| *l == m)
            .map(|(g, _)| g)
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Valuates every monomial of every level after checking that the series is
/// graded: `V_m · V_{m'} ⊆ V_{m+m'}` whenever level `m + m'` is present.
pub fn semigroup_points(
    series: &[MonomialSeries],
    flag: &ValuationFlag,
) -> Result<SemigroupPoints> {
    let by_level: BTreeMap<u64, &MonomialSeries> = series.iter().map(|s| (s.level, s)).collect();
    for s in series {
        if s.d() != flag.d {
            return Err(OkounkovError::DimensionMismatch {
                expected: flag.d,
                found: s.d(),
            });
        }
    }
    let levels: Vec<u64> = by_level.keys().copied().collect();
    let pairs: Vec<(u64, u64)> = levels
        .iter()
        .flat_map(|&m| {
            levels
                .iter()
                .filter(move |&&k| k >= m)
                .map(move |&k| (m, k))
        })
        .filter(|(m, k)| by_level.contains_key(&(m + k)))
        .collect();
    pairs.par_iter().try_for_each(|&(m, k)| {
        let target = &by_level[&(m + k)].support;
        for a in &by_level[&m].support {
            for b in &by_level[&k].support {
                let prod: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if !target.contains(&prod) {
                    return Err(OkounkovError::GradingViolation {
                        left: a.clone(),
                        left_level: m,
                        right: b.clone(),
                        right_level: k,
                    });
                }
            }
        }
        Ok(())
    })?;
    let points = series
        .par_iter()
        .flat_map_iter(|s| {
            s.support
                .iter()
                .map(move |a| s.valuation(a, flag).map(|g| (g, s.level)))
        })
        .collect::<Result<BTreeSet<_>>>()?;
    Ok(SemigroupPoints { points })
}

/// Convex hull of `γ / m` over the points with `1 <= m <= m_max`.
pub fn okounkov_body(points: &SemigroupPoints, m_max: u64) -> Result<Polytope> {
    let normalized: Vec<Vec<f64>> = points
        .points
        .iter()
        .filter(|(_, m)| (1..=m_max).contains(m))
        .map(|(g, m)| g.0.iter().map(|&e| e as f64 / *m as f64).collect())
        .collect();
    if normalized.is_empty() {
        return Err(OkounkovError::EmptySeries(m_max));
    }
    Ok(convex_hull(&normalized)?)
}

/// `dim V`, which for a monomial series equals the number of distinct
/// valuation vectors; the two are compared and a mismatch is a bug.
pub fn dim_via_valuations(series: &MonomialSeries, flag: &ValuationFlag) -> Result<usize> {
    let distinct = series
        .support
        .iter()
        .map(|a| series.valuation(a, flag))
        .collect::<Result<BTreeSet<_>>>()?
        .len();
    debug_assert_eq!(distinct, series.support.len());
    Ok(distinct)
}

/// `(vol Δ_m, dim V_m / m^d)` for the full series of `H_0` on `P^d` with the
/// body built from levels `1..=m`.
pub fn volume_vs_dimension(d: usize, m: u64) -> Result<(f64, f64)> {
    let mut coeffs = vec![0; d + 1];
    coeffs[0] = 1;
    let series: Vec<MonomialSeries> = (1..=m)
        .map(|k| MonomialSeries::full(k, coeffs.clone()))
        .collect::<Result<_>>()?;
    let flag = ValuationFlag::origin(d);
    let body = okounkov_body(&semigroup_points(&series, &flag)?, m)?;
    let dim = dim_via_valuations(&series[m as usize - 1], &flag)? as f64;
    Ok((body.volume(), dim / (m as f64).powi(d as i32)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(e: &[u32], c: i64) -> Poly {
        [(MultiIndex(e.to_vec()), Rational64::from_integer(c))]
            .into_iter()
            .collect()
    }

    #[test]
    fn lexicographic_minimum() {
        let flag = ValuationFlag::origin(2);
        assert_eq!(
            ord_lex(&mono(&[0, 0], 1), &flag).unwrap(),
            MultiIndex::zero(2)
        );
        let f = poly_add(&mono(&[2, 1], 1), &mono(&[3, 0], -4));
        assert_eq!(ord_lex(&f, &flag).unwrap(), MultiIndex(vec![2, 1]));
        // z_1 (z_1 + z_2) = z_1^2 + z_1 z_2, and ord(z_1 + z_2) = (0, 1)
        let sum = poly_add(&mono(&[1, 0], 1), &mono(&[0, 1], 1));
        let g = poly_mul(&mono(&[1, 0], 1), &sum);
        assert_eq!(ord_lex(&sum, &flag).unwrap(), MultiIndex(vec![0, 1]));
        assert_eq!(ord_lex(&g, &flag).unwrap(), MultiIndex(vec![1, 1]));
        let swapped = ValuationFlag::new(2, FlagCenter::TorusFixed(0), vec![1, 0]).unwrap();
        assert_eq!(ord_lex(&f, &swapped).unwrap(), MultiIndex(vec![0, 3]));
        assert!(matches!(
            ord_lex(&Poly::new(), &flag),
            Err(OkounkovError::ValuationOfZero)
        ));
    }

    #[test]
    fn cancellation_drops_terms() {
        let f = mono(&[1], 2);
        assert!(poly_add(&f, &mono(&[1], -2)).is_empty());
    }

    #[test]
    fn flags_validate_order() {
        assert!(ValuationFlag::new(2, FlagCenter::TorusFixed(0), vec![0, 0]).is_err());
        assert!(ValuationFlag::new(2, FlagCenter::TorusFixed(3), vec![0, 1]).is_err());
        let flag = ValuationFlag::new(2, FlagCenter::Regular(vec![1.0, 1.0]), vec![0, 1]).unwrap();
        assert!(matches!(
            mult_first_coordinate(&[1.0, 0.0, 0.0], &flag),
            Err(OkounkovError::UnsupportedCenter(_))
        ));
    }

    #[test]
    fn first_coordinate_reads_coefficient() {
        let flag = ValuationFlag::origin(2);
        assert_eq!(mult_first_coordinate(&[0.0, 2.0, 3.0], &flag).unwrap(), 2.0);
        // at P_2 the parameters are X_0/X_2, X_1/X_2
        let flag = ValuationFlag::new(2, FlagCenter::TorusFixed(2), vec![1, 0]).unwrap();
        assert_eq!(
            mult_vector(&[5.0, 2.0, 3.0], &flag).unwrap(),
            vec![2.0, 5.0]
        );
    }

    #[test]
    fn projective_line_semigroup() {
        let s = MonomialSeries::full(2, vec![1, 0]).unwrap();
        let pts = semigroup_points(std::slice::from_ref(&s), &ValuationFlag::origin(1)).unwrap();
        let got: Vec<(Vec<u32>, u64)> = pts.points.iter().map(|(g, m)| (g.0.clone(), *m)).collect();
        assert_eq!(got, vec![(vec![0], 2), (vec![1], 2), (vec![2], 2)]);
        let cond = MonomialSeries::full(4, vec![1, 0])
            .unwrap()
            .with_hyperplane_condition(1, 0.5);
        let pts = semigroup_points(&[cond], &ValuationFlag::origin(1)).unwrap();
        assert_eq!(
            pts.at_level(4).map(|g| g.0[0]).collect::<Vec<_>>(),
            vec![2, 3, 4]
        );
        assert!(semigroup_points(&[], &ValuationFlag::origin(1))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn grading_violation_is_an_error() {
        let v1 = MonomialSeries::new(1, vec![1, 0], [vec![0], vec![1]]).unwrap();
        let v2 = MonomialSeries::new(2, vec![1, 0], [vec![0], vec![2]]).unwrap();
        let err = semigroup_points(&[v1, v2], &ValuationFlag::origin(1)).unwrap_err();
        assert!(matches!(
            err,
            OkounkovError::GradingViolation {
                left_level: 1,
                right_level: 1,
                ..
            }
        ));
    }

    #[test]
    fn simplex_body_on_the_plane() {
        let series: Vec<_> = (1..=3)
            .map(|m| MonomialSeries::full(m, vec![1, 0, 0]).unwrap())
            .collect();
        let body = okounkov_body(
            &semigroup_points(&series, &ValuationFlag::origin(2)).unwrap(),
            3,
        )
        .unwrap();
        let simplex = convex_hull(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(body.same_vertices(&simplex, 0.0));
        assert!(matches!(
            okounkov_body(&SemigroupPoints::default(), 3),
            Err(OkounkovError::EmptySeries(3))
        ));
    }

    #[test]
    fn single_monomial_body_is_a_point() {
        let series: Vec<_> = (1..=4)
            .map(|m| MonomialSeries::new(m, vec![1, 0, 0], [vec![m as i64, 0]]).unwrap())
            .collect();
        let body = okounkov_body(
            &semigroup_points(&series, &ValuationFlag::origin(2)).unwrap(),
            4,
        )
        .unwrap();
        assert_eq!(body.vertices(), &[vec![1.0, 0.0]]);
    }

    #[test]
    fn half_segment_under_base_condition() {
        let series: Vec<_> = (1..=6)
            .map(|m| {
                MonomialSeries::full(m, vec![1, 0])
                    .unwrap()
                    .with_hyperplane_condition(1, 0.5)
            })
            .collect();
        let body = okounkov_body(
            &semigroup_points(&series, &ValuationFlag::origin(1)).unwrap(),
            6,
        )
        .unwrap();
        assert_eq!(body.bounding_box(), vec![(0.5, 1.0)]);
    }

    #[test]
    fn dimension_counts() {
        let flag = ValuationFlag::origin(2);
        let v =
            MonomialSeries::new(2, vec![1, 0, 0], [vec![0, 0], vec![1, 0], vec![1, 1]]).unwrap();
        assert_eq!(dim_via_valuations(&v, &flag).unwrap(), 3);
        assert_eq!(
            dim_via_valuations(&MonomialSeries::new(2, vec![1, 0, 0], []).unwrap(), &flag).unwrap(),
            0
        );
        assert_eq!(
            dim_via_valuations(&MonomialSeries::full(5, vec![1, 0, 0]).unwrap(), &flag).unwrap(),
            21
        );
    }
}

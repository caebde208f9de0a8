use serde::{Deserialize, Serialize};

use super::{DivisorError, Result, SIGN_TOL};
use crate::convex::{
    convex_hull, ExactConjugate, GridConvexFunction, Polytope, UniformGrid, GEOM_TOL,
};

/// Green potential `u` in the variables `s_i = log|z_i|^2`.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    /// `u = deg·log(a_0 + Σ a_i e^{s_i}) - Σ_{i>=1} c_i s_i`, i.e. the metric
    /// `deg·log(a_0 + Σ a_i |z_i|^2)` moved onto the divisor's coefficients.
    Canonical { a: Vec<f64> },
    /// Piecewise-linear interpolant of convex samples (one dimension only),
    /// continued affinely with slopes `-c_1` and `c_0`.
    Sampled(GridConvexFunction),
}

/// A torus-invariant arithmetic divisor `(Σ c_k H_k, g)` on `P^d` over `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToricArithDivisor {
    d: usize,
    coeffs: Vec<f64>,
    potential: Potential,
    twist: f64,
}

/// Serialized form of a divisor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivisorRecord {
    pub d: usize,
    pub coeffs: Vec<f64>,
    pub potential: PotentialRecord,
    #[serde(default)]
    pub twist: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialRecord {
    Canonical {
        a: Vec<f64>,
    },
    Sampled {
        s_min: f64,
        s_max: f64,
        values: Vec<f64>,
    },
}

impl ToricArithDivisor {
    /// Validates and builds a divisor.
    pub fn new(d: usize, coeffs: Vec<f64>, potential: Potential, twist: f64) -> Result<Self> {
        if d == 0 {
            return Err(DivisorError::Invalid(
                "fiber dimension must be at least 1".into(),
            ));
        }
        if coeffs.len() != d + 1 {
            return Err(DivisorError::Invalid(format!(
                "expected {} coefficients, found {}",
                d + 1,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) || !twist.is_finite() {
            return Err(DivisorError::Invalid(
                "non-finite coefficient or twist".into(),
            ));
        }
        let deg: f64 = coeffs.iter().sum();
        if deg < -GEOM_TOL {
            return Err(DivisorError::Invalid(format!("negative degree {deg}")));
        }
        match &potential {
            Potential::Canonical { a } => {
                if a.len() != d + 1 {
                    return Err(DivisorError::Invalid(format!(
                        "expected {} family parameters, found {}",
                        d + 1,
                        a.len()
                    )));
                }
                if let Some((index, &value)) = a
                    .iter()
                    .enumerate()
                    .find(|(_, v)| !(v.is_finite() && **v > 0.0))
                {
                    return Err(DivisorError::NonPositiveParameter { index, value });
                }
            }
            Potential::Sampled(u) => {
                if d != 1 || u.dim() != 1 {
                    return Err(DivisorError::Unsupported(
                        "sampled potentials are only supported on the projective line".into(),
                    ));
                }
                let (found_lo, found_hi) = u.recession()[0];
                let (lo, hi) = (-coeffs[1], coeffs[0]);
                let slack = GEOM_TOL * (1.0 + lo.abs().max(hi.abs()));
                if (found_lo - lo).abs() > slack || (found_hi - hi).abs() > slack {
                    return Err(DivisorError::RecessionMismatch {
                        lo,
                        hi,
                        found_lo,
                        found_hi,
                    });
                }
            }
        }
        Ok(Self {
            d,
            coeffs,
            potential,
            twist,
        })
    }

    /// `H_0` with the canonical metric of parameters `a` and no twist.
    pub fn canonical(a: &[f64]) -> Result<Self> {
        let d = a.len().saturating_sub(1);
        let mut coeffs = vec![0.0; a.len()];
        if let Some(c) = coeffs.first_mut() {
            *c = 1.0;
        }
        Self::new(d, coeffs, Potential::Canonical { a: a.to_vec() }, 0.0)
    }

    /// Samples the potential of `self` (plus nothing else) on a grid, keeping
    /// coefficients and twist. One dimension only.
    pub fn sampled(&self, grid: UniformGrid) -> Result<Self> {
        if self.d != 1 {
            return Err(DivisorError::Unsupported("sampling needs d = 1".into()));
        }
        let u = GridConvexFunction::from_fn(vec![grid], vec![self.slope_range_1d()], |s| {
            self.potential_at(s)
        })?;
        Self::new(1, self.coeffs.clone(), Potential::Sampled(u), self.twist)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn twist(&self) -> f64 {
        self.twist
    }

    pub fn degree(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    /// Family parameters when the potential is canonical.
    pub fn family(&self) -> Option<&[f64]> {
        match &self.potential {
            Potential::Canonical { a } => Some(a),
            Potential::Sampled(_) => None,
        }
    }

    /// `[-c_1, c_0]`, the body of a divisor on the projective line.
    pub(crate) fn slope_range_1d(&self) -> (f64, f64) {
        (-self.coeffs[1], self.coeffs[0])
    }

    /// `u(s)` without the twist.
    pub fn potential_at(&self, s: &[f64]) -> f64 {
        match &self.potential {
            Potential::Canonical { a } => {
                let deg = self.degree();
                let inner: f64 = a[0]
                    + a[1..]
                        .iter()
                        .zip(s)
                        .map(|(ai, si)| ai * si.exp())
                        .sum::<f64>();
                let linear: f64 = self.coeffs[1..].iter().zip(s).map(|(c, si)| c * si).sum();
                deg * inner.ln() - linear
            }
            Potential::Sampled(u) => u.eval(s[0]).unwrap_or(f64::NAN),
        }
    }

    /// The Green function `g = u + λ` at `s`.
    pub fn green_at(&self, s: &[f64]) -> f64 {
        self.potential_at(s) + self.twist
    }

    /// Multiplicity coordinates `(w_0, …, w_d)` of a body point `x`.
    pub fn w_coords(&self, x: &[f64]) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.d + 1);
        w.push(self.coeffs[0] - x.iter().sum::<f64>());
        w.extend(x.iter().zip(&self.coeffs[1..]).map(|(xi, ci)| xi + ci));
        w
    }

    /// Body point with multiplicity coordinates `w` (only `w_1..w_d` are read).
    pub fn x_coords(&self, w: &[f64]) -> Vec<f64> {
        w[1..]
            .iter()
            .zip(&self.coeffs[1..])
            .map(|(wi, ci)| wi - ci)
            .collect()
    }

    /// Vertices of `Δ_D`, the vertex `deg·e_k` in multiplicity coordinates first for `k = 0`.
    pub fn body_vertices(&self) -> Vec<Vec<f64>> {
        let deg = self.degree().max(0.0);
        (0..=self.d)
            .map(|k| {
                let mut w = vec![0.0; self.d + 1];
                w[k] = deg;
                self.x_coords(&w)
            })
            .collect()
    }

    /// `Δ_D = {x_i >= -c_i, Σ x <= c_0}`.
    pub fn body(&self) -> Result<Polytope> {
        Ok(convex_hull(&self.body_vertices())?)
    }

    pub(crate) fn exact_conjugate(&self) -> Result<Option<ExactConjugate>> {
        match &self.potential {
            Potential::Sampled(u) => Ok(Some(ExactConjugate::new(u)?)),
            Potential::Canonical { .. } => Ok(None),
        }
    }

    /// `D + (0, t)`.
    pub fn add_twist(&self, t: f64) -> Self {
        Self {
            twist: self.twist + t,
            ..self.clone()
        }
    }

    pub fn with_twist(&self, t: f64) -> Self {
        Self {
            twist: t,
            ..self.clone()
        }
    }

    /// `t·D` for `t > 0`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(DivisorError::Invalid(format!(
                "scale factor {t} must be positive"
            )));
        }
        let potential = match &self.potential {
            Potential::Canonical { a } => Potential::Canonical { a: a.clone() },
            Potential::Sampled(u) => {
                let values = u.values().iter().map(|v| t * v).collect();
                let (lo, hi) = u.recession()[0];
                Potential::Sampled(GridConvexFunction::new(
                    u.axes().to_vec(),
                    values,
                    vec![(t * lo, t * hi)],
                )?)
            }
        };
        let coeffs = self.coeffs.iter().map(|c| t * c).collect();
        Self::new(self.d, coeffs, potential, t * self.twist)
    }

    /// `D + E`; canonical potentials must share their parameters and sampled
    /// ones their grid.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(DivisorError::Invalid("dimensions differ".into()));
        }
        let potential = match (&self.potential, &other.potential) {
            (Potential::Canonical { a }, Potential::Canonical { a: b }) if a == b => {
                Potential::Canonical { a: a.clone() }
            }
            (Potential::Sampled(u), Potential::Sampled(v)) if u.axes() == v.axes() => {
                let values = u.values().iter().zip(v.values()).map(|(x, y)| x + y).collect();
                let (l1, h1) = u.recession()[0];
                let (l2, h2) = v.recession()[0];
                Potential::Sampled(GridConvexFunction::new(u.axes().to_vec(), values, vec![(l1 + l2, h1 + h2)])?)
            }
            _ => {
                return Err(DivisorError::Unsupported(
                    "sums need canonical potentials with equal parameters or sampled potentials on one grid".into(),
                ))
            }
        };
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Self::new(self.d, coeffs, potential, self.twist + other.twist)
    }

    /// `D - E` for canonical potentials with equal parameters (the canonical
    /// form is linear in coefficients and twist); the result must have
    /// nonnegative degree.
    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        match (&self.potential, &other.potential) {
            (Potential::Canonical { a }, Potential::Canonical { a: b })
                if a == b && self.d == other.d =>
            {
                let coeffs = self
                    .coeffs
                    .iter()
                    .zip(&other.coeffs)
                    .map(|(x, y)| x - y)
                    .collect();
                Self::new(
                    self.d,
                    coeffs,
                    Potential::Canonical { a: a.clone() },
                    self.twist - other.twist,
                )
            }
            _ => Err(DivisorError::Unsupported(
                "differences need equal canonical parameters".into(),
            )),
        }
    }

    /// `D + (z^k)^`: coefficients shift by `div(z^k)` and the potential by `-k·s`.
    pub fn principal_twist(&self, k: &[i64]) -> Result<Self> {
        if k.len() != self.d {
            return Err(DivisorError::Invalid(format!(
                "expected {} exponents",
                self.d
            )));
        }
        let mut coeffs = self.coeffs.clone();
        let total: i64 = k.iter().sum();
        coeffs[0] -= total as f64;
        for (c, ki) in coeffs[1..].iter_mut().zip(k) {
            *c += *ki as f64;
        }
        let potential = match &self.potential {
            Potential::Canonical { a } => Potential::Canonical { a: a.clone() },
            Potential::Sampled(u) => {
                let g = u.axes()[0];
                let kf = k[0] as f64;
                let values = u
                    .values()
                    .iter()
                    .zip(g.points())
                    .map(|(v, s)| v - kf * s)
                    .collect();
                let (lo, hi) = u.recession()[0];
                Potential::Sampled(GridConvexFunction::new(
                    vec![g],
                    values,
                    vec![(lo - kf, hi - kf)],
                )?)
            }
        };
        Self::new(self.d, coeffs, potential, self.twist)
    }

    /// `c_k >= 0` for all `k` and `g >= 0` everywhere.
    pub fn is_effective(&self) -> Result<bool> {
        if self.coeffs.iter().any(|&c| c < -SIGN_TOL) {
            return Ok(false);
        }
        // inf g = -u*(0) + λ = 2 G(0), and 0 lies in the body when c >= 0
        let g = self.transform()?;
        Ok(g.eval_point(&vec![0.0; self.d]) >= -SIGN_TOL)
    }

    /// Nef: `G >= 0` on the body, equivalently at its vertices.
    pub fn is_nef(&self) -> Result<bool> {
        let g = self.transform()?;
        Ok(self
            .body_vertices()
            .iter()
            .all(|v| g.eval_point(v) >= -SIGN_TOL))
    }

    /// Big: positive degree and `max G > 0`.
    pub fn is_big(&self) -> Result<bool> {
        Ok(self.degree() > GEOM_TOL && self.transform()?.max_value() > 0.0)
    }

    pub fn record(&self) -> DivisorRecord {
        let potential = match &self.potential {
            Potential::Canonical { a } => PotentialRecord::Canonical { a: a.clone() },
            Potential::Sampled(u) => {
                let g = u.axes()[0];
                PotentialRecord::Sampled {
                    s_min: g.min,
                    s_max: g.max,
                    values: u.values().to_vec(),
                }
            }
        };
        DivisorRecord {
            d: self.d,
            coeffs: self.coeffs.clone(),
            potential,
            twist: self.twist,
        }
    }

    pub fn from_record(r: &DivisorRecord) -> Result<Self> {
        let potential = match &r.potential {
            PotentialRecord::Canonical { a } => Potential::Canonical { a: a.clone() },
            PotentialRecord::Sampled {
                s_min,
                s_max,
                values,
            } => {
                if r.coeffs.len() != 2 {
                    return Err(DivisorError::Unsupported(
                        "sampled potentials are only supported on the projective line".into(),
                    ));
                }
                let grid = UniformGrid::new(*s_min, *s_max, values.len())?;
                let rec = (-r.coeffs[1], r.coeffs[0]);
                Potential::Sampled(GridConvexFunction::new(
                    vec![grid],
                    values.clone(),
                    vec![rec],
                )?)
            }
        };
        Self::new(r.d, r.coeffs.clone(), potential, r.twist)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effectivity_of_canonical_examples() {
        assert!(ToricArithDivisor::canonical(&[1.0, 1.0])
            .unwrap()
            .is_effective()
            .unwrap());
        assert!(!ToricArithDivisor::canonical(&[0.25, 2.0])
            .unwrap()
            .is_effective()
            .unwrap());
        let d = ToricArithDivisor::canonical(&[1.0, 1.0, 1.0])
            .unwrap()
            .with_twist(-1.0);
        assert!(!d.is_effective().unwrap());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            ToricArithDivisor::canonical(&[1.0, 0.0]),
            Err(DivisorError::NonPositiveParameter { index: 1, .. })
        ));
        let g = UniformGrid::new(-5.0, 5.0, 11).unwrap();
        let u = GridConvexFunction::from_fn(vec![g], vec![(0.0, 2.0)], |s| (1.0 + s[0].exp()).ln())
            .unwrap();
        let r = ToricArithDivisor::new(1, vec![1.0, 0.0], Potential::Sampled(u), 0.0);
        assert!(matches!(r, Err(DivisorError::RecessionMismatch { .. })));
    }

    #[test]
    fn sampled_record_round_trips() {
        let d = ToricArithDivisor::canonical(&[2.0, 0.5])
            .unwrap()
            .sampled(UniformGrid::new(-30.0, 30.0, 301).unwrap())
            .unwrap()
            .add_twist(0.25);
        let back = ToricArithDivisor::from_record(&d.record()).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn principal_twist_keeps_multiplicity_coordinates() {
        let d = ToricArithDivisor::canonical(&[1.0, 2.0, 4.0]).unwrap();
        let e = d.principal_twist(&[1, -2]).unwrap();
        assert_eq!(e.coeffs(), &[2.0, 1.0, -2.0]);
        let x = [0.2, 0.3];
        let w = d.w_coords(&x);
        let x2: Vec<f64> = x.iter().zip([1.0, -2.0]).map(|(a, k)| a - k).collect();
        assert!(e
            .w_coords(&x2)
            .iter()
            .zip(&w)
            .all(|(a, b)| (a - b).abs() < 1e-15));
        let s = [0.7, -1.1];
        let lhs = e.potential_at(&s);
        let rhs = d.potential_at(&s) - (s[0] - 2.0 * s[1]);
        assert!((lhs - rhs).abs() < 1e-12);
    }
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Result, ZariskiError};
use crate::convex::{
    bisect_boundary, ExactConjugate, GridConvexFunction, UniformGrid, CONVEXITY_TOL,
};
use crate::divisor::{is_prime, Potential, ToricArithDivisor};

/// Slack on pointwise comparisons of sampled potentials.
pub const GRID_TOL: f64 = 1e-9;

/// A rotation-invariant arithmetic divisor on `P^1_Z`:
/// `e_0 H_0 + e_1 H_1 + Σ γ_p F_p` with Green function `h(log|z|^2)`.
///
/// `h` is sampled on a uniform grid and continued affinely with slopes `-e_1`
/// and `e_0`. It need not be convex: negative parts of decompositions are
/// differences of convex functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotInvariantDivisor {
    pub e0: f64,
    pub e1: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub values: Vec<f64>,
    #[serde(default)]
    pub vertical: BTreeMap<u64, f64>,
}

impl RotInvariantDivisor {
    pub fn new(
        e0: f64,
        e1: f64,
        grid: UniformGrid,
        values: Vec<f64>,
        vertical: BTreeMap<u64, f64>,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(ZariskiError::Inconsistent(format!(
                "{} samples on a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if !(e0.is_finite() && e1.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(ZariskiError::Inconsistent("non-finite data".into()));
        }
        if -e1 > e0 + GRID_TOL {
            return Err(ZariskiError::Inconsistent(format!(
                "slope range [{}, {e0}] is empty",
                -e1
            )));
        }
        if let Some(&p) = vertical.keys().find(|&&p| !is_prime(p)) {
            return Err(ZariskiError::Inconsistent(format!(
                "vertical fiber over non-prime {p}"
            )));
        }
        Ok(Self {
            e0,
            e1,
            s_min: grid.min,
            s_max: grid.max,
            values,
            vertical,
        })
    }

    /// Samples the Green function `u + λ` of a divisor on the projective line.
    pub fn from_divisor(divisor: &ToricArithDivisor, grid: UniformGrid) -> Result<Self> {
        if divisor.d() != 1 {
            return Err(ZariskiError::Unsupported(format!(
                "dimension {} (surfaces need d = 1)",
                divisor.d()
            )));
        }
        let c = divisor.coeffs();
        let values = grid
            .points()
            .iter()
            .map(|&s| divisor.green_at(&[s]))
            .collect();
        Self::new(c[0], c[1], grid, values, BTreeMap::new())
    }

    /// The zero divisor on `grid`.
    pub fn zero(grid: UniformGrid) -> Self {
        Self {
            e0: 0.0,
            e1: 0.0,
            s_min: grid.min,
            s_max: grid.max,
            values: vec![0.0; grid.len()],
            vertical: BTreeMap::new(),
        }
    }

    pub fn grid(&self) -> UniformGrid {
        UniformGrid::new(self.s_min, self.s_max, self.values.len())
            .expect("validated at construction")
    }

    pub fn degree(&self) -> f64 {
        self.e0 + self.e1
    }

    /// `Σ γ_p log p`, the shift a vertical part adds to the concave transform.
    pub fn vertical_shift(&self) -> f64 {
        self.vertical
            .iter()
            .map(|(&p, &g)| g * (p as f64).ln())
            .sum()
    }

    /// `h(s)`, continued affinely outside the grid.
    pub fn h(&self, s: f64) -> f64 {
        let g = self.grid();
        let v = &self.values;
        if s <= g.min {
            return v[0] - self.e1 * (s - g.min);
        }
        if s >= g.max {
            return v[g.n - 1] + self.e0 * (s - g.max);
        }
        let t = (s - g.min) / g.step();
        let i = (t.floor() as usize).min(g.n - 2);
        v[i] + (t - i as f64) * (v[i + 1] - v[i])
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.s_min != other.s_min
            || self.s_max != other.s_max
            || self.values.len() != other.values.len()
        {
            return Err(ZariskiError::Inconsistent(
                "divisors live on different grids".into(),
            ));
        }
        Ok(())
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self> {
        self.same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + sign * b)
            .collect();
        let mut vertical = self.vertical.clone();
        for (&p, &g) in &other.vertical {
            *vertical.entry(p).or_insert(0.0) += sign * g;
        }
        vertical.retain(|_, g| *g != 0.0);
        Ok(Self {
            e0: self.e0 + sign * other.e0,
            e1: self.e1 + sign * other.e1,
            s_min: self.s_min,
            s_max: self.s_max,
            values,
            vertical,
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }

    /// `D + (0, t)`: the Green function moves up by `t`.
    pub fn add_twist(&self, t: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v + t).collect(),
            ..self.clone()
        }
    }

    pub fn add_vertical(&self, p: u64, gamma: f64) -> Result<Self> {
        if !is_prime(p) {
            return Err(ZariskiError::Inconsistent(format!(
                "vertical fiber over non-prime {p}"
            )));
        }
        let mut out = self.clone();
        *out.vertical.entry(p).or_insert(0.0) += gamma;
        Ok(out)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            e0: t * self.e0,
            e1: t * self.e1,
            s_min: self.s_min,
            s_max: self.s_max,
            values: self.values.iter().map(|v| t * v).collect(),
            vertical: self.vertical.iter().map(|(&p, &g)| (p, t * g)).collect(),
        }
    }

    /// Largest violation of `self <= other`: coefficients, vertical parts and
    /// Green functions on the grid (nonpositive when the order holds).
    pub fn excess_over(&self, other: &Self) -> Result<f64> {
        self.same_grid(other)?;
        let diff = other.try_sub(self)?;
        let mut worst = (-diff.e0).max(-diff.e1);
        for g in diff.vertical.values() {
            worst = worst.max(-g);
        }
        // a vertical fiber γ F_p moves the Green function by 2γ log p
        let lift = 2.0 * diff.vertical_shift();
        for v in &diff.values {
            worst = worst.max(-(v + lift));
        }
        Ok(worst)
    }

    pub fn is_effective(&self) -> bool {
        self.e0 >= -GRID_TOL
            && self.e1 >= -GRID_TOL
            && self.vertical.values().all(|&g| g >= -GRID_TOL)
            && self.values.iter().all(|&v| v >= -GRID_TOL)
    }

    /// The Green function as a convex grid function, if it is one.
    pub fn convex_potential(&self) -> Result<GridConvexFunction> {
        Ok(GridConvexFunction::new(
            vec![self.grid()],
            self.values.clone(),
            vec![(-self.e1, self.e0)],
        )?)
    }

    /// Concave transform `G(x) = -h*(x)/2 + Σ γ_p log p` on `[-e_1, e_0]`.
    pub fn transform(&self) -> Result<RotTransform> {
        let conj = if self.degree() > GRID_TOL {
            Some(ExactConjugate::new(&self.convex_potential()?)?)
        } else {
            None
        };
        Ok(RotTransform {
            conj,
            lo: -self.e1,
            hi: self.e0,
            shift: self.vertical_shift(),
        })
    }

    /// `2 ∫ max(G, 0)` over the body; zero for degree-zero divisors.
    pub fn volume(&self) -> Result<f64> {
        Ok(self.transform()?.volume())
    }

    /// Height of the rational point `a/b` (`a, b` coprime and nonzero):
    /// `e_1 log|a| + e_0 log|b| + h(2 log|a/b|)/2 + Σ γ_p log p`.
    pub fn height_rational(&self, a: i64, b: i64) -> f64 {
        let (fa, fb) = ((a as f64).abs(), (b as f64).abs());
        self.e1 * fa.ln()
            + self.e0 * fb.ln()
            + 0.5 * self.h(2.0 * (fa / fb).ln())
            + self.vertical_shift()
    }

    /// Height of a root of unity: only the archimedean place contributes.
    pub fn height_root_of_unity(&self) -> f64 {
        0.5 * self.h(0.0) + self.vertical_shift()
    }
}

/// The concave transform of a nef candidate, piecewise linear on the body.
#[derive(Debug, Clone)]
pub struct RotTransform {
    conj: Option<ExactConjugate>,
    lo: f64,
    hi: f64,
    shift: f64,
}

impl RotTransform {
    pub fn body(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.conj {
            Some(c) => c
                .eval(x)
                .map_or(f64::NEG_INFINITY, |v| -0.5 * v + self.shift),
            None => f64::NEG_INFINITY,
        }
    }

    /// `(argmax, max)` of `G`.
    pub fn max(&self) -> (f64, f64) {
        match &self.conj {
            Some(c) => {
                let (x, v) = c
                    .min_on(self.lo, self.hi)
                    .expect("body endpoints lie in the domain");
                (x, -0.5 * v + self.shift)
            }
            None => (self.lo, f64::NEG_INFINITY),
        }
    }

    /// `Θ = {G >= 0}`, endpoints found by bisection.
    pub fn theta(&self) -> Option<(f64, f64)> {
        let (xm, gm) = self.max();
        if gm <= 0.0 {
            return None;
        }
        let g = |x: f64| self.eval(x);
        let a = if g(self.lo) >= 0.0 {
            self.lo
        } else {
            bisect_boundary(g, xm, self.lo)
        };
        let b = if g(self.hi) >= 0.0 {
            self.hi
        } else {
            bisect_boundary(g, xm, self.hi)
        };
        Some((a, b))
    }

    /// `2 ∫_a^b G`, exact for the piecewise-linear transform.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match &self.conj {
            Some(c) if b > a => {
                2.0 * (-0.5 * c.integral(a, b).unwrap_or(f64::NAN) + self.shift * (b - a))
            }
            _ => 0.0,
        }
    }

    pub fn volume(&self) -> f64 {
        self.theta().map_or(0.0, |(a, b)| self.integral(a, b))
    }
}

/// Sampled necessary conditions for nefness.
///
/// Passing does not prove nefness: heights are checked on finitely many
/// points, and whether convexity, the slope range and the barrier are also
/// sufficient for this family is not settled.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NefCertificate {
    pub convex: bool,
    pub slope_range: bool,
    /// `h(s) + 2 Σ γ_p log p >= max(-e_1 s, e_0 s)` on the grid.
    pub barrier: bool,
    pub barrier_slack: f64,
    pub heights: Vec<(String, f64)>,
    pub passed: bool,
    pub sampled_necessary_only: bool,
}

/// Rational points `±a/b` with `1 <= a, b <= bound` in lowest terms.
pub fn rational_test_points(bound: i64) -> Vec<(i64, i64)> {
    let gcd = |mut x: i64, mut y: i64| {
        while y != 0 {
            (x, y) = (y, x % y);
        }
        x
    };
    let mut out = Vec::new();
    for a in 1..=bound {
        for b in 1..=bound {
            if gcd(a, b) == 1 {
                out.push((a, b));
                out.push((-a, b));
            }
        }
    }
    out
}

/// Checks convexity, slopes within `[-e_1, e_0]`, the barrier and heights of
/// the given rational points and of roots of unity.
pub fn certify_nef(p: &RotInvariantDivisor, points: &[(i64, i64)]) -> NefCertificate {
    let grid = p.grid();
    let scale = p.values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let convex = p
        .values
        .windows(3)
        .all(|w| w[0] - 2.0 * w[1] + w[2] >= -CONVEXITY_TOL * scale);
    let h = grid.step();
    let slack = GRID_TOL * (1.0 + p.e0.abs().max(p.e1.abs()));
    let slope_range = p.values.windows(2).all(|w| {
        let s = (w[1] - w[0]) / h;
        s >= -p.e1 - slack && s <= p.e0 + slack
    });
    let lift = 2.0 * p.vertical_shift();
    let barrier_slack = grid
        .points()
        .iter()
        .zip(&p.values)
        .map(|(&s, &v)| v + lift - (-p.e1 * s).max(p.e0 * s))
        .fold(f64::INFINITY, f64::min);
    let barrier = barrier_slack >= -GRID_TOL;
    let mut heights: Vec<(String, f64)> = points
        .iter()
        .map(|&(a, b)| (format!("{a}/{b}"), p.height_rational(a, b)))
        .collect();
    heights.push(("root of unity".into(), p.height_root_of_unity()));
    let passed = convex && slope_range && barrier && heights.iter().all(|(_, v)| *v >= -GRID_TOL);
    NefCertificate {
        convex,
        slope_range,
        barrier,
        barrier_slack,
        heights,
        passed,
        sampled_necessary_only: true,
    }
}

/// Builds the Green-function samples of a canonical or sampled divisor.
pub(crate) fn divisor_grid(divisor: &ToricArithDivisor, fallback: UniformGrid) -> UniformGrid {
    match divisor.potential() {
        Potential::Sampled(u) => u.axes()[0],
        Potential::Canonical { .. } => fallback,
    }
}

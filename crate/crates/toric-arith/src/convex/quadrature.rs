use std::fmt;
use std::sync::Arc;

use super::optimize::{bisect_boundary, golden_max, superlevel_interval};
use super::{dot, ConvexError, Halfspace, Polytope, Result};

/// A concave function on (a subset of) `R^dim`.
pub trait ConcaveFunction: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64]) -> f64;

    /// `∫_lo^hi f(prefix, t) dt` along the last coordinate, when a closed form
    /// is available; `None` makes the integrator fall back to quadrature.
    fn line_integral(&self, _prefix: &[f64], _lo: f64, _hi: f64) -> Option<f64> {
        None
    }
}

impl<T: ConcaveFunction + ?Sized> ConcaveFunction for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (**self).eval(x)
    }
    fn line_integral(&self, prefix: &[f64], lo: f64, hi: f64) -> Option<f64> {
        (**self).line_integral(prefix, lo, hi)
    }
}

impl<T: ConcaveFunction + ?Sized> ConcaveFunction for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (**self).eval(x)
    }
    fn line_integral(&self, prefix: &[f64], lo: f64, hi: f64) -> Option<f64> {
        (**self).line_integral(prefix, lo, hi)
    }
}

/// `inner - shift`.
#[derive(Debug, Clone)]
pub struct Shifted<F> {
    pub inner: F,
    pub shift: f64,
}

impl<F: ConcaveFunction> ConcaveFunction for Shifted<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        self.inner.eval(x) - self.shift
    }
    fn line_integral(&self, prefix: &[f64], lo: f64, hi: f64) -> Option<f64> {
        self.inner
            .line_integral(prefix, lo, hi)
            .map(|v| v - self.shift * (hi - lo))
    }
}

/// Hides any closed-form line integral so that pure quadrature is used.
#[derive(Debug, Clone)]
pub struct QuadratureOnly<F>(pub F);

impl<F: ConcaveFunction> ConcaveFunction for QuadratureOnly<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        self.0.eval(x)
    }
}

/// A convex region: a base polytope cut by linear constraints and, optionally,
/// by the superlevel set `{level >= 0}` of a concave function.
#[derive(Clone)]
pub struct Region {
    base: Polytope,
    constraints: Vec<Halfspace>,
    feasible: Option<Polytope>,
    level: Option<Arc<dyn ConcaveFunction>>,
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Region")
            .field("base", &self.base)
            .field("constraints", &self.constraints)
            .field("has_level", &self.level.is_some())
            .finish()
    }
}

impl Region {
    pub fn new(base: Polytope) -> Self {
        Self {
            feasible: Some(base.clone()),
            base,
            constraints: Vec::new(),
            level: None,
        }
    }

    pub fn with_constraints(base: Polytope, constraints: Vec<Halfspace>) -> Result<Self> {
        let feasible = base.intersect(&constraints)?;
        Ok(Self {
            base,
            constraints,
            feasible,
            level: None,
        })
    }

    pub fn with_superlevel(mut self, level: Arc<dyn ConcaveFunction>) -> Self {
        self.level = Some(level);
        self
    }

    pub fn base(&self) -> &Polytope {
        &self.base
    }

    pub fn constraints(&self) -> &[Halfspace] {
        &self.constraints
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Base polytope intersected with the linear constraints.
    pub fn polytope(&self) -> Option<&Polytope> {
        self.feasible.as_ref()
    }

    pub fn level(&self) -> Option<&Arc<dyn ConcaveFunction>> {
        self.level.as_ref()
    }

    /// Membership by direct evaluation of every defining inequality.
    pub fn contains(&self, x: &[f64]) -> bool {
        let tol = super::GEOM_TOL;
        self.base.contains(x, tol)
            && self.constraints.iter().all(|h| h.contains(x, tol))
            && self.level.as_ref().is_none_or(|l| l.eval(x) >= 0.0)
    }

    pub fn is_empty(&self) -> Result<bool> {
        let Some(p) = &self.feasible else {
            return Ok(true);
        };
        match &self.level {
            None => Ok(false),
            Some(l) => Ok(maximize_concave(l.as_ref(), p)?.is_none_or(|(_, v)| v < 0.0)),
        }
    }

    /// The region as an interval (one dimension).
    pub fn interval(&self) -> Result<Option<(f64, f64)>> {
        if self.dim() != 1 {
            return Err(ConvexError::UnsupportedDimension(self.dim()));
        }
        let Some(p) = &self.feasible else {
            return Ok(None);
        };
        let (lo, hi) = p.bounding_box()[0];
        Ok(match &self.level {
            None => Some((lo, hi)),
            Some(l) => superlevel_interval(|t| l.eval(&[t]), lo, hi),
        })
    }
}

/// Quadrature rule for [`integrate_positive_part`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quadrature {
    /// Adaptive Gauss–Kronrod (7/15) to the given absolute tolerance.
    Adaptive { abs_tol: f64 },
    /// Fixed composite Kronrod-15 rule with this many equal panels per interval.
    Panels(usize),
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature::Adaptive { abs_tol: 1e-11 }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (k, err) = gk15(f, a, b);
    if err <= tol || depth == 0 || b - a <= 1e-15 * (1.0 + a.abs()) {
        return k;
    }
    let m = 0.5 * (a + b);
    adaptive(f, a, m, 0.5 * tol, depth - 1) + adaptive(f, m, b, 0.5 * tol, depth - 1)
}

fn integrate_1d(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rule: Quadrature) -> f64 {
    if b <= a {
        return 0.0;
    }
    match rule {
        Quadrature::Adaptive { abs_tol } => adaptive(f, a, b, abs_tol, 40),
        Quadrature::Panels(n) => {
            let n = n.max(1);
            let h = (b - a) / n as f64;
            (0..n)
                .map(|i| {
                    let lo = a + i as f64 * h;
                    let hi = if i + 1 == n { b } else { lo + h };
                    gk15(f, lo, hi).0
                })
                .sum()
        }
    }
}

/// `(lo, hi)` of the polygon slice `{y : (x1, y) in P}` from its halfspaces.
fn slice_bounds(p: &Polytope, x1: f64) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for h in p.halfspaces() {
        let rhs = h.offset - h.normal[0] * x1;
        let n2 = h.normal[1];
        if n2.abs() < 1e-14 {
            if rhs < -1e-12 {
                return None;
            }
        } else if n2 > 0.0 {
            hi = hi.min(rhs / n2);
        } else {
            lo = lo.max(rhs / n2);
        }
    }
    if lo > hi {
        if lo - hi < 1e-12 {
            let m = 0.5 * (lo + hi);
            return Some((m, m));
        }
        return None;
    }
    Some((lo, hi))
}

/// `∫_region max(g, 0) dx` for concave `g`, in dimension one or two.
///
/// The support `{g >= 0}` (intersected with the region's own superlevel set)
/// is located by golden-section search plus bisection. Inside it the
/// integrand is `g` itself, integrated by its closed-form line integral when
/// one is provided and by Gauss–Kronrod quadrature otherwise.
pub fn integrate_positive_part(
    g: &dyn ConcaveFunction,
    region: &Region,
    rule: Quadrature,
) -> Result<f64> {
    let dim = region.dim();
    if g.dim() != dim {
        return Err(ConvexError::DimensionMismatch {
            expected: dim,
            found: g.dim(),
        });
    }
    let Some(poly) = region.polytope() else {
        return Ok(0.0);
    };
    if !poly.is_full_dimensional() {
        return Ok(0.0);
    }
    let level = region.level();
    let support = |x: &[f64]| -> f64 {
        let v = g.eval(x);
        match level {
            Some(l) => v.min(l.eval(x)),
            None => v,
        }
    };
    match dim {
        1 => {
            let (lo, hi) = poly.bounding_box()[0];
            let Some((a, b)) = superlevel_interval(|t| support(&[t]), lo, hi) else {
                return Ok(0.0);
            };
            Ok(line(g, &[], a, b, rule))
        }
        2 => {
            let (p1, q1) = poly.bounding_box()[0];
            let inner = |x1: f64| -> Option<(f64, f64)> {
                let (ylo, yhi) = slice_bounds(poly, x1)?;
                superlevel_interval(|y| support(&[x1, y]), ylo, yhi)
            };
            let column_max = |x1: f64| -> f64 {
                match slice_bounds(poly, x1) {
                    Some((ylo, yhi)) => golden_max(|y| support(&[x1, y]), ylo, yhi).1,
                    None => f64::NEG_INFINITY,
                }
            };
            let Some((a, b)) = superlevel_interval(column_max, p1, q1) else {
                return Ok(0.0);
            };
            let column = |x1: f64| -> f64 {
                match inner(x1) {
                    Some((ylo, yhi)) => line(g, &[x1], ylo, yhi, rule),
                    None => 0.0,
                }
            };
            let mut cuts: Vec<f64> = poly
                .vertices()
                .iter()
                .map(|v| v[0])
                .filter(|&x| x > a && x < b)
                .collect();
            cuts.push(a);
            cuts.push(b);
            cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
            cuts.dedup();
            Ok(cuts
                .windows(2)
                .map(|w| integrate_1d(&column, w[0], w[1], rule))
                .sum())
        }
        d => Err(ConvexError::UnsupportedDimension(d)),
    }
}

fn line(g: &dyn ConcaveFunction, prefix: &[f64], lo: f64, hi: f64, rule: Quadrature) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if let Some(v) = g.line_integral(prefix, lo, hi) {
        return v;
    }
    let mut x = prefix.to_vec();
    x.push(0.0);
    let k = prefix.len();
    let f = |t: f64| {
        let mut y = x.clone();
        y[k] = t;
        g.eval(&y)
    };
    integrate_1d(&f, lo, hi, rule)
}

/// Maximum of a concave function over a polytope (dimension one or two).
pub fn maximize_concave(f: &dyn ConcaveFunction, p: &Polytope) -> Result<Option<(Vec<f64>, f64)>> {
    match p.dim() {
        1 => {
            let (lo, hi) = p.bounding_box()[0];
            let (x, v) = golden_max(|t| f.eval(&[t]), lo, hi);
            Ok(Some((vec![x], v)))
        }
        2 => {
            let (p1, q1) = p.bounding_box()[0];
            let best_y = |x1: f64| -> Option<(f64, f64)> {
                let (ylo, yhi) = slice_bounds(p, x1)?;
                Some(golden_max(|y| f.eval(&[x1, y]), ylo, yhi))
            };
            let (x1, v) = golden_max(
                |x1| best_y(x1).map_or(f64::NEG_INFINITY, |(_, v)| v),
                p1,
                q1,
            );
            Ok(best_y(x1).map(|(y, _)| (vec![x1, y], v)))
        }
        d => Err(ConvexError::UnsupportedDimension(d)),
    }
}

/// Minimum of `objective · x + offset` over the region, with a minimizer.
///
/// In two dimensions the region is swept by the lines `objective · x = t`:
/// the best level reachable on each line is concave in `t`, so the minimum is
/// the left end of its superlevel interval.
pub fn minimize_linear(
    region: &Region,
    objective: &[f64],
    offset: f64,
) -> Result<Option<(f64, Vec<f64>)>> {
    let dim = region.dim();
    if objective.len() != dim {
        return Err(ConvexError::DimensionMismatch {
            expected: dim,
            found: objective.len(),
        });
    }
    let Some(poly) = region.polytope() else {
        return Ok(None);
    };
    let level = region.level().cloned();
    let lev = |x: &[f64]| level.as_ref().map_or(0.0, |l| l.eval(x));
    match dim {
        1 => {
            let Some((lo, hi)) = region.interval()? else {
                return Ok(None);
            };
            let x = if objective[0] >= 0.0 { lo } else { hi };
            Ok(Some((objective[0] * x + offset, vec![x])))
        }
        2 => {
            let nrm2 = dot(objective, objective);
            if nrm2 == 0.0 {
                return Ok(if region.is_empty()? {
                    None
                } else {
                    Some((offset, poly.vertex_centroid()))
                });
            }
            let dir = [-objective[1], objective[0]];
            let base = |t: f64| [t * objective[0] / nrm2, t * objective[1] / nrm2];
            let segment = |t: f64| -> Option<(f64, f64)> {
                let x0 = base(t);
                let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
                for h in poly.halfspaces() {
                    let rhs = h.offset - dot(&h.normal, &x0);
                    let c = dot(&h.normal, &dir);
                    if c.abs() < 1e-14 {
                        if rhs < -1e-12 {
                            return None;
                        }
                    } else if c > 0.0 {
                        hi = hi.min(rhs / c);
                    } else {
                        lo = lo.max(rhs / c);
                    }
                }
                if lo > hi {
                    return None;
                }
                Some((lo, hi))
            };
            let point = |t: f64, r: f64| {
                let x0 = base(t);
                vec![x0[0] + r * dir[0], x0[1] + r * dir[1]]
            };
            let best_on = |t: f64| -> Option<(f64, f64)> {
                let (lo, hi) = segment(t)?;
                Some(golden_max(|r| lev(&point(t, r)), lo, hi))
            };
            let phi = |t: f64| best_on(t).map_or(f64::NEG_INFINITY, |(_, v)| v);
            let tmin = -poly.support(&[-objective[0], -objective[1]]);
            let tmax = poly.support(objective);
            let (tstar, vstar) = golden_max(phi, tmin, tmax);
            if vstar < 0.0 {
                return Ok(None);
            }
            let t = if phi(tmin) >= 0.0 {
                tmin
            } else {
                bisect_boundary(phi, tstar, tmin)
            };
            let x = match best_on(t) {
                Some((r, _)) => point(t, r),
                None => point(tstar, best_on(tstar).map_or(0.0, |(r, _)| r)),
            };
            Ok(Some((t + offset, x)))
        }
        d => Err(ConvexError::UnsupportedDimension(d)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::convex_hull;

    struct Entropy {
        shift: f64,
    }

    impl ConcaveFunction for Entropy {
        fn dim(&self) -> usize {
            1
        }
        fn eval(&self, x: &[f64]) -> f64 {
            let t = x[0];
            let xlx = |v: f64| if v <= 0.0 { 0.0 } else { v * v.ln() };
            -0.5 * (xlx(t) + xlx(1.0 - t)) + self.shift
        }
    }

    struct Zero;
    impl ConcaveFunction for Zero {
        fn dim(&self) -> usize {
            1
        }
        fn eval(&self, _: &[f64]) -> f64 {
            0.0
        }
    }

    fn unit() -> Region {
        Region::new(convex_hull(&[vec![0.0], vec![1.0]]).unwrap())
    }

    #[test]
    fn zero_integrates_to_zero() {
        assert_eq!(
            integrate_positive_part(&Zero, &unit(), Quadrature::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn entropy_integrals() {
        let v = integrate_positive_part(&Entropy { shift: 0.0 }, &unit(), Quadrature::default())
            .unwrap();
        assert!((v - 0.25).abs() < 1e-8, "{v}");
        let half_log2 = 0.5 * 2f64.ln();
        let v = integrate_positive_part(
            &Entropy { shift: half_log2 },
            &unit(),
            Quadrature::default(),
        )
        .unwrap();
        assert!((v - 0.5 * (2f64.ln() + 0.5)).abs() < 1e-8, "{v}");
    }

    #[test]
    fn panel_refinement_is_stable() {
        let a = integrate_positive_part(&Entropy { shift: 0.0 }, &unit(), Quadrature::Panels(64))
            .unwrap();
        let b = integrate_positive_part(&Entropy { shift: 0.0 }, &unit(), Quadrature::Panels(128))
            .unwrap();
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn negative_part_is_clipped() {
        let v = integrate_positive_part(&Entropy { shift: -0.2 }, &unit(), Quadrature::default())
            .unwrap();
        assert!(v > 0.0 && v < 0.25);
        let v = integrate_positive_part(&Entropy { shift: -1.0 }, &unit(), Quadrature::default())
            .unwrap();
        assert_eq!(v, 0.0);
    }

    struct Cone;
    impl ConcaveFunction for Cone {
        fn dim(&self) -> usize {
            2
        }
        fn eval(&self, x: &[f64]) -> f64 {
            1.0 - (x[0] * x[0] + x[1] * x[1]).sqrt()
        }
    }

    #[test]
    fn cone_volume_over_square() {
        let sq = convex_hull(&[
            vec![-2.0, -2.0],
            vec![2.0, -2.0],
            vec![2.0, 2.0],
            vec![-2.0, 2.0],
        ])
        .unwrap();
        let v = integrate_positive_part(&Cone, &Region::new(sq), Quadrature::default()).unwrap();
        assert!((v - std::f64::consts::PI / 3.0).abs() < 1e-7, "{v}");
    }

    #[test]
    fn linear_minimum_over_disc() {
        let sq = convex_hull(&[
            vec![-2.0, -2.0],
            vec![2.0, -2.0],
            vec![2.0, 2.0],
            vec![-2.0, 2.0],
        ])
        .unwrap();
        let region = Region::new(sq).with_superlevel(Arc::new(Cone));
        let (v, x) = minimize_linear(&region, &[1.0, 1.0], 0.5).unwrap().unwrap();
        assert!((v - (0.5 - 2f64.sqrt())).abs() < 1e-9, "{v}");
        assert!((x[0] + 0.5f64.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn region_indicator_matches_constraints() {
        let base = convex_hull(&[vec![0.0], vec![1.0]]).unwrap();
        let r = Region::with_constraints(base, vec![Halfspace::new(vec![-1.0], -0.5)]).unwrap();
        assert!(r.contains(&[0.75]));
        assert!(!r.contains(&[0.25]));
        let (lo, hi) = r.interval().unwrap().unwrap();
        assert!((lo - 0.5).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
    }
}

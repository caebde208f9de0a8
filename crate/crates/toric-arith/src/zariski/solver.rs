use rayon::prelude::*;
use serde::Serialize;

use super::rot::{divisor_grid, RotInvariantDivisor};
use super::{Result, ZariskiError};
use crate::convex::{
    bisect_boundary, constrained_convex_minorant, golden_max, ConvexError, ExactConjugate,
    GridConvexFunction, UniformGrid,
};
use crate::divisor::{DivisorError, ToricArithDivisor};

/// Sampling and search parameters of the solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    pub s_min: f64,
    pub s_max: f64,
    pub points: usize,
    /// Cells per axis of the coarse `(δ_0, δ_1)` scan that brackets the
    /// golden-section search.
    pub coarse: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            s_min: -40.0,
            s_max: 40.0,
            points: 2001,
            coarse: 40,
        }
    }
}

impl SolverConfig {
    pub fn grid(&self) -> Result<UniformGrid> {
        Ok(UniformGrid::new(self.s_min, self.s_max, self.points)?)
    }
}

/// How a decomposition was found.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub config: SolverConfig,
    /// `(δ_0, δ_1)` from the golden-section search.
    pub searched: (f64, f64),
    /// `(δ_0, δ_1)` after moving each end of the body onto `{G = 0}`.
    pub polished: (f64, f64),
    pub nef_shortcut: bool,
    /// `min (g_D - h_P)` on the grid; zero means no vertical fiber fits
    /// between the positive part and the input.
    pub vertical_gap: f64,
    pub vertical_free: bool,
}

/// `D = P + N` on the arithmetic surface.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub positive: RotInvariantDivisor,
    pub negative: RotInvariantDivisor,
    pub provenance: Provenance,
}

/// Sampled Green function of `D` together with its exact conjugate.
pub(crate) struct Sampled {
    pub rot: RotInvariantDivisor,
    pub u: GridConvexFunction,
    pub conj: ExactConjugate,
}

impl Sampled {
    pub fn new(divisor: &ToricArithDivisor, config: &SolverConfig) -> Result<Self> {
        let grid = divisor_grid(divisor, config.grid()?);
        let rot = RotInvariantDivisor::from_divisor(divisor, grid)?;
        let u = rot.convex_potential()?;
        let conj = ExactConjugate::new(&u)?;
        Ok(Self { rot, u, conj })
    }

    /// `G` of the sampled Green function.
    pub fn g(&self, x: f64) -> f64 {
        self.conj.eval(x).map_or(f64::NEG_INFINITY, |v| -0.5 * v)
    }

    /// Signed `2 ∫_lo^hi G`, with a penalty when the interval is reversed so
    /// the objective stays unimodal.
    fn objective(&self, lo: f64, hi: f64) -> f64 {
        if hi > lo {
            -self.conj.integral(lo, hi).unwrap_or(f64::NEG_INFINITY)
        } else {
            hi - lo
        }
    }

    /// The greatest nef minorant with body `[lo, hi]`.
    pub fn minorant(&self, lo: f64, hi: f64) -> Result<RotInvariantDivisor> {
        let grid = self.rot.grid();
        let barrier = GridConvexFunction::from_fn(vec![grid], vec![(lo, hi)], |s| {
            (lo * s[0]).max(hi * s[0])
        })?;
        let h =
            constrained_convex_minorant(&self.u, lo, hi, Some(&barrier)).map_err(|e| match e {
                ConvexError::Infeasible { s, deficit, .. } => ZariskiError::Infeasible(format!(
                "body [{lo}, {hi}] leaves the barrier above the minorant by {deficit:e} at s = {s}"
            )),
                other => other.into(),
            })?;
        RotInvariantDivisor::new(hi, -lo, grid, h.values().to_vec(), Default::default())
    }
}

/// Greatest nef minorant `P <= D` and the negative part `N = D - P` on the
/// projective line.
///
/// The body of `P` is `[δ_1 - c_1, c_0 - δ_0]`; on it the best Green function
/// is the greatest convex minorant of `g_D` with slopes in that range that
/// stays above the barrier `max(lo·s, hi·s)`. Its volume is `2 ∫_lo^hi G`,
/// which a coarse parallel scan and nested golden-section search maximize over
/// `(δ_0, δ_1)`; each end is then moved onto `{G = 0}` by bisection. Nef
/// inputs return `N = 0` without searching.
pub fn greatest_nef_minorant(
    divisor: &ToricArithDivisor,
    config: &SolverConfig,
) -> Result<Decomposition> {
    if divisor.d() != 1 {
        return Err(ZariskiError::Unsupported(format!(
            "dimension {} (surfaces need d = 1)",
            divisor.d()
        )));
    }
    if !divisor.is_big()? {
        let max_g = divisor.transform()?.max_value();
        return Err(DivisorError::BignessRequired { max_g }.into());
    }
    let sampled = Sampled::new(divisor, config)?;
    let grid = sampled.rot.grid();
    if divisor.is_nef()? {
        return Ok(Decomposition {
            positive: sampled.rot.clone(),
            negative: RotInvariantDivisor::zero(grid),
            provenance: Provenance {
                config: *config,
                searched: (0.0, 0.0),
                polished: (0.0, 0.0),
                nef_shortcut: true,
                vertical_gap: 0.0,
                vertical_free: true,
            },
        });
    }
    let c = divisor.coeffs();
    let deg = divisor.degree();
    let body = |d0: f64, d1: f64| (d1 - c[1], c[0] - d0);
    let f = |d0: f64, d1: f64| {
        let (lo, hi) = body(d0, d1);
        sampled.objective(lo, hi)
    };

    let k = config.coarse.max(2);
    let step = deg / k as f64;
    let cells: Vec<(usize, usize)> = (0..=k).flat_map(|i| (0..=k).map(move |j| (i, j))).collect();
    let (bi, bj, _) = cells
        .par_iter()
        .map(|&(i, j)| (i, j, f(i as f64 * step, j as f64 * step)))
        .reduce(
            || (0, 0, f64::NEG_INFINITY),
            |a, b| if b.2 > a.2 { b } else { a },
        );
    let bracket =
        |i: usize| ((i as f64 - 1.0) * step).max(0.0)..=((i as f64 + 1.0) * step).min(deg);
    let (r0, r1) = (bracket(bi), bracket(bj));
    let (d0, _) = golden_max(
        |d0| golden_max(|d1| f(d0, d1), *r1.start(), *r1.end()).1,
        *r0.start(),
        *r0.end(),
    );
    let (d1, _) = golden_max(|d1| f(d0, d1), *r1.start(), *r1.end());

    // move each end of the body onto the boundary of {G >= 0}
    let (lo0, hi0) = body(0.0, 0.0);
    let (xm, v) = sampled.conj.min_on(lo0, hi0)?;
    if -0.5 * v <= 0.0 {
        return Err(ZariskiError::Infeasible(
            "sampled transform has no positive part".into(),
        ));
    }
    let g = |x: f64| sampled.g(x);
    let lo = if g(lo0) >= 0.0 {
        lo0
    } else {
        bisect_boundary(g, xm, lo0)
    };
    let hi = if g(hi0) >= 0.0 {
        hi0
    } else {
        bisect_boundary(g, xm, hi0)
    };

    let positive = sampled.minorant(lo, hi)?;
    let negative = sampled.rot.try_sub(&positive)?;
    let vertical_gap = negative
        .values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(Decomposition {
        positive,
        negative,
        provenance: Provenance {
            config: *config,
            searched: (d0, d1),
            polished: (c[0] - hi, lo + c[1]),
            nef_shortcut: false,
            vertical_gap,
            vertical_free: vertical_gap <= 1e-9,
        },
    })
}

/// A nef minorant of `D` with body `[lo, hi] ⊆ Θ`, lowered by `tau` and
/// propped up by its barrier: `max(h - τ, max(lo·s, hi·s))`.
pub fn nef_minorant(
    divisor: &ToricArithDivisor,
    lo: f64,
    hi: f64,
    tau: f64,
    config: &SolverConfig,
) -> Result<RotInvariantDivisor> {
    let sampled = Sampled::new(divisor, config)?;
    let base = sampled.minorant(lo, hi)?;
    let grid = base.grid();
    let values = grid
        .points()
        .iter()
        .zip(&base.values)
        .map(|(&s, &h)| (h - tau.max(0.0)).max((lo * s).max(hi * s)))
        .collect();
    RotInvariantDivisor::new(hi, -lo, grid, values, Default::default())
}

/// `Θ` of the sampled Green function of `D`.
pub fn sampled_theta(
    divisor: &ToricArithDivisor,
    config: &SolverConfig,
) -> Result<Option<(f64, f64)>> {
    let sampled = Sampled::new(divisor, config)?;
    Ok(sampled.rot.transform()?.theta())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nef_input_has_zero_negative_part() {
        let d = ToricArithDivisor::canonical(&[2.0, 2.0]).unwrap();
        let dec = greatest_nef_minorant(&d, &SolverConfig::default()).unwrap();
        assert!(dec.provenance.nef_shortcut);
        assert!(dec.negative.values.iter().all(|&v| v == 0.0));
        assert_eq!((dec.negative.e0, dec.negative.e1), (0.0, 0.0));
    }

    #[test]
    fn unbalanced_family_cuts_the_left_end() {
        let d = ToricArithDivisor::canonical(&[0.25, 2.0]).unwrap();
        let dec = greatest_nef_minorant(&d, &SolverConfig::default()).unwrap();
        let (d0, d1) = dec.provenance.polished;
        assert!(d0.abs() < 1e-9);
        assert!((d1 - 0.354).abs() < 1e-3, "δ1 = {d1}");
        let (s0, s1) = dec.provenance.searched;
        assert!((s0 - d0).abs() < 1e-4 && (s1 - d1).abs() < 1e-4);
        assert!(dec.negative.is_effective());
        assert!(dec.provenance.vertical_free);
    }

    #[test]
    fn non_big_is_refused() {
        let d = ToricArithDivisor::canonical(&[0.25, 0.25]).unwrap();
        assert!(greatest_nef_minorant(&d, &SolverConfig::default()).is_err());
    }
}

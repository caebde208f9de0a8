use rayon::prelude::*;
use serde::Serialize;

use super::{Result, ZariskiError};
use crate::divisor::{
    theta_region, vol_hat, vol_hat_base, BaseCondition, Center, DivisorError, ToricArithDivisor,
};

/// Volume lost by imposing `mult_{F_p} >= μ` on a big divisor of the
/// projective line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerticalDrop {
    pub kappa: f64,
    pub theta: (f64, f64),
    pub drop: f64,
    /// `2κ |Θ|`, attained exactly when `G >= κ` on all of `Θ`.
    pub bound: f64,
    pub saturated: bool,
}

/// `vol(D) - vol(D; μ F_p) = 2 ∫_Θ min(G, κ)` with `κ = μ log p`.
pub fn vertical_condition_drop(
    divisor: &ToricArithDivisor,
    p: u64,
    mu: f64,
) -> Result<VerticalDrop> {
    if divisor.d() != 1 {
        return Err(ZariskiError::Unsupported(
            "vertical drop probe needs d = 1".into(),
        ));
    }
    let theta = theta_region(divisor)?;
    let (a, b) = theta.interval().ok_or(DivisorError::BignessRequired {
        max_g: theta.max_g(),
    })?;
    let kappa = mu * (p as f64).ln();
    let cond = BaseCondition::new(Center::VerticalFiber(p), mu)?;
    let drop = vol_hat(divisor)?.value - vol_hat_base(divisor, &[cond])?.value;
    let g = theta.transform();
    let saturated = g.eval_point(&[a]).min(g.eval_point(&[b])) >= kappa;
    Ok(VerticalDrop {
        kappa,
        theta: (a, b),
        drop,
        bound: 2.0 * kappa * (b - a),
        saturated,
    })
}

/// Best toric nef minorant of a divisor on `P^2` found by search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlaneMinorantGap {
    pub vol_input: f64,
    pub best_vol: f64,
    /// Negative-part coefficients `δ` of the best candidate.
    pub best_delta: Vec<f64>,
    pub gap: f64,
    pub candidates: usize,
}

/// Searches positive parts `D - Σ δ_i H_i` of a divisor on `P^2` whose bodies
/// `{w >= δ}` are simplices with `G >= 0` at every vertex (the toric nef
/// condition, with the Green function restricted to the smaller body), and
/// reports how far the best volume stays below `vol(D)`.
///
/// A coarse grid of `steps` per axis is followed by a finer grid around the
/// best cell; the gap is an upper estimate of the true optimum's gap.
pub fn plane_minorant_gap(divisor: &ToricArithDivisor, steps: usize) -> Result<PlaneMinorantGap> {
    if divisor.d() != 2 {
        return Err(ZariskiError::Unsupported(
            "the plane probe needs d = 2".into(),
        ));
    }
    let deg = divisor.degree();
    let g = divisor.transform()?;
    let feasible = |delta: &[f64]| -> bool {
        let rest = deg - delta.iter().sum::<f64>();
        if rest <= 0.0 || delta.iter().any(|&d| d < 0.0) {
            return false;
        }
        (0..3).all(|k| {
            let mut w = delta.to_vec();
            w[k] += rest;
            g.eval_point(&divisor.x_coords(&w)) >= 0.0
        })
    };
    let volume = |delta: &[f64]| -> Result<f64> {
        let conds = (0..3)
            .map(|i| BaseCondition::new(Center::Hyperplane(i), delta[i]))
            .collect::<crate::divisor::Result<Vec<_>>>()?;
        Ok(vol_hat_base(divisor, &conds)?.value)
    };
    let search = |centre: [f64; 3], half: f64, n: usize| -> Result<(Vec<f64>, f64, usize)> {
        let axis = |c: f64| -> Vec<f64> {
            (0..=n)
                .map(|i| c - half + 2.0 * half * i as f64 / n as f64)
                .filter(|&v| v >= 0.0)
                .collect()
        };
        let (a0, a1, a2) = (axis(centre[0]), axis(centre[1]), axis(centre[2]));
        let mut cands = Vec::new();
        for &x in &a0 {
            for &y in &a1 {
                cands.extend(a2.iter().map(|&z| vec![x, y, z]).filter(|d| feasible(d)));
            }
        }
        let scored = cands
            .par_iter()
            .map(|d| volume(d).map(|v| (d.clone(), v)))
            .collect::<Result<Vec<_>>>()?;
        let count = scored.len();
        let best =
            scored.into_iter().fold(
                (vec![], f64::NEG_INFINITY),
                |a, b| if b.1 > a.1 { b } else { a },
            );
        Ok((best.0, best.1, count))
    };
    let half = deg / 2.0;
    let (coarse, _, n1) = search([half; 3], half, steps.max(2))?;
    if coarse.is_empty() {
        return Err(ZariskiError::Infeasible(
            "no simplex body with nonnegative vertices".into(),
        ));
    }
    let h = deg / steps.max(2) as f64;
    let (best_delta, best_vol, n2) = search([coarse[0], coarse[1], coarse[2]], h, steps.max(2))?;
    let vol_input = vol_hat(divisor)?.value;
    Ok(PlaneMinorantGap {
        vol_input,
        best_vol,
        best_delta,
        gap: vol_input - best_vol,
        candidates: n1 + n2,
    })
}

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::model::{Potential, ToricArithDivisor};
use super::{DivisorError, Result};

/// Slack on the divisor constraint `nD + (z^m) >= 0`.
const ADMISSIBLE_TOL: f64 = 1e-9;

/// Orders of vanishing `M_i = n·w_i(m/n)` of `nD + (z^m)` along `H_0 … H_d`.
pub fn multiplicities(divisor: &ToricArithDivisor, n: u64, m: &[i64]) -> Vec<f64> {
    let c = divisor.coeffs();
    let nf = n as f64;
    let total: i64 = m.iter().sum();
    let mut out = Vec::with_capacity(c.len());
    out.push(nf * c[0] - total as f64);
    out.extend(m.iter().zip(&c[1..]).map(|(&mi, ci)| mi as f64 + nf * ci));
    out
}

fn check_admissible(divisor: &ToricArithDivisor, n: u64, m: &[i64]) -> Result<Vec<f64>> {
    if m.len() != divisor.d() || n == 0 {
        return Err(DivisorError::OutOfRange { n, m: m.to_vec() });
    }
    let mults = multiplicities(divisor, n, m);
    if mults
        .iter()
        .any(|&v| v < -ADMISSIBLE_TOL * (1.0 + n as f64))
    {
        return Err(DivisorError::OutOfRange { n, m: m.to_vec() });
    }
    Ok(mults.into_iter().map(|v| v.max(0.0)).collect())
}

/// `log ‖z^m‖` with `‖φ‖ = sup |φ| e^{-n g / 2}` for a section of `nD`.
///
/// Canonical family: `2 log ‖z^m‖ = Σ M_i log(M_i / (n·deg·a_i)) - nλ`, which
/// is `-2n G(m/n)`. Sampled: `n·u*(m/n)/2 - nλ/2`.
pub fn log_sup_norm_monomial(divisor: &ToricArithDivisor, n: u64, m: &[i64]) -> Result<f64> {
    let mults = check_admissible(divisor, n, m)?;
    let nf = n as f64;
    let value = match divisor.potential() {
        Potential::Canonical { a } => {
            let nd = nf * divisor.degree();
            let s: f64 = mults
                .iter()
                .zip(a)
                .map(|(&mi, &ai)| {
                    if mi <= 0.0 {
                        0.0
                    } else {
                        mi * (mi / (nd * ai)).ln()
                    }
                })
                .sum();
            0.5 * s - 0.5 * nf * divisor.twist()
        }
        Potential::Sampled(_) => {
            let x = m[0] as f64 / nf;
            let g = divisor.transform()?;
            let (lo, hi) = divisor.slope_range_1d();
            -nf * g.eval_point(&[x.clamp(lo, hi)])
        }
    };
    Ok(value)
}

/// `‖z^m‖` as a section of `nD`.
pub fn sup_norm_monomial(divisor: &ToricArithDivisor, n: u64, m: &[i64]) -> Result<f64> {
    Ok(log_sup_norm_monomial(divisor, n, m)?.exp())
}

/// Exponents `m` with `nD + (z^m) >= 0`, in lexicographic order.
pub fn admissible_monomials(divisor: &ToricArithDivisor, n: u64) -> Vec<Vec<i64>> {
    let c = divisor.coeffs();
    let nf = n as f64;
    let d = divisor.d();
    let lower: Vec<i64> = c[1..]
        .iter()
        .map(|ci| (-nf * ci - ADMISSIBLE_TOL).ceil() as i64)
        .collect();
    let top = (nf * c[0] + ADMISSIBLE_TOL).floor() as i64;
    let mut out = Vec::new();
    let mut m = lower.clone();
    if lower.iter().sum::<i64>() > top {
        return out;
    }
    loop {
        out.push(m.clone());
        // odometer over the simplex m_i >= lower_i, Σ m <= top
        let mut i = d;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            m[i] += 1;
            if m.iter().sum::<i64>() <= top {
                break;
            }
            m[i] = lower[i];
        }
    }
}

/// Filtration levels `t(z^m) = -log ‖z^m‖` of the monomial basis of `nD`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiltrationSummary {
    pub n: u64,
    pub t_values: BTreeMap<Vec<i64>, f64>,
    pub e_min: f64,
    pub e_max: f64,
    /// A constant `C` with `e_max <= C n` for all `n`: `max G + 1`.
    pub growth_constant: f64,
}

pub fn filtration_summary(divisor: &ToricArithDivisor, n: u64) -> Result<FiltrationSummary> {
    if n == 0 {
        return Err(DivisorError::Invalid("level must be positive".into()));
    }
    let monomials = admissible_monomials(divisor, n);
    let values: Vec<(Vec<i64>, f64)> = monomials
        .into_par_iter()
        .map(|m| log_sup_norm_monomial(divisor, n, &m).map(|l| (m, -l)))
        .collect::<Result<_>>()?;
    let e_min = values.iter().map(|(_, t)| *t).fold(f64::INFINITY, f64::min);
    let e_max = values
        .iter()
        .map(|(_, t)| *t)
        .fold(f64::NEG_INFINITY, f64::max);
    let growth_constant = divisor.transform()?.max_value() + 1.0;
    Ok(FiltrationSummary {
        n,
        t_values: values.into_iter().collect(),
        e_min,
        e_max,
        growth_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canon(a: &[f64]) -> ToricArithDivisor {
        ToricArithDivisor::canonical(a).unwrap()
    }

    #[test]
    fn closed_form_norms() {
        let d = canon(&[1.0, 1.0]);
        assert!((sup_norm_monomial(&d, 2, &[1]).unwrap().powi(2) - 0.25).abs() < 1e-15);
        let d = canon(&[0.5, 3.0]);
        assert!((sup_norm_monomial(&d, 7, &[0]).unwrap().powi(2) - 0.5f64.powi(-7)).abs() < 1e-9);
        let d = canon(&[1.0, 2.0, 4.0]);
        assert!((sup_norm_monomial(&d, 3, &[1, 1]).unwrap().powi(2) - 1.0 / 216.0).abs() < 1e-15);
        assert!(sup_norm_monomial(&d, 3, &[2, 2]).is_err());
    }

    #[test]
    fn admissible_range_follows_coefficients() {
        let d = ToricArithDivisor::new(
            1,
            vec![0.5, 0.5],
            Potential::Canonical { a: vec![1.0, 1.0] },
            0.0,
        )
        .unwrap();
        assert_eq!(
            admissible_monomials(&d, 2),
            vec![vec![-1], vec![0], vec![1]]
        );
        assert_eq!(admissible_monomials(&canon(&[1.0, 1.0, 1.0]), 2).len(), 6);
    }

    #[test]
    fn filtration_levels() {
        let s = filtration_summary(&canon(&[2.0, 2.0]), 1).unwrap();
        assert!((s.e_min - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!((s.e_max - 0.5 * 2f64.ln()).abs() < 1e-15);
        let s = filtration_summary(&canon(&[1.0, 1.0]), 2).unwrap();
        assert!((s.e_max - 2f64.ln()).abs() < 1e-15);
        assert_eq!(s.e_min, 0.0);
    }
}

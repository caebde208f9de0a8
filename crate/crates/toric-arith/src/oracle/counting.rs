use super::{enumerate_sections, Result};
use crate::divisor::{DivisorError, ToricArithDivisor};

/// Test points for the sup-norm on `P^1(C)`: `radial` values of
/// `s = log|z|^2` spread over `[s_min, s_max]` plus the two extreme radii,
/// each crossed with `angular` equally spaced arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleGrid {
    pub s_min: f64,
    pub s_max: f64,
    pub radial: usize,
    pub angular: usize,
}

impl Default for CircleGrid {
    fn default() -> Self {
        Self {
            s_min: -24.0,
            s_max: 24.0,
            radial: 97,
            angular: 64,
        }
    }
}

/// Radii far enough out that `z^0` and `z^top` dominate.
const EXTREME_S: f64 = 60.0;

/// `log #{φ ∈ H^0(nD) with integer coefficients : ‖φ‖ <= 1}` for `d = 1`, by
/// enumerating every coefficient vector in the box `|c_m| <= ⌊R_m⌋` and
/// testing `|φ(z)| e^{-n g / 2} <= 1` on a finite grid of `z`.
///
/// The grid test accepts a superset of the true ball, so the result bounds
/// the exact count from above up to discretization; the box is exponential in
/// `n`, so keep `n` small.
pub fn exact_log_count_d1(divisor: &ToricArithDivisor, n: u64, grid: CircleGrid) -> Result<f64> {
    if divisor.d() != 1 {
        return Err(DivisorError::Unsupported(
            "lattice-ball counting needs d = 1".into(),
        ));
    }
    let sections = enumerate_sections(divisor, n, &[])?;
    let ms: Vec<f64> = sections.entries.iter().map(|e| e.m[0] as f64).collect();
    let bounds: Vec<i64> = sections
        .entries
        .iter()
        .map(|e| (e.radius() + 1e-9).floor() as i64)
        .collect();
    let nf = n as f64;

    let mut radii: Vec<f64> = (0..grid.radial.max(2))
        .map(|j| {
            grid.s_min + (grid.s_max - grid.s_min) * j as f64 / (grid.radial.max(2) - 1) as f64
        })
        .collect();
    radii.extend([-EXTREME_S, EXTREME_S]);
    // weights[j][k] = |z|^{m_k} e^{-n g / 2} at s_j
    let weights: Vec<Vec<f64>> = radii
        .iter()
        .map(|&s| {
            let g = divisor.green_at(&[s]);
            ms.iter().map(|&m| (0.5 * (m * s - nf * g)).exp()).collect()
        })
        .collect();
    let angles: Vec<Vec<(f64, f64)>> = (0..grid.angular.max(1))
        .map(|l| {
            let t = std::f64::consts::TAU * l as f64 / grid.angular.max(1) as f64;
            ms.iter().map(|&m| ((m * t).cos(), (m * t).sin())).collect()
        })
        .collect();
    let points: Vec<(usize, usize)> = (0..weights.len())
        .flat_map(|j| (0..angles.len()).map(move |l| (j, l)))
        .collect();

    let inside = |c: &[i64], first: usize| -> std::result::Result<(), usize> {
        let check = |&(j, l): &(usize, usize)| {
            let (mut re, mut im) = (0.0, 0.0);
            for ((&ck, &w), &(cs, sn)) in c.iter().zip(&weights[j]).zip(&angles[l]) {
                if ck != 0 {
                    re += ck as f64 * w * cs;
                    im += ck as f64 * w * sn;
                }
            }
            re * re + im * im <= 1.0 + 1e-12
        };
        if !check(&points[first]) {
            return Err(first);
        }
        match points.iter().position(|p| !check(p)) {
            Some(i) => Err(i),
            None => Ok(()),
        }
    };

    let mut c: Vec<i64> = bounds.iter().map(|b| -b).collect();
    let mut count: u64 = 0;
    let mut last = 0usize;
    loop {
        match inside(&c, last) {
            Ok(()) => count += 1,
            Err(i) => last = i,
        }
        let mut k = 0;
        loop {
            if k == c.len() {
                return Ok((count.max(1) as f64).ln());
            }
            if c[k] < bounds[k] {
                c[k] += 1;
                break;
            }
            c[k] = -bounds[k];
            k += 1;
        }
    }
}

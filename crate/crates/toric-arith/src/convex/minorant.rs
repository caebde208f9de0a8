use super::{ConvexError, GridConvexFunction, Result};

/// Barrier slack tolerated before a candidate is declared infeasible.
const BARRIER_TOL: f64 = 1e-9;

/// Greatest convex `h <= u` with slopes in `[slope_lo, slope_hi]`, optionally
/// required to dominate `barrier` (one dimension).
///
/// Computed as conjugate, restrict the conjugate to the slope range, conjugate
/// back. The conjugation runs on the exact breakpoint representation of the
/// interpolated samples, so the restricted conjugate of the output equals the
/// conjugate of `u` on the slope range with no resampling error. The barrier
/// cannot raise the greatest minorant, so the barrier pass is a single check:
/// either `h >= barrier` already holds or no feasible minorant exists.
pub fn constrained_convex_minorant(
    u: &GridConvexFunction,
    slope_lo: f64,
    slope_hi: f64,
    barrier: Option<&GridConvexFunction>,
) -> Result<GridConvexFunction> {
    if u.dim() != 1 {
        return Err(ConvexError::UnsupportedDimension(u.dim()));
    }
    if !(slope_lo.is_finite() && slope_hi.is_finite()) || slope_lo > slope_hi {
        return Err(ConvexError::InvalidSlopeRange {
            lo: slope_lo,
            hi: slope_hi,
        });
    }
    let (rlo, rhi) = u.recession()[0];
    let lo = slope_lo.max(rlo);
    let hi = slope_hi.min(rhi);
    if lo > hi {
        return Err(ConvexError::InvalidSlopeRange {
            lo: slope_lo,
            hi: slope_hi,
        });
    }
    let grid = u.axes()[0];
    let s = grid.points();
    let v = u.values();
    let sig = u.slopes()?;
    let n = v.len();
    let ustar_lo = u.conjugate_at(lo)?;
    let ustar_hi = u.conjugate_at(hi)?;
    let mut h = Vec::with_capacity(n);
    for j in 0..n {
        // subdifferential of the interpolant at s_j
        let left = if j == 0 { rlo } else { sig[j - 1] };
        let right = if j + 1 == n { rhi } else { sig[j] };
        let val = if right < lo {
            lo * s[j] - ustar_lo
        } else if left > hi {
            hi * s[j] - ustar_hi
        } else {
            v[j]
        };
        h.push(val.min(v[j]));
    }
    if let Some(b) = barrier {
        if b.axes() != u.axes() {
            return Err(ConvexError::GridMismatch);
        }
        for (j, (&hj, &bj)) in h.iter().zip(b.values()).enumerate() {
            let deficit = bj - hj;
            if deficit > BARRIER_TOL {
                return Err(ConvexError::Infeasible {
                    index: j,
                    s: s[j],
                    deficit,
                });
            }
        }
    }
    GridConvexFunction::new(vec![grid], h, vec![(lo, hi)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::UniformGrid;

    fn grid() -> UniformGrid {
        UniformGrid::new(-4.0, 4.0, 81).unwrap()
    }

    #[test]
    fn identity_when_slopes_fit() {
        let u = GridConvexFunction::from_fn(vec![grid()], vec![(0.0, 1.0)], |s| {
            (1.0 + s[0].exp()).ln()
        })
        .unwrap();
        let h = constrained_convex_minorant(&u, 0.0, 1.0, None).unwrap();
        assert!(h.max_abs_diff(&u).unwrap() < 1e-15);
    }

    #[test]
    fn abs_restricted_to_nonnegative_slopes() {
        let u =
            GridConvexFunction::from_fn(vec![grid()], vec![(-1.0, 1.0)], |s| s[0].abs()).unwrap();
        let h = constrained_convex_minorant(&u, 0.0, 1.0, None).unwrap();
        for (s, hv) in grid().points().iter().zip(h.values()) {
            assert!((hv - s.max(0.0)).abs() < 1e-12, "s={s} h={hv}");
        }
    }

    #[test]
    fn barrier_already_satisfied() {
        let u = GridConvexFunction::from_fn(vec![grid()], vec![(0.0, 1.0)], |s| {
            (2.0 + 2.0 * s[0].exp()).ln()
        })
        .unwrap();
        let b =
            GridConvexFunction::from_fn(vec![grid()], vec![(0.0, 1.0)], |s| s[0].max(0.0)).unwrap();
        let h = constrained_convex_minorant(&u, 0.0, 1.0, Some(&b)).unwrap();
        assert!(h.max_abs_diff(&u).unwrap() < 1e-15);
    }

    #[test]
    fn infeasible_barrier_names_a_witness() {
        let u = GridConvexFunction::from_fn(vec![grid()], vec![(0.0, 1.0)], |s| {
            (0.25 + 2.0 * s[0].exp()).ln()
        })
        .unwrap();
        let b =
            GridConvexFunction::from_fn(vec![grid()], vec![(0.0, 1.0)], |s| s[0].max(0.0)).unwrap();
        match constrained_convex_minorant(&u, 0.0, 1.0, Some(&b)) {
            Err(ConvexError::Infeasible { deficit, .. }) => assert!(deficit > 0.0),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn rejects_inverted_range() {
        let u = GridConvexFunction::from_fn(vec![grid()], vec![(0.0, 1.0)], |s| {
            (1.0 + s[0].exp()).ln()
        })
        .unwrap();
        assert!(matches!(
            constrained_convex_minorant(&u, 0.6, 0.4, None),
            Err(ConvexError::InvalidSlopeRange { .. })
        ));
    }
}

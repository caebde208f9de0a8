use super::lp::{maximize, LpOutcome};
use super::{dot, Halfspace, Polytope, GEOM_TOL};

/// Radius cap keeping the Chebyshev program bounded.
const RADIUS_CAP: f64 = 1e6;

/// Center and radius of the largest ball inside `{x : h(x) <= offset}`;
/// `None` when the system has no interior.
pub fn chebyshev_center(dim: usize, halfspaces: &[Halfspace]) -> Option<(Vec<f64>, f64)> {
    let mut a = Vec::with_capacity(halfspaces.len() + 1);
    let mut b = Vec::with_capacity(halfspaces.len() + 1);
    for h in halfspaces {
        let mut row = h.normal.clone();
        row.push(dot(&h.normal, &h.normal).sqrt());
        a.push(row);
        b.push(h.offset);
    }
    let mut cap = vec![0.0; dim + 1];
    cap[dim] = 1.0;
    a.push(cap);
    b.push(RADIUS_CAP);
    let mut c = vec![0.0; dim + 1];
    c[dim] = 1.0;
    match maximize(&c, &a, &b) {
        LpOutcome::Optimal { x, value } if value > GEOM_TOL => Some((x[..dim].to_vec(), value)),
        _ => None,
    }
}

/// Interior witness for `C(a) = {x in C : x_1 < a}`: a ball inside `C` lying in
/// `x_1 <= a`.
pub fn slice_interior_witness(c: &Polytope, a: f64) -> Option<(Vec<f64>, f64)> {
    let mut hs = c.halfspaces().to_vec();
    let mut cut = vec![0.0; c.dim()];
    cut[0] = 1.0;
    hs.push(Halfspace::new(cut, a));
    chebyshev_center(c.dim(), &hs)
}

/// Whether `C(a) = {x in C : x_1 < a}` has nonempty interior.
pub fn sliced_interior_nonempty(c: &Polytope, a: f64) -> bool {
    slice_interior_witness(c, a).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::convex_hull;

    fn square() -> Polytope {
        convex_hull(&[
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn unit_square_slices() {
        assert!(sliced_interior_nonempty(&square(), 0.5));
        assert!(!sliced_interior_nonempty(&square(), 0.0));
        let (x, r) = slice_interior_witness(&square(), 0.5).unwrap();
        assert!((r - 0.25).abs() < 1e-9);
        assert!(x[0] + r <= 0.5 + 1e-9);
    }

    #[test]
    fn flat_polytope_has_no_interior() {
        let seg = convex_hull(&[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert!(!sliced_interior_nonempty(&seg, 0.5));
    }
}

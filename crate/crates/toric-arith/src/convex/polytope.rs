use super::{dot, ConvexError, Result, GEOM_TOL};

/// The closed halfspace `normal · x <= offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    /// `offset - normal · x`; nonnegative inside.
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.offset - dot(&self.normal, x)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.slack(x) >= -tol
    }
}

/// A bounded convex polytope kept in both vertex and halfspace form.
///
/// Lower-dimensional hulls carry their affine span explicitly: the halfspace
/// list then contains the equality pairs cutting out the span, and
/// [`Polytope::volume`] is zero.
#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    halfspaces: Vec<Halfspace>,
    origin: Vec<f64>,
    span: Vec<Vec<f64>>,
}

impl Polytope {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Vertices; in dimension two they are listed counter-clockwise.
    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    /// Dimension of the affine span of the vertices.
    pub fn affine_dim(&self) -> usize {
        self.span.len()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.span.len() == self.dim
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim && self.halfspaces.iter().all(|h| h.contains(x, tol))
    }

    /// Lebesgue measure in the ambient space.
    pub fn volume(&self) -> f64 {
        if self.is_full_dimensional() {
            self.relative_volume()
        } else {
            0.0
        }
    }

    /// Measure inside the affine span (a point has relative volume one).
    pub fn relative_volume(&self) -> f64 {
        let ys: Vec<Vec<f64>> = self.vertices.iter().map(|v| self.project(v)).collect();
        relative_volume_in_span(&ys, self.span.len())
    }

    /// Coordinates of `x - origin` in the orthonormal span basis.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let diff: Vec<f64> = x.iter().zip(&self.origin).map(|(a, b)| a - b).collect();
        self.span.iter().map(|b| dot(b, &diff)).collect()
    }

    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        (0..self.dim)
            .map(|i| {
                self.vertices
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                        (lo.min(v[i]), hi.max(v[i]))
                    })
            })
            .collect()
    }

    /// Maximum of `dir · x` over the polytope.
    pub fn support(&self, dir: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot(dir, v))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn vertex_centroid(&self) -> Vec<f64> {
        let k = self.vertices.len() as f64;
        (0..self.dim)
            .map(|i| self.vertices.iter().map(|v| v[i]).sum::<f64>() / k)
            .collect()
    }

    /// Intersection with extra halfspaces; `None` when empty.
    pub fn intersect(&self, extra: &[Halfspace]) -> Result<Option<Polytope>> {
        if extra.is_empty() {
            return Ok(Some(self.clone()));
        }
        let mut hs = self.halfspaces.clone();
        hs.extend_from_slice(extra);
        match Polytope::from_halfspaces(self.dim, &hs) {
            Ok(p) => Ok(Some(p)),
            Err(ConvexError::Empty(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Builds a polytope from a bounded halfspace system by vertex enumeration.
    pub fn from_halfspaces(dim: usize, halfspaces: &[Halfspace]) -> Result<Polytope> {
        if dim == 0 {
            return Err(ConvexError::UnsupportedDimension(0));
        }
        for h in halfspaces {
            if h.normal.len() != dim {
                return Err(ConvexError::DimensionMismatch {
                    expected: dim,
                    found: h.normal.len(),
                });
            }
            if !h.offset.is_finite() || h.normal.iter().any(|x| !x.is_finite()) {
                return Err(ConvexError::NonFinite("halfspace"));
            }
        }
        let scale = halfspaces
            .iter()
            .map(|h| h.offset.abs())
            .fold(1.0_f64, f64::max);
        let tol = GEOM_TOL * scale;
        let mut verts: Vec<Vec<f64>> = Vec::new();
        for combo in Combinations::new(halfspaces.len(), dim) {
            let a: Vec<Vec<f64>> = combo
                .iter()
                .map(|&i| halfspaces[i].normal.clone())
                .collect();
            let b: Vec<f64> = combo.iter().map(|&i| halfspaces[i].offset).collect();
            let Some(x) = solve(a, b) else { continue };
            if halfspaces.iter().all(|h| h.contains(&x, tol))
                && !verts.iter().any(|v| dist(v, &x) <= tol)
            {
                verts.push(x);
            }
        }
        if verts.is_empty() {
            return Err(ConvexError::Empty("halfspace system has no vertices"));
        }
        convex_hull(&verts)
    }

    /// True when both polytopes have the same vertex set up to `tol`.
    pub fn same_vertices(&self, other: &Polytope, tol: f64) -> bool {
        self.vertices.len() == other.vertices.len()
            && self
                .vertices
                .iter()
                .all(|v| other.vertices.iter().any(|w| dist(v, w) <= tol))
    }
}

/// Smallest polytope containing `points`.
pub fn convex_hull(points: &[Vec<f64>]) -> Result<Polytope> {
    let first = points
        .first()
        .ok_or(ConvexError::Empty("convex_hull needs a point"))?;
    let dim = first.len();
    if dim == 0 {
        return Err(ConvexError::UnsupportedDimension(0));
    }
    for p in points {
        if p.len() != dim {
            return Err(ConvexError::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(ConvexError::NonFinite("hull point"));
        }
    }
    let scale = points
        .iter()
        .flat_map(|p| p.iter().map(|x| x.abs()))
        .fold(1.0_f64, f64::max);
    let tol = GEOM_TOL * scale;

    let mut uniq: Vec<Vec<f64>> = Vec::new();
    for p in points {
        if !uniq.iter().any(|q| dist(p, q) <= tol) {
            uniq.push(p.clone());
        }
    }
    let origin = uniq[0].clone();
    let span = affine_span(&uniq, &origin, tol);
    let k = span.len();
    let ys: Vec<Vec<f64>> = uniq
        .iter()
        .map(|p| {
            let diff: Vec<f64> = p.iter().zip(&origin).map(|(a, b)| a - b).collect();
            span.iter().map(|b| dot(b, &diff)).collect()
        })
        .collect();

    let (vert_idx, facets) = hull_in_span(&ys, k, tol);
    let vertices: Vec<Vec<f64>> = vert_idx.iter().map(|&i| uniq[i].clone()).collect();

    let mut halfspaces = Vec::with_capacity(facets.len() + 2 * (dim - k));
    for (nu, beta) in facets {
        let mut normal = vec![0.0; dim];
        for (j, b) in span.iter().enumerate() {
            for i in 0..dim {
                normal[i] += nu[j] * b[i];
            }
        }
        let offset = beta + dot(&normal, &origin);
        halfspaces.push(Halfspace { normal, offset });
    }
    for q in complement_basis(&span, dim) {
        let off = dot(&q, &origin);
        halfspaces.push(Halfspace {
            normal: q.clone(),
            offset: off,
        });
        halfspaces.push(Halfspace {
            normal: q.iter().map(|x| -x).collect(),
            offset: -off,
        });
    }
    Ok(Polytope {
        dim,
        vertices,
        halfspaces,
        origin,
        span,
    })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthonormal basis of the affine span, chosen greedily by largest residual.
fn affine_span(points: &[Vec<f64>], origin: &[f64], tol: f64) -> Vec<Vec<f64>> {
    let dim = origin.len();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    while basis.len() < dim {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for p in points {
            let mut v: Vec<f64> = p.iter().zip(origin).map(|(a, b)| a - b).collect();
            for b in &basis {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
            let n = norm(&v);
            if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
                best = Some((n, v));
            }
        }
        match best {
            Some((n, v)) if n > tol => {
                // second pass for numerical orthogonality
                let mut v: Vec<f64> = v.iter().map(|x| x / n).collect();
                for b in &basis {
                    let c = dot(&v, b);
                    v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
                let n2 = norm(&v);
                basis.push(v.iter().map(|x| x / n2).collect());
            }
            _ => break,
        }
    }
    basis
}

fn complement_basis(span: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let mut all: Vec<Vec<f64>> = span.to_vec();
    let mut out = Vec::new();
    for i in 0..dim {
        if all.len() == dim {
            break;
        }
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        for b in &all {
            let c = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let n = norm(&v);
        if n > 1e-6 {
            let v: Vec<f64> = v.iter().map(|x| x / n).collect();
            all.push(v.clone());
            out.push(v);
        }
    }
    out
}

type Facet = (Vec<f64>, f64);

/// Hull of points given in `k` span coordinates: vertex indices and facets `ν·y <= β`.
fn hull_in_span(ys: &[Vec<f64>], k: usize, tol: f64) -> (Vec<usize>, Vec<Facet>) {
    match k {
        0 => (vec![0], Vec::new()),
        1 => {
            let (mut lo, mut hi) = (0, 0);
            for (i, y) in ys.iter().enumerate() {
                if y[0] < ys[lo][0] {
                    lo = i;
                }
                if y[0] > ys[hi][0] {
                    hi = i;
                }
            }
            (
                vec![lo, hi],
                vec![(vec![-1.0], -ys[lo][0]), (vec![1.0], ys[hi][0])],
            )
        }
        2 => hull_2d(ys, tol),
        _ => hull_brute(ys, k, tol),
    }
}

fn cross(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn hull_2d(ys: &[Vec<f64>], tol: f64) -> (Vec<usize>, Vec<Facet>) {
    let mut idx: Vec<usize> = (0..ys.len()).collect();
    idx.sort_by(|&i, &j| {
        ys[i][0]
            .partial_cmp(&ys[j][0])
            .unwrap()
            .then(ys[i][1].partial_cmp(&ys[j][1]).unwrap())
    });
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && cross(
                &ys[lower[lower.len() - 2]],
                &ys[lower[lower.len() - 1]],
                &ys[i],
            ) <= tol * tol
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && cross(
                &ys[upper[upper.len() - 2]],
                &ys[upper[upper.len() - 1]],
                &ys[i],
            ) <= tol * tol
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    let ring = lower;
    let mut facets = Vec::with_capacity(ring.len());
    for t in 0..ring.len() {
        let a = &ys[ring[t]];
        let b = &ys[ring[(t + 1) % ring.len()]];
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let n = (dx * dx + dy * dy).sqrt();
        let nu = vec![dy / n, -dx / n];
        let beta = dot(&nu, a);
        facets.push((nu, beta));
    }
    (ring, facets)
}

fn hull_brute(ys: &[Vec<f64>], k: usize, tol: f64) -> (Vec<usize>, Vec<Facet>) {
    let mut facets: Vec<Facet> = Vec::new();
    for combo in Combinations::new(ys.len(), k) {
        let rows: Vec<Vec<f64>> = combo[1..]
            .iter()
            .map(|&i| {
                ys[i]
                    .iter()
                    .zip(&ys[combo[0]])
                    .map(|(a, b)| a - b)
                    .collect()
            })
            .collect();
        let Some(nu) = null_vector(rows, k) else {
            continue;
        };
        let beta = dot(&nu, &ys[combo[0]]);
        let sides: Vec<f64> = ys.iter().map(|y| dot(&nu, y) - beta).collect();
        let cand = if sides.iter().all(|&s| s <= tol) {
            (nu, beta)
        } else if sides.iter().all(|&s| s >= -tol) {
            (nu.iter().map(|x| -x).collect(), -beta)
        } else {
            continue;
        };
        if !facets
            .iter()
            .any(|(n, b)| dist(n, &cand.0) <= 1e-7 && (b - cand.1).abs() <= tol)
        {
            facets.push(cand);
        }
    }
    let mut verts = Vec::new();
    for (i, y) in ys.iter().enumerate() {
        let active: Vec<Vec<f64>> = facets
            .iter()
            .filter(|(n, b)| (dot(n, y) - b).abs() <= tol)
            .map(|(n, _)| n.clone())
            .collect();
        if rank(active, k) == k {
            verts.push(i);
        }
    }
    (verts, facets)
}

fn relative_volume_in_span(ys: &[Vec<f64>], k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => {
            let lo = ys.iter().map(|y| y[0]).fold(f64::INFINITY, f64::min);
            let hi = ys.iter().map(|y| y[0]).fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        }
        2 => {
            let tol = GEOM_TOL * ys.iter().flatten().map(|x| x.abs()).fold(1.0, f64::max);
            let (ring, _) = hull_2d(ys, tol);
            let mut area = 0.0;
            for t in 0..ring.len() {
                let a = &ys[ring[t]];
                let b = &ys[ring[(t + 1) % ring.len()]];
                area += a[0] * b[1] - a[1] * b[0];
            }
            0.5 * area.abs()
        }
        _ => {
            let tol = GEOM_TOL * ys.iter().flatten().map(|x| x.abs()).fold(1.0, f64::max);
            let (_, facets) = hull_brute(ys, k, tol);
            let c: Vec<f64> = (0..k)
                .map(|i| ys.iter().map(|y| y[i]).sum::<f64>() / ys.len() as f64)
                .collect();
            let mut vol = 0.0;
            for (nu, beta) in facets {
                let h = beta - dot(&nu, &c);
                let on: Vec<Vec<f64>> = ys
                    .iter()
                    .filter(|y| (dot(&nu, y) - beta).abs() <= tol)
                    .cloned()
                    .collect();
                if let Ok(face) = convex_hull(&on) {
                    vol += h * face.relative_volume() / k as f64;
                }
            }
            vol
        }
    }
}

/// Iterator over `k`-subsets of `0..n` in lexicographic order.
pub(crate) struct Combinations {
    n: usize,
    cur: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            cur: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let k = self.cur.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.cur[i] < self.n - k + i {
                self.cur[i] += 1;
                for j in i + 1..k {
                    self.cur[j] = self.cur[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Solves a square system by Gaussian elimination with partial pivoting.
pub(crate) fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv =
            (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                let pivot = a[col].clone();
                for (x, p) in a[r][col..n].iter_mut().zip(&pivot[col..n]) {
                    *x -= f * p;
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Unit vector orthogonal to `k - 1` rows in `R^k`, if they are independent.
fn null_vector(mut rows: Vec<Vec<f64>>, k: usize) -> Option<Vec<f64>> {
    let m = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..k {
        if r == m {
            break;
        }
        let piv =
            (r..m).max_by(|&i, &j| rows[i][col].abs().partial_cmp(&rows[j][col].abs()).unwrap())?;
        if rows[piv][col].abs() < 1e-12 {
            continue;
        }
        rows.swap(r, piv);
        let p = rows[r][col];
        rows[r].iter_mut().for_each(|x| *x /= p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate().take(m) {
            let f = row[col];
            if i != r && f != 0.0 {
                for (x, p) in row[..k].iter_mut().zip(&pivot[..k]) {
                    *x -= f * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if pivots.len() != k - 1 {
        return None;
    }
    let free = (0..k).find(|c| !pivots.contains(c))?;
    let mut v = vec![0.0; k];
    v[free] = 1.0;
    for (i, &pc) in pivots.iter().enumerate() {
        v[pc] = -rows[i][free];
    }
    let n = norm(&v);
    Some(v.iter().map(|x| x / n).collect())
}

fn rank(mut rows: Vec<Vec<f64>>, k: usize) -> usize {
    let m = rows.len();
    let mut r = 0;
    for col in 0..k {
        if r == m {
            break;
        }
        let Some(piv) =
            (r..m).max_by(|&i, &j| rows[i][col].abs().partial_cmp(&rows[j][col].abs()).unwrap())
        else {
            break;
        };
        if rows[piv][col].abs() < 1e-9 {
            continue;
        }
        rows.swap(r, piv);
        for i in r + 1..m {
            let f = rows[i][col] / rows[r][col];
            let pivot = rows[r].clone();
            for (x, p) in rows[i][col..k].iter_mut().zip(&pivot[col..k]) {
                *x -= f * p;
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_from_two_points() {
        let p = convex_hull(&[vec![0.0], vec![1.0]]).unwrap();
        assert_eq!(p.vertices().len(), 2);
        assert!((p.volume() - 1.0).abs() < 1e-15);
        assert!(p.contains(&[0.5], 0.0));
        assert!(!p.contains(&[1.1], 1e-9));
    }

    #[test]
    fn interior_point_is_absorbed() {
        let p = convex_hull(&[
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.25, 0.25],
        ])
        .unwrap();
        assert_eq!(p.vertices().len(), 3);
        assert!(!p.vertices().iter().any(|v| v == &vec![0.25, 0.25]));
        assert!((p.volume() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn collinear_points_are_flat() {
        let p = convex_hull(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![0.5, 0.5]]).unwrap();
        assert_eq!(p.affine_dim(), 1);
        assert_eq!(p.volume(), 0.0);
        assert!((p.relative_volume() - 2f64.sqrt()).abs() < 1e-12);
        assert!(p.contains(&[0.3, 0.3], 1e-9));
        assert!(!p.contains(&[0.3, 0.4], 1e-9));
    }

    #[test]
    fn cube_volume_and_facets() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(vec![
                (i & 1) as f64,
                ((i >> 1) & 1) as f64,
                ((i >> 2) & 1) as f64 * 2.0,
            ]);
        }
        pts.push(vec![0.5, 0.5, 1.0]);
        let p = convex_hull(&pts).unwrap();
        assert_eq!(p.vertices().len(), 8);
        assert_eq!(p.halfspaces().len(), 6);
        assert!((p.volume() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn from_halfspaces_square() {
        let hs = vec![
            Halfspace::new(vec![-1.0, 0.0], 0.0),
            Halfspace::new(vec![1.0, 0.0], 1.0),
            Halfspace::new(vec![0.0, -1.0], 0.0),
            Halfspace::new(vec![0.0, 1.0], 1.0),
            Halfspace::new(vec![1.0, 1.0], 3.0),
        ];
        let p = Polytope::from_halfspaces(2, &hs).unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert!((p.volume() - 1.0).abs() < 1e-14);
        let cut = p
            .intersect(&[Halfspace::new(vec![1.0, 0.0], 0.5)])
            .unwrap()
            .unwrap();
        assert!((cut.volume() - 0.5).abs() < 1e-14);
        assert!(p
            .intersect(&[Halfspace::new(vec![1.0, 0.0], -1.0)])
            .unwrap()
            .is_none());
    }

    #[test]
    fn hull_rejects_mixed_dimensions() {
        let err = convex_hull(&[vec![0.0], vec![1.0, 2.0]]).unwrap_err();
        assert!(matches!(err, ConvexError::DimensionMismatch { .. }));
    }

    #[test]
    fn combinations_count() {
        assert_eq!(Combinations::new(5, 2).count(), 10);
        assert_eq!(Combinations::new(3, 3).count(), 1);
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }
}

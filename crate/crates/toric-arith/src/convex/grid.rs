use serde::{Deserialize, Serialize};

use super::{ConvexError, Polytope, Result, CONVEXITY_TOL, GEOM_TOL};

/// `n >= 2` equally spaced abscissae on `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl UniformGrid {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(ConvexError::NonFinite("grid bounds"));
        }
        if n < 2 || min >= max {
            return Err(ConvexError::InvalidGrid(format!(
                "[{min}, {max}] with {n} points"
            )));
        }
        Ok(Self { min, max, n })
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.max
        } else {
            self.min + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Default number of dual-grid points for one-dimensional conjugates.
///
/// Near a boundary slope the conjugate of a smooth potential behaves like
/// `x log x`, so linear interpolation on a dual grid of step `h` loses up to
/// `h / e` next to the boundary; this resolution keeps biconjugation of unit
/// width slope ranges within `1e-6`.
pub const DUAL_RESOLUTION_1D: usize = 1_000_001;

/// Convex samples on a uniform box grid with explicit recession slopes.
///
/// Outside the sampled box the function continues affinely with the recession
/// slopes, so the conjugate is finite exactly on the box of slope ranges.
/// Values are stored row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConvexFunction {
    axes: Vec<UniformGrid>,
    values: Vec<f64>,
    recession: Vec<(f64, f64)>,
}

impl GridConvexFunction {
    pub fn new(
        axes: Vec<UniformGrid>,
        values: Vec<f64>,
        recession: Vec<(f64, f64)>,
    ) -> Result<Self> {
        if axes.is_empty() {
            return Err(ConvexError::Empty("grid axes"));
        }
        if recession.len() != axes.len() {
            return Err(ConvexError::DimensionMismatch {
                expected: axes.len(),
                found: recession.len(),
            });
        }
        let total: usize = axes.iter().map(|a| a.n).product();
        if values.len() != total {
            return Err(ConvexError::DimensionMismatch {
                expected: total,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ConvexError::NonFinite("grid values"));
        }
        for &(lo, hi) in &recession {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(ConvexError::InvalidSlopeRange { lo, hi });
            }
        }
        let f = Self {
            axes,
            values,
            recession,
        };
        f.check_lines()?;
        Ok(f)
    }

    /// Samples `f` on the grid.
    pub fn from_fn(
        axes: Vec<UniformGrid>,
        recession: Vec<(f64, f64)>,
        f: impl Fn(&[f64]) -> f64,
    ) -> Result<Self> {
        let dims: Vec<usize> = axes.iter().map(|a| a.n).collect();
        let total: usize = dims.iter().product();
        let mut values = Vec::with_capacity(total);
        let mut idx = vec![0usize; axes.len()];
        let mut x = vec![0.0; axes.len()];
        for _ in 0..total {
            for (k, a) in axes.iter().enumerate() {
                x[k] = a.point(idx[k]);
            }
            values.push(f(&x));
            for k in (0..axes.len()).rev() {
                idx[k] += 1;
                if idx[k] < dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Self::new(axes, values, recession)
    }

    fn check_lines(&self) -> Result<()> {
        let d = self.axes.len();
        let dims: Vec<usize> = self.axes.iter().map(|a| a.n).collect();
        for axis in 0..d {
            let stride: usize = dims[axis + 1..].iter().product();
            let h = self.axes[axis].step();
            let (lo, hi) = self.recession[axis];
            let scale = self.values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
            for start in 0..self.values.len() {
                if !(start / stride).is_multiple_of(dims[axis]) {
                    continue;
                }
                let line: Vec<f64> = (0..dims[axis])
                    .map(|i| self.values[start + i * stride])
                    .collect();
                for i in 1..line.len() - 1 {
                    let sd = line[i - 1] - 2.0 * line[i] + line[i + 1];
                    if sd < -CONVEXITY_TOL * scale.max(1.0) {
                        return Err(ConvexError::NotConvex {
                            axis,
                            index: i,
                            value: sd,
                        });
                    }
                }
                let first = (line[1] - line[0]) / h;
                let last = (line[line.len() - 1] - line[line.len() - 2]) / h;
                let slack = GEOM_TOL * (1.0 + lo.abs().max(hi.abs()));
                if first < lo - slack {
                    return Err(ConvexError::RecessionMismatch {
                        axis,
                        slope: first,
                        lo,
                        hi,
                    });
                }
                if last > hi + slack {
                    return Err(ConvexError::RecessionMismatch {
                        axis,
                        slope: last,
                        lo,
                        hi,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[UniformGrid] {
        &self.axes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn recession(&self) -> &[(f64, f64)] {
        &self.recession
    }

    /// Same grid and recession data with new values, revalidated.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.axes.clone(), values, self.recession.clone())
    }

    /// Sup-norm distance to a function on the same grid.
    pub fn max_abs_diff(&self, other: &GridConvexFunction) -> Result<f64> {
        if self.axes != other.axes {
            return Err(ConvexError::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    fn require_1d(&self) -> Result<()> {
        if self.dim() != 1 {
            return Err(ConvexError::UnsupportedDimension(self.dim()));
        }
        Ok(())
    }

    /// Piecewise-linear evaluation with affine continuation (one dimension).
    pub fn eval(&self, s: f64) -> Result<f64> {
        self.require_1d()?;
        let g = self.axes[0];
        let v = &self.values;
        let (lo, hi) = self.recession[0];
        if s <= g.min {
            return Ok(v[0] + lo * (s - g.min));
        }
        if s >= g.max {
            return Ok(v[g.n - 1] + hi * (s - g.max));
        }
        let t = (s - g.min) / g.step();
        let i = (t.floor() as usize).min(g.n - 2);
        let frac = t - i as f64;
        Ok(v[i] + frac * (v[i + 1] - v[i]))
    }

    /// Slopes between consecutive samples (one dimension).
    pub fn slopes(&self) -> Result<Vec<f64>> {
        self.require_1d()?;
        let h = self.axes[0].step();
        Ok(self.values.windows(2).map(|w| (w[1] - w[0]) / h).collect())
    }

    /// Exact conjugate `sup_s (x s - u(s))` of the interpolated function (one dimension).
    pub fn conjugate_at(&self, x: f64) -> Result<f64> {
        self.require_1d()?;
        let (lo, hi) = self.recession[0];
        let slack = GEOM_TOL * (1.0 + lo.abs().max(hi.abs()));
        if x < lo - slack || x > hi + slack {
            return Err(ConvexError::Unbounded { x, lo, hi });
        }
        let g = self.axes[0];
        Ok((0..g.n)
            .map(|j| x * g.point(j) - self.values[j])
            .fold(f64::NEG_INFINITY, f64::max))
    }
}

/// Exact conjugate of a one-dimensional interpolated grid function.
///
/// `u*` is piecewise linear in `x` with breakpoints at the slopes of the lower
/// hull of the samples, so evaluation and integration are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactConjugate {
    s: Vec<f64>,
    v: Vec<f64>,
    breaks: Vec<f64>,
    lo: f64,
    hi: f64,
}

impl ExactConjugate {
    pub fn new(u: &GridConvexFunction) -> Result<Self> {
        u.require_1d()?;
        let pts = u.axes[0].points();
        let hull = lower_hull(&pts, &u.values);
        let s: Vec<f64> = hull.iter().map(|&j| pts[j]).collect();
        let v: Vec<f64> = hull.iter().map(|&j| u.values[j]).collect();
        let breaks = s
            .windows(2)
            .zip(v.windows(2))
            .map(|(a, b)| (b[1] - b[0]) / (a[1] - a[0]))
            .collect();
        let (lo, hi) = u.recession[0];
        Ok(Self {
            s,
            v,
            breaks,
            lo,
            hi,
        })
    }

    /// The slope range on which the conjugate is finite.
    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Slopes of the lower hull; the conjugate is linear between them.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    fn piece(&self, x: f64) -> usize {
        self.breaks.partition_point(|&b| b < x)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let slack = GEOM_TOL * (1.0 + self.lo.abs().max(self.hi.abs()));
        if x < self.lo - slack || x > self.hi + slack {
            return Err(ConvexError::Unbounded {
                x,
                lo: self.lo,
                hi: self.hi,
            });
        }
        let k = self.piece(x);
        Ok(x * self.s[k] - self.v[k])
    }

    /// `∫_a^b u*(x) dx` for `a <= b` inside the domain.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        self.eval(a)?;
        self.eval(b)?;
        let mut total = 0.0;
        let mut left = a;
        let mut k = self.piece(a);
        loop {
            let right = if k < self.breaks.len() {
                self.breaks[k].min(b)
            } else {
                b
            };
            if right > left {
                total +=
                    0.5 * self.s[k] * (right * right - left * left) - self.v[k] * (right - left);
                left = right;
            }
            if right >= b {
                break;
            }
            k += 1;
        }
        Ok(total)
    }

    /// Minimum of `u*` on `[a, b]` and a minimizer.
    pub fn min_on(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        let mut best = (a, self.eval(a)?);
        let fb = self.eval(b)?;
        if fb < best.1 {
            best = (b, fb);
        }
        let from = self.breaks.partition_point(|&x| x <= a);
        for &x in self.breaks[from..].iter().take_while(|&&x| x < b) {
            let fx = self.eval(x)?;
            if fx < best.1 {
                best = (x, fx);
            }
        }
        Ok(best)
    }
}

/// Lower convex hull indices of `(s_j, v_j)` with increasing `s`.
fn lower_hull(s: &[f64], v: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(s.len());
    for j in 0..s.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b when it lies on or above the chord a-j
            let lhs = (v[b] - v[a]) * (s[j] - s[a]);
            let rhs = (v[j] - v[a]) * (s[b] - s[a]);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(j);
    }
    hull
}

/// Linear-time discrete conjugate at sorted `xs`.
fn llt(s: &[f64], v: &[f64], xs: &[f64]) -> Vec<f64> {
    let hull = lower_hull(s, v);
    let mut k = 0;
    xs.iter()
        .map(|&x| {
            while k + 1 < hull.len()
                && x * s[hull[k + 1]] - v[hull[k + 1]] >= x * s[hull[k]] - v[hull[k]]
            {
                k += 1;
            }
            x * s[hull[k]] - v[hull[k]]
        })
        .collect()
}

/// Samples `u*(x) = sup_s (<x, s> - u(s))` on a uniform grid over the bounding
/// box of `x_domain`, `resolution` points per axis.
///
/// The result carries the sampled `s`-box as its recession range, so
/// conjugating it back over that box is well posed.
pub fn legendre_conjugate(
    u: &GridConvexFunction,
    x_domain: &Polytope,
    resolution: usize,
) -> Result<GridConvexFunction> {
    let d = u.dim();
    if x_domain.dim() != d {
        return Err(ConvexError::DimensionMismatch {
            expected: d,
            found: x_domain.dim(),
        });
    }
    if d > 2 {
        return Err(ConvexError::UnsupportedDimension(d));
    }
    let bbox = x_domain.bounding_box();
    let mut xaxes = Vec::with_capacity(d);
    for (axis, &(xlo, xhi)) in bbox.iter().enumerate() {
        let (lo, hi) = u.recession[axis];
        let slack = GEOM_TOL * (1.0 + lo.abs().max(hi.abs()));
        if xlo < lo - slack {
            return Err(ConvexError::Unbounded { x: xlo, lo, hi });
        }
        if xhi > hi + slack {
            return Err(ConvexError::Unbounded { x: xhi, lo, hi });
        }
        xaxes.push(UniformGrid::new(xlo, xhi, resolution)?);
    }
    let out_rec: Vec<(f64, f64)> = u.axes.iter().map(|a| (a.min, a.max)).collect();
    let values = if d == 1 {
        llt(&u.axes[0].points(), &u.values, &xaxes[0].points())
    } else {
        let (n1, n2) = (u.axes[0].n, u.axes[1].n);
        let s1 = u.axes[0].points();
        let s2 = u.axes[1].points();
        let x1 = xaxes[0].points();
        let x2 = xaxes[1].points();
        // pass 1: conjugate along axis 0 for every fixed s2
        let mut v = vec![0.0; x1.len() * n2];
        let mut col = vec![0.0; n1];
        for j in 0..n2 {
            for (i, c) in col.iter_mut().enumerate() {
                *c = u.values[i * n2 + j];
            }
            for (p, val) in llt(&s1, &col, &x1).into_iter().enumerate() {
                v[p * n2 + j] = val;
            }
        }
        // pass 2: sup over s2 of x2 s2 + v, the conjugate of -v
        let mut out = vec![0.0; x1.len() * x2.len()];
        let mut row = vec![0.0; n2];
        for p in 0..x1.len() {
            for j in 0..n2 {
                row[j] = -v[p * n2 + j];
            }
            for (q, val) in llt(&s2, &row, &x2).into_iter().enumerate() {
                out[p * x2.len() + q] = val;
            }
        }
        out
    };
    GridConvexFunction::new(xaxes, values, out_rec)
}

use super::model::{Potential, ToricArithDivisor};
use super::{entropy_term, Result};
use crate::convex::{ConcaveFunction, ExactConjugate, Polytope};

#[derive(Debug, Clone)]
enum Kind {
    /// `A_i = deg·a_i`.
    Canonical {
        a: Vec<f64>,
        big_a: Vec<f64>,
    },
    Sampled(ExactConjugate),
}

/// The concave transform `G(x) = -u*(x)/2 + λ/2` on `Δ_D`.
///
/// For the canonical family `G(x) = ½ Σ_{i=0}^d w_i log(deg·a_i / w_i) + λ/2`
/// in multiplicity coordinates, with `0 log 0 = 0`; for a sampled potential
/// the conjugate of the interpolant is evaluated exactly. Outside `Δ_D` the
/// transform is `-∞`.
#[derive(Debug, Clone)]
pub struct ConcaveTransform {
    d: usize,
    coeffs: Vec<f64>,
    twist: f64,
    kind: Kind,
    domain: Polytope,
}

impl ToricArithDivisor {
    /// The concave transform of this divisor.
    pub fn transform(&self) -> Result<ConcaveTransform> {
        ConcaveTransform::new(self)
    }
}

impl ConcaveTransform {
    pub fn new(divisor: &ToricArithDivisor) -> Result<Self> {
        let kind = match divisor.potential() {
            Potential::Canonical { a } => {
                let deg = divisor.degree();
                Kind::Canonical {
                    a: a.clone(),
                    big_a: a.iter().map(|ai| deg * ai).collect(),
                }
            }
            Potential::Sampled(_) => {
                Kind::Sampled(divisor.exact_conjugate()?.expect("sampled potential"))
            }
        };
        Ok(Self {
            d: divisor.d(),
            coeffs: divisor.coeffs().to_vec(),
            twist: divisor.twist(),
            kind,
            domain: divisor.body()?,
        })
    }

    /// `Δ_D`.
    pub fn domain(&self) -> &Polytope {
        &self.domain
    }

    pub fn twist(&self) -> f64 {
        self.twist
    }

    /// Family parameters when `G` has the canonical closed form.
    pub fn closed_form(&self) -> Option<&[f64]> {
        match &self.kind {
            Kind::Canonical { a, .. } => Some(a),
            Kind::Sampled(_) => None,
        }
    }

    fn degree(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    fn w_coords(&self, x: &[f64]) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.d + 1);
        w.push(self.coeffs[0] - x.iter().sum::<f64>());
        w.extend(x.iter().zip(&self.coeffs[1..]).map(|(xi, ci)| xi + ci));
        w
    }

    fn tol(&self) -> f64 {
        1e-12 * (1.0 + self.degree().abs())
    }

    /// `G(x)`, or `-∞` outside the body.
    pub fn eval_point(&self, x: &[f64]) -> f64 {
        match &self.kind {
            Kind::Canonical { big_a, .. } => {
                let w = self.w_coords(x);
                if w.iter().any(|&wi| wi < -self.tol()) {
                    return f64::NEG_INFINITY;
                }
                0.5 * w
                    .iter()
                    .zip(big_a)
                    .map(|(&wi, &ai)| entropy_term(wi, ai))
                    .sum::<f64>()
                    + 0.5 * self.twist
            }
            Kind::Sampled(conj) => match conj.eval(x[0]) {
                Ok(v) => -0.5 * v + 0.5 * self.twist,
                Err(_) => f64::NEG_INFINITY,
            },
        }
    }

    /// `max G` over the body and a maximizer.
    pub fn argmax(&self) -> (Vec<f64>, f64) {
        match &self.kind {
            Kind::Canonical { a, .. } => {
                let deg = self.degree();
                let total: f64 = a.iter().sum();
                let x: Vec<f64> = a[1..]
                    .iter()
                    .zip(&self.coeffs[1..])
                    .map(|(ai, ci)| deg * ai / total - ci)
                    .collect();
                let value = 0.5 * deg * total.ln() + 0.5 * self.twist;
                (x, value)
            }
            Kind::Sampled(conj) => {
                let (lo, hi) = conj.domain();
                let (x, v) = conj.min_on(lo, hi).expect("domain endpoints");
                (vec![x], -0.5 * v + 0.5 * self.twist)
            }
        }
    }

    pub fn max_value(&self) -> f64 {
        self.argmax().1
    }

    /// `∫_a^b G` on the projective line, exact.
    pub fn integral_1d(&self, a: f64, b: f64) -> f64 {
        self.line_integral(&[], a, b).unwrap_or(f64::NAN)
    }

    /// Samples `(x, G(x))` on the lattice `{w = deg·k/res}` of the body.
    pub fn sample(&self, res: usize) -> Vec<(Vec<f64>, f64)> {
        let res = res.max(1);
        let deg = self.degree();
        let mut out = Vec::new();
        let mut k = vec![0usize; self.d];
        loop {
            let used: usize = k.iter().sum();
            if used <= res {
                let x: Vec<f64> = k
                    .iter()
                    .zip(&self.coeffs[1..])
                    .map(|(&ki, ci)| deg * ki as f64 / res as f64 - ci)
                    .collect();
                let g = self.eval_point(&x);
                out.push((x, g));
            }
            let mut i = self.d;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                k[i] += 1;
                if k[i] <= res {
                    break;
                }
                k[i] = 0;
            }
        }
    }
}

/// `∫_0^w t log(A / t) dt`.
fn entropy_antiderivative(w: f64, big_a: f64) -> f64 {
    if w <= 0.0 {
        0.0
    } else {
        0.5 * w * w * (big_a / w).ln() + 0.25 * w * w
    }
}

impl ConcaveFunction for ConcaveTransform {
    fn dim(&self) -> usize {
        self.d
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.eval_point(x)
    }

    fn line_integral(&self, prefix: &[f64], lo: f64, hi: f64) -> Option<f64> {
        if hi <= lo {
            return Some(0.0);
        }
        match &self.kind {
            Kind::Canonical { big_a, .. } => {
                let k = self.d;
                // along x_k: w_k = x_k + c_k rises, w_0 = c_0 - Σ prefix - x_k falls
                let c0 = self.coeffs[0] - prefix.iter().sum::<f64>();
                let ck = self.coeffs[k];
                let rising = entropy_antiderivative((hi + ck).max(0.0), big_a[k])
                    - entropy_antiderivative((lo + ck).max(0.0), big_a[k]);
                let falling = entropy_antiderivative((c0 - lo).max(0.0), big_a[0])
                    - entropy_antiderivative((c0 - hi).max(0.0), big_a[0]);
                let fixed: f64 = prefix
                    .iter()
                    .enumerate()
                    .map(|(i, xi)| entropy_term(xi + self.coeffs[i + 1], big_a[i + 1]))
                    .sum();
                Some(0.5 * (rising + falling) + (hi - lo) * 0.5 * (fixed + self.twist))
            }
            Kind::Sampled(conj) => {
                let integral = conj.integral(lo, hi).ok()?;
                Some(-0.5 * integral + 0.5 * self.twist * (hi - lo))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::UniformGrid;

    #[test]
    fn vertex_values_and_maximum() {
        let d = ToricArithDivisor::canonical(&[1.0, 2.0, 4.0])
            .unwrap()
            .with_twist(0.3);
        let g = d.transform().unwrap();
        assert!((g.eval_point(&[1.0, 0.0]) - (0.5 * 2f64.ln() + 0.15)).abs() < 1e-15);
        let (x, v) = g.argmax();
        assert!((v - (0.5 * 7f64.ln() + 0.15)).abs() < 1e-15);
        assert!((g.eval_point(&x) - v).abs() < 1e-14);
        assert_eq!(g.eval_point(&[0.8, 0.3]), f64::NEG_INFINITY);
    }

    #[test]
    fn half_log_two_at_midpoint() {
        let g = ToricArithDivisor::canonical(&[1.0, 1.0])
            .unwrap()
            .transform()
            .unwrap();
        assert!((g.eval_point(&[0.5]) - 0.5 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn line_integral_matches_quadrature() {
        let d = ToricArithDivisor::new(
            2,
            vec![1.5, 0.2, -0.4],
            Potential::Canonical {
                a: vec![0.7, 1.3, 2.0],
            },
            0.1,
        )
        .unwrap();
        let g = d.transform().unwrap();
        let (lo, hi) = (0.5, 1.2);
        let x1 = -0.05;
        let n = 100_000;
        let h = (hi - lo) / n as f64;
        let mid: f64 = (0..n)
            .map(|i| g.eval_point(&[x1, lo + (i as f64 + 0.5) * h]))
            .sum::<f64>()
            * h;
        assert!((g.line_integral(&[x1], lo, hi).unwrap() - mid).abs() < 1e-9);
    }

    #[test]
    fn sampled_transform_tracks_closed_form() {
        let d = ToricArithDivisor::canonical(&[1.0, 1.0]).unwrap();
        let s = d
            .sampled(UniformGrid::new(-40.0, 40.0, 16_001).unwrap())
            .unwrap();
        let (gc, gs) = (d.transform().unwrap(), s.transform().unwrap());
        for k in 0..=100 {
            let x = k as f64 / 100.0;
            assert!(
                (gc.eval_point(&[x]) - gs.eval_point(&[x])).abs() < 1e-6,
                "x = {x}"
            );
        }
    }
}

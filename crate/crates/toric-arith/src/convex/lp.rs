//! Dense two-phase simplex for small linear programs.

const EPS: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        self.rows[r].iter_mut().for_each(|x| *x /= p);
        self.rhs[r] /= p;
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c];
            if f != 0.0 {
                for j in 0..self.rows[i].len() {
                    self.rows[i][j] -= f * self.rows[r][j];
                }
                self.rhs[i] -= f * self.rhs[r];
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost · z` from the current basis; `false` when unbounded.
    fn run(&mut self, cost: &[f64], allowed: &[bool]) -> bool {
        let ncol = cost.len();
        for _ in 0..50_000 {
            let entering = (0..ncol).find(|&j| {
                allowed[j] && !self.basis.contains(&j) && {
                    let r: f64 = cost[j]
                        - self
                            .basis
                            .iter()
                            .enumerate()
                            .map(|(i, &b)| cost[b] * self.rows[i][j])
                            .sum::<f64>();
                    r > EPS
                }
            });
            let Some(j) = entering else { return true };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][j];
                if a > EPS {
                    let ratio = self.rhs[i] / a;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - EPS
                                || (ratio <= lr + EPS && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(r, j);
        }
        true
    }
}

/// Maximizes `c · x` subject to `a x <= b` with `x` free.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> LpOutcome {
    let n = c.len();
    let m = b.len();
    let neg: Vec<usize> = (0..m).filter(|&i| b[i] < 0.0).collect();
    let ncol = 2 * n + m + neg.len();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![0.0; ncol];
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            row[j] = sign * a[i][j];
            row[n + j] = -sign * a[i][j];
        }
        row[2 * n + i] = sign;
        if let Some(k) = neg.iter().position(|&r| r == i) {
            row[2 * n + m + k] = 1.0;
            basis.push(2 * n + m + k);
        } else {
            basis.push(2 * n + i);
        }
        rows.push(row);
        rhs.push(sign * b[i]);
    }
    let mut t = Tableau { rows, rhs, basis };
    let art = |j: usize| j >= 2 * n + m;

    if !neg.is_empty() {
        let cost1: Vec<f64> = (0..ncol).map(|j| if art(j) { -1.0 } else { 0.0 }).collect();
        t.run(&cost1, &vec![true; ncol]);
        let infeas: f64 = t
            .basis
            .iter()
            .zip(&t.rhs)
            .filter(|(&bj, _)| art(bj))
            .map(|(_, &v)| v)
            .sum();
        if infeas > 1e-9 {
            return LpOutcome::Infeasible;
        }
        for r in 0..m {
            if art(t.basis[r]) {
                if let Some(j) = (0..2 * n + m).find(|&j| t.rows[r][j].abs() > 1e-9) {
                    t.pivot(r, j);
                }
            }
        }
    }

    let mut cost2 = vec![0.0; ncol];
    cost2[..n].copy_from_slice(c);
    for j in 0..n {
        cost2[n + j] = -c[j];
    }
    let allowed: Vec<bool> = (0..ncol).map(|j| !art(j)).collect();
    if !t.run(&cost2, &allowed) {
        return LpOutcome::Unbounded;
    }
    let mut z = vec![0.0; ncol];
    for (r, &bj) in t.basis.iter().enumerate() {
        z[bj] = t.rhs[r];
    }
    let x: Vec<f64> = (0..n).map(|j| z[j] - z[n + j]).collect();
    let value = c.iter().zip(&x).map(|(p, q)| p * q).sum();
    LpOutcome::Optimal { x, value }
}

//! Dense bounded-variable primal simplex.
//!
//! Solves `max cᵀx  s.t.  A x = b,  l ≤ x ≤ u` with finite lower bounds and
//! possibly infinite upper bounds. Phase one drives row artificials to zero;
//! Bland's rule on both the entering and leaving choice rules out cycling on
//! the degenerate problems the sensitivity LP produces.

const TOL: f64 = 1e-10;
const MAX_ITERATIONS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpError {
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

/// An LP in equality form with box bounds.
#[derive(Debug, Clone)]
pub struct BoundedLp {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `rows × cols` constraint matrix.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

struct Tableau {
    rows: usize,
    width: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
    x: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    is_basic: Vec<bool>,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let w = self.width;
        let p = self.t[r * w + j];
        for k in 0..w {
            self.t[r * w + k] /= p;
        }
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + j];
            if f == 0.0 {
                continue;
            }
            for k in 0..w {
                self.t[i * w + k] -= f * self.t[r * w + k];
            }
        }
    }

    /// Maximizes `cost · x` from the current basic feasible solution.
    fn optimize(&mut self, cost: &[f64]) -> Result<(), LpError> {
        for _ in 0..MAX_ITERATIONS {
            // reduced cost d_j = c_j − Σ_i c_B(i) T_ij
            let mut entering = None;
            for j in 0..self.width {
                if self.is_basic[j] || self.upper[j] - self.lower[j] <= 0.0 {
                    continue;
                }
                let mut d = cost[j];
                for i in 0..self.rows {
                    d -= cost[self.basis[i]] * self.at(i, j);
                }
                let at_lower = self.x[j] <= self.lower[j];
                if (at_lower && d > TOL) || (!at_lower && d < -TOL) {
                    entering = Some((j, if at_lower { 1.0 } else { -1.0 }));
                    break;
                }
            }
            let Some((j, dir)) = entering else {
                return Ok(());
            };

            let mut step = self.upper[j] - self.lower[j];
            let mut leaving: Option<(usize, bool)> = None;
            for i in 0..self.rows {
                let alpha = self.at(i, j) * dir;
                let bv = self.basis[i];
                let limit = if alpha > TOL {
                    (self.x[bv] - self.lower[bv]) / alpha
                } else if alpha < -TOL && self.upper[bv].is_finite() {
                    (self.upper[bv] - self.x[bv]) / -alpha
                } else {
                    continue;
                };
                let limit = limit.max(0.0);
                let better = if limit < step - TOL {
                    true
                } else if limit <= step + TOL {
                    // ties: pivot before a bound flip, then lowest basic index
                    leaving.is_none_or(|(r, _)| bv < self.basis[r])
                } else {
                    false
                };
                if better {
                    step = limit.min(step);
                    leaving = Some((i, alpha > 0.0));
                }
            }
            if !step.is_finite() {
                return Err(LpError::Unbounded);
            }

            for i in 0..self.rows {
                let bv = self.basis[i];
                self.x[bv] -= self.at(i, j) * dir * step;
            }
            self.x[j] += dir * step;

            match leaving {
                None => {
                    // bound flip
                    self.x[j] = if dir > 0.0 { self.upper[j] } else { self.lower[j] };
                }
                Some((r, to_lower)) => {
                    let out = self.basis[r];
                    self.x[out] = if to_lower { self.lower[out] } else { self.upper[out] };
                    self.is_basic[out] = false;
                    self.is_basic[j] = true;
                    self.basis[r] = j;
                    self.pivot(r, j);
                }
            }
        }
        Err(LpError::IterationLimit)
    }
}

impl BoundedLp {
    pub fn maximize(&self) -> Result<LpSolution, LpError> {
        let (m, n) = (self.rows, self.cols);
        assert_eq!(self.a.len(), m * n);
        let width = n + m;
        let mut lower = self.lower.clone();
        let mut upper = self.upper.clone();
        lower.extend(std::iter::repeat_n(0.0, m));
        upper.extend(std::iter::repeat_n(f64::INFINITY, m));
        let mut x = lower.clone();

        let mut t = vec![0.0; m * width];
        for i in 0..m {
            let row = &self.a[i * n..(i + 1) * n];
            let residual = self.b[i] - row.iter().zip(&self.lower).map(|(a, l)| a * l).sum::<f64>();
            let sign = if residual < 0.0 { -1.0 } else { 1.0 };
            for j in 0..n {
                t[i * width + j] = sign * row[j];
            }
            t[i * width + n + i] = 1.0;
            x[n + i] = residual.abs();
        }
        let mut is_basic = vec![false; width];
        for i in 0..m {
            is_basic[n + i] = true;
        }
        let mut tab = Tableau {
            rows: m,
            width,
            t,
            basis: (n..n + m).collect(),
            x,
            lower,
            upper,
            is_basic,
        };

        let mut phase1 = vec![0.0; width];
        for c in &mut phase1[n..] {
            *c = -1.0;
        }
        tab.optimize(&phase1)?;
        let infeasibility: f64 = tab.x[n..].iter().sum();
        let scale = 1.0 + self.b.iter().map(|v| v.abs()).sum::<f64>();
        if infeasibility > 1e-8 * scale {
            return Err(LpError::Infeasible);
        }
        for k in n..width {
            tab.upper[k] = 0.0;
            if !tab.is_basic[k] {
                tab.x[k] = 0.0;
            }
        }

        let mut phase2 = self.c.clone();
        phase2.extend(std::iter::repeat_n(0.0, m));
        tab.optimize(&phase2)?;

        let x = tab.x[..n].to_vec();
        let objective = x.iter().zip(&self.c).map(|(a, b)| a * b).sum();
        Ok(LpSolution { x, objective })
    }
}

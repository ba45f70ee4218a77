use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::coreset::{nearest, WeightedPoint};
use crate::error::{invalid, Error, Result};
use crate::linalg::RowVector;
use crate::rng::{domain, CounterRng};
use crate::sampler::{solve_normal_equations, RegressionFit};

/// Dense `±1` sketch `S` of shape `m × n_bound` applied to streamed rows.
#[derive(Debug, Clone)]
pub struct SignSketch {
    m: usize,
    n_bound: usize,
    width: usize,
    signs: Vec<i8>,
    accumulated: DMatrix<f64>,
    rows_seen: usize,
    mass: f64,
}

impl SignSketch {
    pub fn new(m: usize, n_bound: usize, width: usize, seed: u64) -> Self {
        let mut rng = CounterRng::new(seed, domain::SKETCH).stream(0);
        let signs = (0..m * n_bound)
            .map(|_| if rng.random_bool(0.5) { 1 } else { -1 })
            .collect();
        Self {
            m,
            n_bound,
            width,
            signs,
            accumulated: DMatrix::zeros(m, width),
            rows_seen: 0,
            mass: 0.0,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n_bound(&self) -> usize {
        self.n_bound
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows_seen(&self) -> usize {
        self.rows_seen
    }

    pub fn accumulated(&self) -> &DMatrix<f64> {
        &self.accumulated
    }

    /// The first `n` columns of `S`.
    pub fn columns(&self, n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.m, n, |i, j| self.signs[i * self.n_bound + j] as f64)
    }

    /// Adds the next row at position `rows_seen`.
    pub fn absorb(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.width {
            return Err(Error::DimensionMismatch {
                expected: self.width,
                got: row.len(),
            });
        }
        if self.rows_seen >= self.n_bound {
            return Err(Error::StreamBoundExceeded {
                bound: self.n_bound,
            });
        }
        let j = self.rows_seen;
        for i in 0..self.m {
            let s = self.signs[i * self.n_bound + j] as f64;
            for (c, &x) in row.iter().enumerate() {
                self.accumulated[(i, c)] += s * x;
            }
        }
        self.mass += row.iter().map(|x| x * x).sum::<f64>();
        self.rows_seen += 1;
        Ok(())
    }

    /// Least squares on the sketched system, last column as target.
    ///
    /// A sketch with no energy left yields the zero vector, flagged as regularized.
    pub fn sketch_regress(&self) -> Result<RegressionFit> {
        if self.width < 2 {
            return Err(invalid("sketch must hold at least one feature and a target"));
        }
        let f = self.width - 1;
        let sa = self.accumulated.columns(0, f);
        let gxx = sa.transpose() * sa;
        let gxb: DVector<f64> = sa.transpose() * self.accumulated.column(f);
        let scale = self.m as f64 * self.mass;
        if gxx.trace() <= 1e-18 * scale {
            return Ok(RegressionFit {
                coefficients: RowVector::zeros(f),
                regularized: true,
            });
        }
        solve_normal_equations(gxx, gxb)
    }
}

/// Discounted mini-batch k-means in the style of Spark's streaming k-means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayKMeans {
    pub k: usize,
    pub centers: Vec<Vec<f64>>,
    pub counts: Vec<f64>,
}

impl DecayKMeans {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid("k must be positive"));
        }
        Ok(Self {
            k,
            centers: Vec::new(),
            counts: Vec::new(),
        })
    }

    /// Assigns the batch to the nearest centers, then moves each center to
    /// `(center·count·decay + batch_sum) / (count·decay + batch_count)`.
    /// The first batch supplies the initial centers.
    pub fn update(&mut self, batch: &[Vec<f64>], decay: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&decay) {
            return Err(invalid(format!("decay = {decay} outside [0, 1]")));
        }
        if batch.is_empty() {
            return Ok(());
        }
        if self.centers.is_empty() {
            self.centers = batch.iter().take(self.k).cloned().collect();
            self.counts = vec![0.0; self.centers.len()];
        }
        let dim = self.centers[0].len();
        let mut sums = vec![vec![0.0; dim]; self.centers.len()];
        let mut sizes = vec![0.0; self.centers.len()];
        for p in batch {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            let (j, _) = nearest(p, &self.centers);
            sizes[j] += 1.0;
            for (s, x) in sums[j].iter_mut().zip(p) {
                *s += x;
            }
        }
        for j in 0..self.centers.len() {
            let kept = self.counts[j] * decay;
            let total = kept + sizes[j];
            if total > 0.0 {
                for (c, s) in self.centers[j].iter_mut().zip(&sums[j]) {
                    *c = (*c * kept + s) / total;
                }
            }
            self.counts[j] = total;
        }
        Ok(())
    }

    pub fn as_points(&self) -> Vec<WeightedPoint> {
        self.centers
            .iter()
            .filter_map(|c| WeightedPoint::unit(c.clone()).ok())
            .collect()
    }
}

/// Norm beyond which the online regressor is declared divergent.
pub const DIVERGENCE_NORM: f64 = 1e12;

/// Per-sample least-mean-squares regression without intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgdRegressor {
    pub coefficients: Vec<f64>,
    pub step: f64,
    pub diverged: bool,
}

impl SgdRegressor {
    pub fn new(features: usize, step: f64) -> Result<Self> {
        if !(step >= 0.0 && step.is_finite()) {
            return Err(invalid(format!("step = {step} must be nonnegative")));
        }
        Ok(Self {
            coefficients: vec![0.0; features],
            step,
            diverged: false,
        })
    }

    /// One gradient step per row of `(x, y)`; the state freezes once divergent.
    pub fn update(&mut self, batch: &[Vec<f64>]) -> Result<()> {
        let f = self.coefficients.len();
        for row in batch {
            if row.len() != f + 1 {
                return Err(Error::DimensionMismatch {
                    expected: f + 1,
                    got: row.len(),
                });
            }
            if self.diverged {
                continue;
            }
            let pred: f64 = self.coefficients.iter().zip(row).map(|(c, x)| c * x).sum();
            let err = pred - row[f];
            for (c, x) in self.coefficients.iter_mut().zip(row) {
                *c -= self.step * 2.0 * err * x;
            }
            let norm = self.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
            if !norm.is_finite() || norm > DIVERGENCE_NORM {
                self.diverged = true;
            }
        }
        Ok(())
    }
}

/// Mean squared residual of coefficients `c` over rows `(x, y)`.
pub fn mean_squared_residual(rows: &[Vec<f64>], c: &[f64]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    let f = c.len();
    rows.iter()
        .map(|r| {
            let pred: f64 = c.iter().zip(r).map(|(a, x)| a * x).sum();
            (pred - r[f]).powi(2)
        })
        .sum::<f64>()
        / rows.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn sketch_accumulates_product() {
        let mut sk = SignSketch::new(4, 6, 2, 3);
        let rows = [[1.0, 2.0], [0.5, -1.0], [3.0, 0.0]];
        for r in &rows {
            sk.absorb(r).unwrap();
        }
        let a = DMatrix::from_fn(3, 2, |i, j| rows[i][j]);
        let want = sk.columns(3) * a;
        assert!((sk.accumulated() - want).amax() < 1e-12);
        assert!(sk.absorb(&[1.0]).is_err());
    }

    #[test]
    fn wide_sketch_recovers_exact_relation() {
        let mut sk = SignSketch::new(40, 10, 3, 1);
        for i in 0..10 {
            let x = [i as f64, (i * i % 7) as f64];
            sk.absorb(&[x[0], x[1], 2.0 * x[0] - 3.0 * x[1]]).unwrap();
        }
        let fit = sk.sketch_regress().unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-8);
        assert!((fit.coefficients[1] + 3.0).abs() < 1e-8);
    }

    #[test]
    fn empty_sketch_gives_zero() {
        let sk = SignSketch::new(3, 5, 3, 0);
        let fit = sk.sketch_regress().unwrap();
        assert!(fit.regularized);
        assert_eq!(fit.coefficients.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn decay_rules() {
        let mut km = DecayKMeans::new(1).unwrap();
        for _ in 0..10 {
            km.update(&vec![vec![3.0, 4.0]; 5], 1.0).unwrap();
        }
        assert_eq!(km.centers, vec![vec![3.0, 4.0]]);

        let mut km = DecayKMeans::new(2).unwrap();
        km.update(&[vec![0.0], vec![10.0]], 1.0).unwrap();
        km.update(&[vec![1.0], vec![3.0], vec![9.0]], 0.0).unwrap();
        assert_eq!(km.centers, vec![vec![2.0], vec![9.0]]);
        km.update(&[], 0.5).unwrap();
        assert_eq!(km.centers, vec![vec![2.0], vec![9.0]]);
        assert!(km.update(&[vec![1.0]], 1.5).is_err());
    }

    #[test]
    fn sgd_converges_and_flags_divergence() {
        let mut sgd = SgdRegressor::new(1, 0.01).unwrap();
        for i in 0..2000 {
            let x = ((i * 37) % 11) as f64 / 5.0 - 1.0;
            sgd.update(&[vec![x, 2.0 * x]]).unwrap();
        }
        assert!((sgd.coefficients[0] - 2.0).abs() < 0.1);
        let still = SgdRegressor::new(1, 0.0).unwrap();
        let mut moved = still.clone();
        moved.update(&[vec![1.0, 5.0]]).unwrap();
        assert_eq!(moved, still);
        let mut wild = SgdRegressor::new(1, 1.0).unwrap();
        wild.update(&vec![vec![30.0, 30.0]; 20]).unwrap();
        assert!(wild.diverged);
    }
}

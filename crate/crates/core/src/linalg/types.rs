use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A finite real vector; one row of a streamed matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RowVector(Vec<f64>);

impl RowVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(x) = entries.iter().find(|x| !x.is_finite()) {
            return Err(invalid(format!("non-finite entry {x} in row")));
        }
        Ok(Self(entries))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    /// Standard basis vector `e_i` scaled by `scale`.
    pub fn basis(dim: usize, i: usize, scale: f64) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = scale;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for RowVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<RowVector> for Vec<f64> {
    fn from(v: RowVector) -> Self {
        v.0
    }
}

impl std::ops::Index<usize> for RowVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Row-major dense matrix with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(invalid(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(invalid("non-finite matrix entry"));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1.0;
        }
        m
    }

    /// Stacks rows; all must share `cols`.
    pub fn from_rows(rows: &[RowVector], cols: usize) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            r.check_dim(cols)?;
            entries.extend_from_slice(r.as_slice());
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        let (rows, cols) = m.shape();
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(m[(i, j)]);
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `Σ_i a_i a_iᵀ` over the rows.
    pub fn gram(&self) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(self.cols, self.cols);
        for i in 0..self.rows {
            let r = self.row(i);
            for (p, &rp) in r.iter().enumerate() {
                if rp == 0.0 {
                    continue;
                }
                for (q, &rq) in r.iter().enumerate() {
                    g[(p, q)] += rp * rq;
                }
            }
        }
        g
    }

    /// `A x` for a column vector `x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// One sampled row with its importance weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedRow {
    pub row: RowVector,
    pub weight: f64,
    pub arrival: usize,
}

impl WeightedRow {
    /// The row as it enters `M`: `weight * row`.
    pub fn scaled(&self) -> Vec<f64> {
        self.row.as_slice().iter().map(|x| x * self.weight).collect()
    }
}

/// Append-only buffer of weighted rows, the `M` handed back to the caller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedRowBuffer {
    dim: usize,
    rows: Vec<WeightedRow>,
}

impl WeightedRowBuffer {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            rows: Vec::new(),
        }
    }

    /// Buffer holding the rows of `a` with unit weights.
    pub fn from_matrix(a: &DenseMatrix) -> Self {
        let mut b = Self::new(a.cols());
        for i in 0..a.rows() {
            b.rows.push(WeightedRow {
                row: RowVector(a.row(i).to_vec()),
                weight: 1.0,
                arrival: i,
            });
        }
        b
    }

    pub fn push(&mut self, row: RowVector, weight: f64, arrival: usize) -> Result<()> {
        row.check_dim(self.dim)?;
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(invalid(format!("weight {weight} must be positive and finite")));
        }
        if let Some(last) = self.rows.last() {
            if arrival <= last.arrival {
                return Err(invalid(format!(
                    "arrival index {arrival} not after {}",
                    last.arrival
                )));
            }
        }
        self.rows.push(WeightedRow {
            row,
            weight,
            arrival,
        });
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[WeightedRow] {
        &self.rows
    }

    /// The weighted matrix `M` with rows `weight * row`.
    pub fn weighted_matrix(&self) -> DenseMatrix {
        let mut entries = Vec::with_capacity(self.rows.len() * self.dim);
        for r in &self.rows {
            entries.extend(r.scaled());
        }
        DenseMatrix {
            rows: self.rows.len(),
            cols: self.dim,
            entries,
        }
    }

    /// `MᵀM`.
    pub fn gram(&self) -> DMatrix<f64> {
        self.weighted_matrix().gram()
    }

    pub fn is_prefix_of(&self, other: &WeightedRowBuffer) -> bool {
        self.dim == other.dim
            && self.rows.len() <= other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| a == b)
    }
}

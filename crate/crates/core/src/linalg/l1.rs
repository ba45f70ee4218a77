use super::simplex::{BoundedLp, LpError};
use super::types::{RowVector, WeightedRowBuffer};
use super::clamp_unit;
use crate::error::{Error, Result};

/// Online L1 sensitivity `max_x |⟨a,x⟩| / (‖Mx‖₁ + |⟨a,x⟩|)` of `a` against
/// the weighted rows of `m`.
///
/// The optimum equals `1 / (1 + β*)` where
/// `β* = max { β : Mᵀv = β·a, ‖v‖_∞ ≤ 1 }` is the dual of
/// `max ⟨a,x⟩ s.t. ‖Mx‖₁ ≤ 1`. The dual has one equality row per column of
/// `M` instead of two inequalities per row, so the tableau stays `d` rows tall.
/// A row outside the span of `m` yields `β* = 0` and sensitivity 1.
pub fn l1_sensitivity(m: &WeightedRowBuffer, a: &RowVector) -> Result<f64> {
    a.check_dim(m.dim())?;
    let d = m.dim();
    if a.as_slice().iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let scaled = m.weighted_matrix();
    let n_rows = scaled.rows();
    if n_rows == 0 {
        return Ok(1.0);
    }
    // Normalize so the tableau entries are O(1).
    let scale = scaled
        .entries()
        .iter()
        .chain(a.as_slice())
        .fold(0.0f64, |acc, x| acc.max(x.abs()));
    let a_norm: Vec<f64> = a.as_slice().iter().map(|x| x / scale).collect();

    let cols = n_rows + 1;
    let mut coeffs = vec![0.0; d * cols];
    for k in 0..d {
        for j in 0..n_rows {
            coeffs[k * cols + j] = scaled.get(j, k) / scale;
        }
        coeffs[k * cols + n_rows] = -a_norm[k];
    }
    let mut c = vec![0.0; cols];
    c[n_rows] = 1.0;
    let mut lower = vec![-1.0; cols];
    lower[n_rows] = 0.0;
    let mut upper = vec![1.0; cols];
    upper[n_rows] = f64::INFINITY;
    let lp = BoundedLp {
        rows: d,
        cols,
        a: coeffs,
        b: vec![0.0; d],
        c,
        lower,
        upper,
    };
    let beta = lp.maximize().map_err(|e| match e {
        LpError::Infeasible => Error::InvariantViolation("sensitivity LP infeasible".into()),
        LpError::Unbounded => Error::InvariantViolation("sensitivity LP unbounded".into()),
        LpError::IterationLimit => {
            Error::InvariantViolation("sensitivity LP hit the iteration limit".into())
        }
    })?;
    clamp_unit(1.0 / (1.0 + beta.objective.max(0.0)), "L1 sensitivity")
}

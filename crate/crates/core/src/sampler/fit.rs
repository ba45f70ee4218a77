use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{DenseMatrix, Eigenpairs, RowVector, SpectralSummary};

/// Regression coefficients recovered from a sampled augmented matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub coefficients: RowVector,
    /// Set when the normal equations were singular and a `1e-10·trace`
    /// ridge was added.
    pub regularized: bool,
}

/// Solves `min_y ‖M[y; −1]‖₂` given `G = MᵀM` of augmented rows `(a, b)`.
pub(crate) fn regress_from_gram(gram: &DMatrix<f64>) -> Result<RegressionFit> {
    let d = gram.nrows();
    if d < 2 {
        return Err(invalid("regression needs at least one feature column"));
    }
    let f = d - 1;
    let gxx = gram.view((0, 0), (f, f)).into_owned();
    let gxb = DVector::from_iterator(f, (0..f).map(|i| gram[(i, f)]));
    solve_normal_equations(gxx, gxb)
}

/// Solves `G x = g`, adding a `1e-10·trace(G)` ridge when `G` is singular.
pub fn solve_normal_equations(gxx: DMatrix<f64>, gxb: DVector<f64>) -> Result<RegressionFit> {
    let f = gxx.nrows();
    let eig = Eigenpairs::of(&gxx);
    if eig.rank() == 0 {
        return Err(invalid("sampled features have rank 0"));
    }
    let full_rank = eig.rank() == f;
    let system = if full_rank {
        gxx
    } else {
        let ridge = 1e-10 * gxx.trace();
        gxx + DMatrix::identity(f, f) * ridge
    };
    let solution = match system.clone().cholesky() {
        Some(ch) => ch.solve(&gxb),
        None => system
            .lu()
            .solve(&gxb)
            .ok_or_else(|| invalid("normal equations are singular"))?,
    };
    Ok(RegressionFit {
        coefficients: RowVector::new(solution.iter().copied().collect())?,
        regularized: !full_rank,
    })
}

/// Rank-`k` orthogonal projection from a Gram matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowRankFit {
    pub projection: DenseMatrix,
    pub rank: usize,
    /// Set when fewer than `k` directions were available.
    pub rank_deficient: bool,
}

/// Projection onto the top-`k` eigenvectors of the summary's Gram matrix.
pub fn top_k_projection(summary: &SpectralSummary, k: usize) -> LowRankFit {
    let eig = summary.eigen();
    let rank = eig.rank().min(k);
    let d = summary.dim();
    let mut p = DMatrix::zeros(d, d);
    for i in 0..rank {
        let v = eig.vectors.column(i);
        p += &v * v.transpose();
    }
    LowRankFit {
        projection: DenseMatrix::from_nalgebra(&p),
        rank,
        rank_deficient: rank < k,
    }
}

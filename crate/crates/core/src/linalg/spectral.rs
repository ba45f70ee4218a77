use std::cell::OnceCell;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::types::{DenseMatrix, RowVector, WeightedRowBuffer};
use crate::error::{invalid, Error, Result};

/// An eigenvalue counts toward the rank iff it is at least this fraction of the
/// largest eigenvalue (or of 1 when the Gram matrix is zero).
pub const RANK_TOLERANCE: f64 = 1e-10;

/// A row is in the span when its residual is at most this fraction of its norm.
pub const SPAN_TOLERANCE: f64 = 1e-8;

/// Eigenpairs of a symmetric matrix, sorted by descending eigenvalue.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: DMatrix<f64>,
}

impl Eigenpairs {
    pub fn of(sym: &DMatrix<f64>) -> Self {
        let eig = SymmetricEigen::new(sym.clone());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let n = sym.nrows();
        let mut vectors = DMatrix::zeros(n, n);
        let mut values = Vec::with_capacity(n);
        for (dst, &src) in order.iter().enumerate() {
            values.push(eig.eigenvalues[src]);
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        Self { values, vectors }
    }

    /// Threshold below which an eigenvalue is treated as zero.
    pub fn rank_threshold(&self) -> f64 {
        let top = self.values.first().copied().unwrap_or(0.0);
        let reference = if top > 0.0 { top } else { 1.0 };
        RANK_TOLERANCE * reference
    }

    pub fn rank(&self) -> usize {
        let thr = self.rank_threshold();
        self.values.iter().take_while(|&&v| v >= thr && v > 0.0).count()
    }
}

/// Result of the span test and online leverage computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leverage {
    pub in_span: bool,
    /// `aᵀG⁺a` clamped to `[0, 1]`; meaningful only when `in_span`.
    pub tau: f64,
    /// `aᵀG⁺a` before clamping.
    pub raw: f64,
}

/// The Gram matrix `MᵀM` of a weighted buffer with a lazily refreshed
/// eigendecomposition.
#[derive(Debug, Clone)]
pub struct SpectralSummary {
    gram: DMatrix<f64>,
    eigen: OnceCell<Eigenpairs>,
}

impl SpectralSummary {
    pub fn new(dim: usize) -> Self {
        Self {
            gram: DMatrix::zeros(dim, dim),
            eigen: OnceCell::new(),
        }
    }

    pub fn from_gram(gram: DMatrix<f64>) -> Result<Self> {
        if !gram.is_square() {
            return Err(invalid("gram matrix must be square"));
        }
        if gram.iter().any(|x| !x.is_finite()) {
            return Err(invalid("non-finite gram entry"));
        }
        let sym = (&gram + gram.transpose()) * 0.5;
        Ok(Self {
            gram: sym,
            eigen: OnceCell::new(),
        })
    }

    pub fn from_buffer(buffer: &WeightedRowBuffer) -> Self {
        Self {
            gram: buffer.gram(),
            eigen: OnceCell::new(),
        }
    }

    pub fn from_matrix(a: &DenseMatrix) -> Self {
        Self {
            gram: a.gram(),
            eigen: OnceCell::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn is_dirty(&self) -> bool {
        self.eigen.get().is_none()
    }

    pub fn eigen(&self) -> &Eigenpairs {
        self.eigen.get_or_init(|| Eigenpairs::of(&self.gram))
    }

    pub fn rank(&self) -> usize {
        self.eigen().rank()
    }

    /// `G ← G + w²·a·aᵀ`. A zero weight is a no-op.
    pub fn gram_update(&mut self, a: &RowVector, w: f64) -> Result<()> {
        a.check_dim(self.dim())?;
        if !(w >= 0.0 && w.is_finite()) {
            return Err(invalid(format!("weight {w} must be nonnegative and finite")));
        }
        if w == 0.0 {
            return Ok(());
        }
        let s = a.as_slice();
        let w2 = w * w;
        for (i, &ai) in s.iter().enumerate() {
            if ai == 0.0 {
                continue;
            }
            for (j, &aj) in s.iter().enumerate() {
                self.gram[(i, j)] += w2 * ai * aj;
            }
        }
        self.eigen = OnceCell::new();
        Ok(())
    }

    fn check_row(&self, a: &RowVector) -> Result<()> {
        a.check_dim(self.dim())
    }

    /// Span test plus `aᵀG⁺a` over the eigenspace above the rank tolerance.
    pub fn leverage_score(&self, a: &RowVector) -> Result<Leverage> {
        self.check_row(a)?;
        let eig = self.eigen();
        let thr = eig.rank_threshold();
        let av = a.to_dvector();
        let norm = av.norm();
        let mut projection = DVector::zeros(self.dim());
        let mut raw = 0.0;
        for (i, &lambda) in eig.values.iter().enumerate() {
            if !(lambda >= thr && lambda > 0.0) {
                break;
            }
            let v = eig.vectors.column(i);
            let c = v.dot(&av);
            projection += v * c;
            raw += c * c / lambda;
        }
        let residual = (&av - projection).norm();
        let in_span = residual <= SPAN_TOLERANCE * norm;
        Ok(Leverage {
            in_span,
            tau: raw.clamp(0.0, 1.0),
            raw,
        })
    }

    /// `aᵀ(G + λI)⁻¹a` before clamping. With `λ = 0` this is the
    /// pseudo-inverse form; the caller owns the span test in that case.
    pub fn ridge_quadratic(&self, a: &RowVector, lambda: f64) -> Result<f64> {
        self.check_row(a)?;
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(invalid(format!("ridge parameter {lambda} must be nonnegative")));
        }
        if lambda == 0.0 {
            return Ok(self.leverage_score(a)?.raw);
        }
        let eig = self.eigen();
        let av = a.to_dvector();
        Ok(eig
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let c = eig.vectors.column(i).dot(&av);
                c * c / (v.max(0.0) + lambda)
            })
            .sum())
    }

    pub fn ridge_leverage_score(&self, a: &RowVector, lambda: f64) -> Result<f64> {
        Ok(self.ridge_quadratic(a, lambda)?.clamp(0.0, 1.0))
    }

    /// Largest over smallest nonzero singular value.
    pub fn condition_number(&self) -> Result<f64> {
        let eig = self.eigen();
        let r = eig.rank();
        if r == 0 {
            return Err(Error::UndefinedCondition);
        }
        Ok((eig.values[0] / eig.values[r - 1]).sqrt().max(1.0))
    }

    /// Smallest nonzero singular value, `None` for the zero matrix.
    pub fn smallest_singular(&self) -> Option<f64> {
        let eig = self.eigen();
        let r = eig.rank();
        (r > 0).then(|| eig.values[r - 1].max(0.0).sqrt())
    }

    pub fn largest_singular(&self) -> f64 {
        self.eigen().values.first().copied().unwrap_or(0.0).max(0.0).sqrt()
    }
}

/// Extreme generalized eigenvalues of `(MᵀM, AᵀA)` on the row space of `A`.
///
/// Returns `None` when `A` is zero.
pub fn generalized_eigen_range(a: &DenseMatrix, m: &WeightedRowBuffer) -> Option<(f64, f64)> {
    let ga = a.gram();
    let gm = m.gram();
    let eig = Eigenpairs::of(&ga);
    let r = eig.rank();
    if r == 0 {
        return None;
    }
    let d = ga.nrows();
    let mut whiten = DMatrix::zeros(d, r);
    for i in 0..r {
        let col = eig.vectors.column(i) / eig.values[i].sqrt();
        whiten.set_column(i, &col);
    }
    let reduced = whiten.transpose() * gm * &whiten;
    let reduced = (&reduced + reduced.transpose()) * 0.5;
    let vals = SymmetricEigen::new(reduced).eigenvalues;
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some((lo, hi))
}

/// Whether `(1−ε)AᵀA ⪯ MᵀM ⪯ (1+ε)AᵀA` on the row space of `A`, to `1e-9`.
pub fn spectral_sandwich_check(a: &DenseMatrix, m: &WeightedRowBuffer, eps: f64) -> bool {
    if a.cols() != m.dim() {
        return false;
    }
    match generalized_eigen_range(a, m) {
        None => true,
        Some((lo, hi)) => lo >= 1.0 - eps - 1e-9 && hi <= 1.0 + eps + 1e-9,
    }
}

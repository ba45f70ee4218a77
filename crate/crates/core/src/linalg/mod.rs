//! Dense linear-algebra kernels shared by the samplers.

mod l1;
mod simplex;
mod spectral;
mod types;

pub use l1::l1_sensitivity;
pub use simplex::{BoundedLp, LpError, LpSolution};
pub use spectral::{
    generalized_eigen_range, spectral_sandwich_check, Eigenpairs, Leverage, SpectralSummary,
    RANK_TOLERANCE, SPAN_TOLERANCE,
};
pub use types::{DenseMatrix, RowVector, WeightedRow, WeightedRowBuffer};

use crate::error::{Error, Result};

/// Clamps a quantity that is mathematically bounded by one.
///
/// Anything past `1 + 1e-6` means the Gram or eigen cache has drifted.
pub(crate) fn clamp_unit(value: f64, what: &str) -> Result<f64> {
    if !value.is_finite() || value > 1.0 + 1e-6 {
        return Err(Error::InvariantViolation(format!(
            "{what} = {value} exceeds 1"
        )));
    }
    Ok(value.clamp(0.0, 1.0))
}

use serde::{Deserialize, Serialize};

use super::{SamplerConfig, SamplerState, SamplerWarning, StreamDiagnostics};
use crate::error::{invalid, Result};
use crate::linalg::{SpectralSummary, WeightedRowBuffer};

pub const CHECKPOINT_VERSION: u32 = 1;

/// Serializable sampler state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerCheckpoint {
    pub version: u32,
    pub config: SamplerConfig,
    pub dim: usize,
    pub buffer: WeightedRowBuffer,
    pub rounds_seen: usize,
    pub rng_cursor: u64,
    pub diagnostics: StreamDiagnostics,
    pub warnings: Vec<SamplerWarning>,
    /// Row-major Gram matrix of the full presented prefix.
    pub prefix_gram: Vec<f64>,
}

impl SamplerState {
    pub fn checkpoint(&self) -> SamplerCheckpoint {
        SamplerCheckpoint {
            version: CHECKPOINT_VERSION,
            config: self.config.clone(),
            dim: self.dim,
            buffer: self.buffer.clone(),
            rounds_seen: self.rounds_seen,
            rng_cursor: self.rng_cursor,
            diagnostics: self.diagnostics.clone(),
            warnings: self.warnings.clone(),
            prefix_gram: self.prefix.gram().as_slice().to_vec(),
        }
    }

    /// Rebuilds a state; the buffer Gram is replayed row by row so it matches
    /// the uninterrupted run bit for bit.
    pub fn restore(cp: SamplerCheckpoint) -> Result<Self> {
        if cp.version != CHECKPOINT_VERSION {
            return Err(invalid(format!(
                "checkpoint version {} (expected {CHECKPOINT_VERSION})",
                cp.version
            )));
        }
        if cp.buffer.dim() != cp.dim || cp.prefix_gram.len() != cp.dim * cp.dim {
            return Err(invalid("checkpoint dimensions disagree"));
        }
        let mut state = SamplerState::new(cp.config, cp.dim)?;
        for r in cp.buffer.rows() {
            state.summary.gram_update(&r.row, r.weight)?;
        }
        state.buffer = cp.buffer;
        state.prefix = SpectralSummary::from_gram(nalgebra::DMatrix::from_column_slice(
            cp.dim,
            cp.dim,
            &cp.prefix_gram,
        ))?;
        state.rounds_seen = cp.rounds_seen;
        state.rng_cursor = cp.rng_cursor;
        state.diagnostics = cp.diagnostics;
        state.warnings = cp.warnings;
        Ok(state)
    }
}

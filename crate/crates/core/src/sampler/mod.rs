//! Online sensitivity row sampling.
//!
//! Each arriving row gets an importance `τ` measured against the rows kept so
//! far; it is kept with probability `min(1, α·τ)` and rescaled by
//! `prob^(−1/p)`. Rows outside the span of the buffer always get `τ = 1`.
//! Every coin is a pure function of `(seed, round)`.

mod checkpoint;
mod fit;

pub use checkpoint::{SamplerCheckpoint, CHECKPOINT_VERSION};
pub use fit::{solve_normal_equations, top_k_projection, LowRankFit, RegressionFit};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{clamp_unit, l1_sensitivity, RowVector, SpectralSummary, WeightedRowBuffer};
use crate::rng::{domain, CounterRng};

/// Default oversampling constant for `p = 2`.
pub const DEFAULT_C_L2: f64 = 40.0;
/// Default oversampling constant for `p = 1`.
pub const DEFAULT_C_L1: f64 = 80.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SamplerMode {
    Embedding,
    /// Online ridge leverage sampling for rank-`k` projections.
    Ridge { k: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub p: u32,
    pub eps: f64,
    pub c: f64,
    pub n_bound: usize,
    pub mode: SamplerMode,
    pub seed: u64,
}

impl SamplerConfig {
    /// Embedding-mode config with the default constant for `p`.
    pub fn new(p: u32, eps: f64, n_bound: usize, seed: u64) -> Self {
        let c = if p == 1 { DEFAULT_C_L1 } else { DEFAULT_C_L2 };
        Self {
            p,
            eps,
            c,
            n_bound,
            mode: SamplerMode::Embedding,
            seed,
        }
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn ridge(mut self, k: usize) -> Self {
        self.mode = SamplerMode::Ridge { k };
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.p != 1 && self.p != 2 {
            return Err(invalid(format!("p = {} must be 1 or 2", self.p)));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(invalid(format!("eps = {} must lie in (0, 1)", self.eps)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(invalid(format!("C = {} must be positive", self.c)));
        }
        if self.n_bound == 0 {
            return Err(invalid("n_bound must be at least 1"));
        }
        if let SamplerMode::Ridge { k } = self.mode {
            if k == 0 {
                return Err(invalid("ridge mode needs k >= 1"));
            }
            if self.p != 2 {
                return Err(invalid("ridge mode requires p = 2"));
            }
        }
        Ok(())
    }

    /// `α = C·d·ln(n)/ε²`, with the logarithm floored at 1 for tiny bounds.
    pub fn alpha(&self, dim: usize) -> f64 {
        let log_n = (self.n_bound as f64).ln().max(1.0);
        self.c * dim as f64 * log_n / (self.eps * self.eps)
    }
}

/// Outcome of one round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleDecision {
    pub round: usize,
    pub in_span: bool,
    pub tau: f64,
    pub prob: f64,
    pub sampled: bool,
    pub weight_applied: Option<f64>,
}

/// Diagnostic emitted instead of aborting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerWarning {
    pub round: usize,
    pub message: String,
}

/// Running statistics of the presented stream, used for reporting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamDiagnostics {
    /// Largest condition number over all prefixes seen so far.
    pub kappa_running: f64,
    /// Smallest nonzero singular value over all prefixes seen so far.
    pub sigma_min_running: f64,
    /// Largest singular value of the current prefix.
    pub sigma_max: f64,
    pub tau_sum: f64,
    pub prob_sum: f64,
    /// Entrywise L1 mass of the first nonzero prefix and of the current one.
    pub l1_mass_first: f64,
    pub l1_mass: f64,
}

impl StreamDiagnostics {
    fn new() -> Self {
        Self {
            kappa_running: 1.0,
            sigma_min_running: f64::INFINITY,
            sigma_max: 0.0,
            tau_sum: 0.0,
            prob_sum: 0.0,
            l1_mass_first: 0.0,
            l1_mass: 0.0,
        }
    }

    /// Online condition number: top singular value of the stream over the
    /// smallest nonzero singular value any prefix ever had.
    pub fn kappa_online(&self) -> f64 {
        if self.sigma_min_running.is_finite() && self.sigma_min_running > 0.0 {
            (self.sigma_max / self.sigma_min_running).max(1.0)
        } else {
            1.0
        }
    }

    /// Ratio between the largest and smallest prefix L1 mass.
    pub fn l1_ratio(&self) -> f64 {
        if self.l1_mass_first > 0.0 {
            self.l1_mass / self.l1_mass_first
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone)]
pub struct SamplerState {
    config: SamplerConfig,
    dim: usize,
    alpha: f64,
    buffer: WeightedRowBuffer,
    summary: SpectralSummary,
    prefix: SpectralSummary,
    rounds_seen: usize,
    rng_cursor: u64,
    coins: CounterRng,
    diagnostics: StreamDiagnostics,
    warnings: Vec<SamplerWarning>,
}

impl SamplerState {
    pub fn new(config: SamplerConfig, dim: usize) -> Result<Self> {
        config.validate()?;
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        Ok(Self {
            alpha: config.alpha(dim),
            coins: CounterRng::new(config.seed, domain::ROW_SAMPLER),
            config,
            dim,
            buffer: WeightedRowBuffer::new(dim),
            summary: SpectralSummary::new(dim),
            prefix: SpectralSummary::new(dim),
            rounds_seen: 0,
            rng_cursor: 0,
            diagnostics: StreamDiagnostics::new(),
            warnings: Vec::new(),
        })
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rounds_seen(&self) -> usize {
        self.rounds_seen
    }

    pub fn rng_cursor(&self) -> u64 {
        self.rng_cursor
    }

    pub fn summary(&self) -> &SpectralSummary {
        &self.summary
    }

    pub fn diagnostics(&self) -> &StreamDiagnostics {
        &self.diagnostics
    }

    pub fn warnings(&self) -> &[SamplerWarning] {
        &self.warnings
    }

    pub fn sample_count(&self) -> usize {
        self.buffer.len()
    }

    /// Snapshot of the weighted rows kept so far.
    pub fn current_embedding(&self) -> WeightedRowBuffer {
        self.buffer.clone()
    }

    pub fn buffer(&self) -> &WeightedRowBuffer {
        &self.buffer
    }

    /// Ridge parameter `Σ_{j>k} σ_j²(M) / k` from the buffer's spectrum.
    pub fn ridge_lambda(&self, k: usize) -> f64 {
        let tail: f64 = self.summary.eigen().values.iter().skip(k).map(|v| v.max(0.0)).sum();
        tail / k as f64
    }

    /// Importance of `a` against the current buffer, before the `min(1, ·)`.
    fn importance(&self, a: &RowVector) -> Result<(bool, f64)> {
        let lev = self.summary.leverage_score(a)?;
        if let SamplerMode::Ridge { k } = self.config.mode {
            let lambda = self.ridge_lambda(k);
            if lambda > 0.0 {
                let q = self.summary.ridge_quadratic(a, lambda)?;
                let ratio = clamp_unit(q / (1.0 + q), "ridge sensitivity")?;
                return Ok((lev.in_span, (2.0 * ratio).min(1.0)));
            }
        }
        if !lev.in_span {
            return Ok((false, 1.0));
        }
        let ratio = match self.config.p {
            1 => l1_sensitivity(&self.buffer, a)?,
            _ => clamp_unit(lev.raw / (1.0 + lev.raw), "online leverage")?,
        };
        Ok((true, (2.0 * ratio).min(1.0)))
    }

    /// Processes one streamed row.
    pub fn process_row(&mut self, a: &RowVector) -> Result<SampleDecision> {
        a.check_dim(self.dim)?;
        if self.rounds_seen >= self.config.n_bound {
            return Err(Error::StreamBoundExceeded {
                bound: self.config.n_bound,
            });
        }
        let round = self.rounds_seen;
        let (in_span, tau) = self.importance(a)?;
        let prob = (self.alpha * tau).min(1.0);
        let sampled = if prob >= 1.0 {
            true
        } else if prob <= 0.0 {
            false
        } else {
            self.rng_cursor += 1;
            self.coins.uniform(round as u64) < prob
        };
        let weight_applied = if sampled {
            let w = prob.powf(-1.0 / self.config.p as f64);
            self.buffer.push(a.clone(), w, round)?;
            self.summary.gram_update(a, w)?;
            Some(w)
        } else {
            None
        };

        self.track_prefix(a, round)?;
        self.diagnostics.tau_sum += tau;
        self.diagnostics.prob_sum += prob;
        self.rounds_seen += 1;
        Ok(SampleDecision {
            round,
            in_span,
            tau,
            prob,
            sampled,
            weight_applied,
        })
    }

    fn track_prefix(&mut self, a: &RowVector, round: usize) -> Result<()> {
        self.prefix.gram_update(a, 1.0)?;
        let diag = &mut self.diagnostics;
        diag.l1_mass += a.as_slice().iter().map(|x| x.abs()).sum::<f64>();
        if diag.l1_mass_first == 0.0 {
            diag.l1_mass_first = diag.l1_mass;
        }
        if let Ok(kappa) = self.prefix.condition_number() {
            diag.kappa_running = diag.kappa_running.max(kappa);
            if let Some(s) = self.prefix.smallest_singular() {
                diag.sigma_min_running = diag.sigma_min_running.min(s);
            }
            diag.sigma_max = self.prefix.largest_singular();
        }
        let bound = diag.kappa_running.powi(self.config.p as i32);
        if self.config.c < bound && self.warnings.is_empty() {
            self.warnings.push(SamplerWarning {
                round,
                message: format!(
                    "oversampling constant C = {} is below kappa^p = {bound:.6}",
                    self.config.c
                ),
            });
        }
        Ok(())
    }

    /// Least-squares coefficients from a buffer of augmented rows `(a_i, b_i)`.
    pub fn regress(&self) -> Result<RegressionFit> {
        if self.config.p != 2 || self.config.mode != SamplerMode::Embedding {
            return Err(invalid("regression needs a p = 2 embedding-mode sampler"));
        }
        fit::regress_from_gram(self.summary.gram())
    }

    /// Rank-`k` projection onto the top right singular space of the buffer.
    pub fn low_rank(&self) -> Result<LowRankFit> {
        let SamplerMode::Ridge { k } = self.config.mode else {
            return Err(invalid("low-rank projection needs a ridge-mode sampler"));
        };
        Ok(top_k_projection(&self.summary, k))
    }
}

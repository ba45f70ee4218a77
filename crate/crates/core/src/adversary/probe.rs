use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::game::{AdversaryStrategy, StreamingAlgorithm};
use crate::error::{invalid, Result};
use crate::linalg::{Eigenpairs, RowVector, WeightedRowBuffer};
use crate::rng::{domain, CounterRng};
use crate::sampler::{SampleDecision, SamplerConfig, SamplerState};

/// What the row sampler reveals after each row: its decision and the embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingResponse {
    pub decision: SampleDecision,
    pub embedding: WeightedRowBuffer,
}

/// The row sampler as a game participant.
#[derive(Debug, Clone)]
pub struct SamplerAlgorithm {
    state: SamplerState,
}

impl SamplerAlgorithm {
    pub fn new(config: SamplerConfig, dim: usize) -> Result<Self> {
        Ok(Self {
            state: SamplerState::new(config, dim)?,
        })
    }

    pub fn state(&self) -> &SamplerState {
        &self.state
    }
}

impl StreamingAlgorithm for SamplerAlgorithm {
    type Update = RowVector;
    type Response = EmbeddingResponse;

    fn seed(&self) -> u64 {
        self.state.config().seed
    }

    fn update(&mut self, row: &RowVector) -> Result<EmbeddingResponse> {
        let decision = self.state.process_row(row)?;
        Ok(EmbeddingResponse {
            decision,
            embedding: self.state.current_embedding(),
        })
    }
}

/// Submits a unit row outside the span of the last reported embedding; once
/// the span is full, a jittered copy of its weakest direction.
#[derive(Debug, Clone)]
pub struct OrthogonalProbe {
    d: usize,
    seed: u64,
    round: u64,
}

/// Relative size of the random jitter added once the span is full.
pub const PROBE_JITTER: f64 = 0.1;

pub fn orthogonal_probe_adversary(d: usize, seed: u64) -> Result<OrthogonalProbe> {
    if d == 0 {
        return Err(invalid("probe dimension must be positive"));
    }
    Ok(OrthogonalProbe { d, seed, round: 0 })
}

impl OrthogonalProbe {
    fn probe(&self, embedding: Option<&WeightedRowBuffer>) -> Result<Vec<f64>> {
        let d = self.d;
        let gram = match embedding {
            Some(m) if m.dim() == d => m.gram(),
            Some(m) => {
                return Err(invalid(format!(
                    "embedding of dimension {} for a probe of dimension {d}",
                    m.dim()
                )))
            }
            None => nalgebra::DMatrix::zeros(d, d),
        };
        let eig = Eigenpairs::of(&gram);
        let r = eig.rank();
        if r < d {
            for i in 0..d {
                let mut v = DVector::zeros(d);
                v[i] = 1.0;
                for j in 0..r {
                    let u = eig.vectors.column(j);
                    let c = u.dot(&v);
                    v -= u * c;
                }
                let n = v.norm();
                if n > 1e-6 {
                    return Ok((v / n).iter().copied().collect());
                }
            }
        }
        let weakest = eig.vectors.column(d - 1).into_owned();
        let mut rng = CounterRng::new(self.seed, domain::ADVERSARY).stream(self.round);
        let jitter = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let v = weakest + jitter * PROBE_JITTER;
        let n = v.norm();
        Ok((v / n).iter().copied().collect())
    }
}

impl AdversaryStrategy<RowVector, EmbeddingResponse> for OrthogonalProbe {
    fn seed(&self) -> u64 {
        self.seed
    }

    fn next(&mut self, history: &[EmbeddingResponse]) -> Result<RowVector> {
        let v = self.probe(history.last().map(|r| &r.embedding))?;
        self.round += 1;
        RowVector::new(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::game::run_game;
    use std::collections::BTreeMap;

    #[test]
    fn first_probes_are_orthogonal_and_certain() {
        let cfg = SamplerConfig::new(2, 0.5, 100, 1);
        let mut alg = SamplerAlgorithm::new(cfg, 3).unwrap();
        let mut adv = orthogonal_probe_adversary(3, 2).unwrap();
        let out = run_game(&mut alg, &mut adv, 6, |_, _, _| BTreeMap::new()).unwrap();
        let rows: Vec<Vec<f64>> = out.responses[2]
            .embedding
            .rows()
            .iter()
            .map(|r| r.row.as_slice().to_vec())
            .collect();
        for i in 0..3 {
            for j in 0..i {
                let dot: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
                assert!(dot.abs() < 1e-12);
            }
        }
        for r in &out.responses[..3] {
            assert_eq!(r.decision.prob, 1.0);
            assert!(!r.decision.in_span);
        }
        for r in &out.responses[3..] {
            assert!(r.decision.in_span);
        }
    }

    #[test]
    fn probe_is_deterministic() {
        let play = || {
            let cfg = SamplerConfig::new(2, 0.5, 100, 4).with_c(0.05);
            let mut alg = SamplerAlgorithm::new(cfg, 4).unwrap();
            let mut adv = orthogonal_probe_adversary(4, 8).unwrap();
            run_game(&mut alg, &mut adv, 40, |_, _, _| BTreeMap::new())
                .unwrap()
                .transcript
        };
        assert_eq!(play(), play());
        assert!(orthogonal_probe_adversary(0, 0).is_err());
    }
}

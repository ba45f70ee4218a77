use rand_chacha::ChaCha8Rng;

use super::{offline_coreset, ClusteringConfig, WeightedPoint};
use crate::error::{invalid, Error, Result};
use crate::rng::{domain, CounterRng};

/// Offline reduce step plugged into the tree.
pub trait Reducer {
    fn reduce(
        &self,
        points: Vec<WeightedPoint>,
        cfg: &ClusteringConfig,
        eps_level: f64,
        rng: &mut ChaCha8Rng,
    ) -> Vec<WeightedPoint>;
}

/// Sensitivity-sampling reduce.
#[derive(Debug, Clone, Copy, Default)]
pub struct SensitivityReducer;

impl Reducer for SensitivityReducer {
    fn reduce(
        &self,
        points: Vec<WeightedPoint>,
        cfg: &ClusteringConfig,
        eps_level: f64,
        rng: &mut ChaCha8Rng,
    ) -> Vec<WeightedPoint> {
        offline_coreset(&points, cfg, eps_level, rng)
    }
}

/// Lossless reduce that keeps every point; the tree then reproduces the prefix.
#[derive(Debug, Clone, Copy, Default)]
pub struct Passthrough;

impl Reducer for Passthrough {
    fn reduce(
        &self,
        points: Vec<WeightedPoint>,
        _: &ClusteringConfig,
        _: f64,
        _: &mut ChaCha8Rng,
    ) -> Vec<WeightedPoint> {
        points
    }
}

/// Binary-counter hierarchy of coresets over dyadic blocks of the stream.
///
/// Slot `i` of `levels` holds the (at most one) pending buffer of level
/// `i + 1`; a full leaf enters level 1 and two buffers on one level are merged
/// and reduced into the next.
#[derive(Debug, Clone)]
pub struct CoresetTree<R: Reducer = SensitivityReducer> {
    config: ClusteringConfig,
    reducer: R,
    levels: Vec<Option<Vec<WeightedPoint>>>,
    pending: Vec<WeightedPoint>,
    dim: Option<usize>,
    points_seen: usize,
    reduces: u64,
    coins: CounterRng,
    peak_stored: usize,
}

impl CoresetTree<SensitivityReducer> {
    pub fn new(config: ClusteringConfig) -> Result<Self> {
        Self::with_reducer(config, SensitivityReducer)
    }
}

impl<R: Reducer> CoresetTree<R> {
    pub fn with_reducer(config: ClusteringConfig, reducer: R) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            coins: CounterRng::new(config.seed, domain::CORESET),
            config,
            reducer,
            levels: Vec::new(),
            pending: Vec::new(),
            dim: None,
            points_seen: 0,
            reduces: 0,
            peak_stored: 0,
        })
    }

    pub fn config(&self) -> &ClusteringConfig {
        &self.config
    }

    pub fn points_seen(&self) -> usize {
        self.points_seen
    }

    pub fn max_levels(&self) -> usize {
        self.config.max_levels()
    }

    /// Largest number of points held at the end of any insert so far.
    pub fn peak_stored(&self) -> usize {
        self.peak_stored
    }

    pub fn stored(&self) -> usize {
        self.pending.len() + self.levels.iter().flatten().map(Vec::len).sum::<usize>()
    }

    /// Levels (1-based) that currently hold a buffer.
    pub fn occupied_levels(&self) -> Vec<usize> {
        self.levels
            .iter()
            .enumerate()
            .filter_map(|(i, l)| l.as_ref().map(|_| i + 1))
            .collect()
    }

    pub fn level_buffer(&self, level: usize) -> Option<&[WeightedPoint]> {
        level
            .checked_sub(1)
            .and_then(|i| self.levels.get(i))
            .and_then(|l| l.as_deref())
    }

    pub fn pending_leaf(&self) -> &[WeightedPoint] {
        &self.pending
    }

    fn reduce(&mut self, points: Vec<WeightedPoint>) -> Vec<WeightedPoint> {
        // every reduce draws from its own fresh stream
        let mut rng = self.coins.stream(self.reduces);
        self.reduces += 1;
        self.reducer
            .reduce(points, &self.config, self.config.eps_level(), &mut rng)
    }

    pub fn insert(&mut self, pt: WeightedPoint) -> Result<()> {
        match self.dim {
            None => self.dim = Some(pt.dim()),
            Some(d) if d != pt.dim() => {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: pt.dim(),
                })
            }
            _ => {}
        }
        if !(pt.weight > 0.0) {
            return Err(invalid("point weight must be positive"));
        }
        self.pending.push(pt);
        self.points_seen += 1;
        if self.pending.len() >= self.config.leaf_size {
            let leaf = std::mem::take(&mut self.pending);
            let mut carry = self.reduce(leaf);
            let mut level = 0;
            loop {
                if self.levels.len() <= level {
                    self.levels.push(None);
                }
                match self.levels[level].take() {
                    None => {
                        self.levels[level] = Some(carry);
                        break;
                    }
                    Some(mut other) => {
                        other.extend(carry);
                        carry = self.reduce(other);
                        level += 1;
                    }
                }
            }
        }
        self.peak_stored = self.peak_stored.max(self.stored());
        Ok(())
    }

    /// Union of all live level buffers and the pending leaf.
    pub fn query(&self) -> Vec<WeightedPoint> {
        let mut out = Vec::with_capacity(self.stored());
        for buf in self.levels.iter().rev().flatten() {
            out.extend(buf.iter().cloned());
        }
        out.extend(self.pending.iter().cloned());
        out
    }
}

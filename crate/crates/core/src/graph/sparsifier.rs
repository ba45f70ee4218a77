use serde::{Deserialize, Serialize};

use super::connectivity::pair_connectivity;
use super::{DenseGraph, Edge, WeightedGraph};
use crate::error::{invalid, Error, Result};
use crate::rng::{domain, CounterRng};

pub const DEFAULT_C: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsifierConfig {
    pub n: usize,
    pub m_bound: usize,
    pub eps: f64,
    pub c: f64,
    pub seed: u64,
}

impl SparsifierConfig {
    pub fn new(n: usize, m_bound: usize, eps: f64, seed: u64) -> Self {
        Self {
            n,
            m_bound,
            eps,
            c: DEFAULT_C,
            seed,
        }
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(invalid(format!("n = {} needs at least 2 vertices", self.n)));
        }
        if self.m_bound == 0 {
            return Err(invalid("m_bound must be positive"));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(invalid(format!("eps = {} outside (0, 1)", self.eps)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(invalid(format!("C = {} must be positive", self.c)));
        }
        Ok(())
    }

    /// Oversampling threshold `C (ln n + ln m) / eps^2`.
    pub fn rho(&self) -> f64 {
        self.c * ((self.n as f64).ln() + (self.m_bound as f64).ln()) / (self.eps * self.eps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeptEdge {
    pub edge: Edge,
    pub prob: f64,
}

impl KeptEdge {
    pub fn weight(&self) -> f64 {
        self.edge.w / self.prob
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDecision {
    pub index: usize,
    /// `None` when the degree bound already forced `prob = 1`.
    pub connectivity: Option<f64>,
    pub prob: f64,
    pub kept: bool,
}

/// Streaming cut sparsifier.
#[derive(Debug, Clone)]
pub struct SparsifierState {
    config: SparsifierConfig,
    rho: f64,
    kept: Vec<KeptEdge>,
    adjacency: DenseGraph,
    degree: Vec<f64>,
    edges_seen: usize,
    rng_cursor: u64,
    coins: CounterRng,
}

impl SparsifierState {
    pub fn new(config: SparsifierConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            rho: config.rho(),
            kept: Vec::new(),
            adjacency: DenseGraph::new(config.n),
            degree: vec![0.0; config.n],
            edges_seen: 0,
            rng_cursor: 0,
            coins: CounterRng::new(config.seed, domain::SPARSIFIER),
            config,
        })
    }

    pub fn config(&self) -> &SparsifierConfig {
        &self.config
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn kept(&self) -> &[KeptEdge] {
        &self.kept
    }

    pub fn edges_seen(&self) -> usize {
        self.edges_seen
    }

    pub fn rng_cursor(&self) -> u64 {
        self.rng_cursor
    }

    /// The current sparsifier with reweighted edges.
    pub fn sparsifier(&self) -> WeightedGraph {
        WeightedGraph {
            n: self.config.n,
            edges: self
                .kept
                .iter()
                .map(|k| Edge {
                    u: k.edge.u,
                    v: k.edge.v,
                    w: k.weight(),
                })
                .collect(),
        }
    }

    /// Edge budget `rho * kappa^2 * n` for a graph whose cut sizes span a ratio `kappa`.
    pub fn edge_budget(&self, kappa: f64) -> f64 {
        self.rho * kappa * kappa * self.config.n as f64
    }

    pub fn process_edge(&mut self, e: Edge) -> Result<EdgeDecision> {
        let n = self.config.n;
        if e.u >= n || e.v >= n {
            return Err(invalid(format!("edge ({}, {}) outside 0..{n}", e.u, e.v)));
        }
        let e = Edge::new(e.u, e.v, e.w)?;
        if self.edges_seen >= self.config.m_bound {
            return Err(Error::StreamBoundExceeded {
                bound: self.config.m_bound,
            });
        }
        let index = self.edges_seen;
        let degree_bound = (self.degree[e.u] + e.w).min(self.degree[e.v] + e.w);
        let (connectivity, prob) = if degree_bound <= self.rho {
            (None, 1.0)
        } else {
            self.adjacency.add(e.u, e.v, e.w);
            let c = pair_connectivity(&self.adjacency, e.u, e.v);
            self.adjacency.add(e.u, e.v, -e.w);
            (Some(c), (self.rho / c).min(1.0))
        };
        let kept = if prob >= 1.0 {
            true
        } else {
            self.rng_cursor += 1;
            self.coins.uniform(index as u64) < prob
        };
        if kept {
            let k = KeptEdge { edge: e, prob };
            let w = k.weight();
            self.adjacency.add(e.u, e.v, w);
            self.degree[e.u] += w;
            self.degree[e.v] += w;
            self.kept.push(k);
        }
        self.edges_seen += 1;
        Ok(EdgeDecision {
            index,
            connectivity,
            prob,
            kept,
        })
    }
}

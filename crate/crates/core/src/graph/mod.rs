//! Cut sparsification by strong-connectivity sampling.

mod check;
mod connectivity;
mod mincut;
mod sparsifier;

pub use check::{sparsifier_check, CutReport, CutViolation, EXHAUSTIVE_LIMIT};
pub use connectivity::{edge_connectivities, strong_connectivity};
pub use mincut::{global_min_cut, MinCut};
pub use sparsifier::{EdgeDecision, KeptEdge, SparsifierConfig, SparsifierState, DEFAULT_C};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    pub fn new(u: usize, v: usize, w: f64) -> Result<Self> {
        if u == v {
            return Err(invalid(format!("self-loop at vertex {u}")));
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(invalid(format!("edge weight {w} must be positive")));
        }
        Ok(Self { u, v, w })
    }

    pub fn unit(u: usize, v: usize) -> Result<Self> {
        Self::new(u, v, 1.0)
    }
}

/// Weighted multigraph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    pub n: usize,
    pub edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        for e in &edges {
            if e.u >= n || e.v >= n {
                return Err(invalid(format!("edge ({}, {}) outside 0..{n}", e.u, e.v)));
            }
        }
        Ok(Self { n, edges })
    }

    pub fn complete(n: usize, w: f64) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push(Edge { u, v, w });
            }
        }
        Self { n, edges }
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    /// Dense symmetric weight matrix with parallel edges summed.
    pub(crate) fn dense(&self) -> DenseGraph {
        let mut g = DenseGraph::new(self.n);
        for e in &self.edges {
            g.add(e.u, e.v, e.w);
        }
        g
    }
}

/// A proper nonempty subset of the vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutQuery {
    in_side: Vec<bool>,
}

impl CutQuery {
    pub fn new(n: usize, side: &[usize]) -> Result<Self> {
        let mut in_side = vec![false; n];
        for &x in side {
            if x >= n {
                return Err(invalid(format!("cut vertex {x} outside 0..{n}")));
            }
            in_side[x] = true;
        }
        let count = in_side.iter().filter(|&&b| b).count();
        if count == 0 || count == n {
            return Err(invalid("cut side must be a proper nonempty subset"));
        }
        Ok(Self { in_side })
    }

    pub fn contains(&self, x: usize) -> bool {
        self.in_side[x]
    }

    pub fn side(&self) -> Vec<usize> {
        (0..self.in_side.len()).filter(|&x| self.in_side[x]).collect()
    }
}

/// Total weight of edges with exactly one endpoint in the side.
pub fn cut_value(g: &WeightedGraph, q: &CutQuery) -> Result<f64> {
    if q.in_side.len() != g.n {
        return Err(invalid(format!(
            "cut over {} vertices for a graph on {}",
            q.in_side.len(),
            g.n
        )));
    }
    Ok(g.edges
        .iter()
        .filter(|e| q.contains(e.u) != q.contains(e.v))
        .map(|e| e.w)
        .sum())
}

/// Dense symmetric adjacency used by the cut and connectivity routines.
#[derive(Debug, Clone)]
pub(crate) struct DenseGraph {
    pub n: usize,
    pub w: Vec<f64>,
}

impl DenseGraph {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            w: vec![0.0; n * n],
        }
    }

    #[inline]
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.w[u * self.n + v]
    }

    pub fn add(&mut self, u: usize, v: usize, w: f64) {
        self.w[u * self.n + v] += w;
        self.w[v * self.n + u] += w;
    }

    /// Connected components of the subgraph induced by `verts`, each sorted.
    pub fn components(&self, verts: &[usize]) -> Vec<Vec<usize>> {
        let mut member = vec![false; self.n];
        for &v in verts {
            member[v] = true;
        }
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for &s in verts {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let x = comp[i];
                i += 1;
                for &y in verts {
                    if !seen[y] && member[y] && self.weight(x, y) > 0.0 {
                        seen[y] = true;
                        comp.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> WeightedGraph {
        WeightedGraph::new(
            3,
            vec![
                Edge::unit(0, 1).unwrap(),
                Edge::unit(1, 2).unwrap(),
                Edge::unit(0, 2).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn cut_examples() {
        let t = triangle();
        assert_eq!(cut_value(&t, &CutQuery::new(3, &[0]).unwrap()).unwrap(), 2.0);
        let empty = WeightedGraph::new(4, vec![]).unwrap();
        assert_eq!(cut_value(&empty, &CutQuery::new(4, &[1, 3]).unwrap()).unwrap(), 0.0);
        let k4 = WeightedGraph::complete(4, 1.0);
        assert_eq!(cut_value(&k4, &CutQuery::new(4, &[0, 2]).unwrap()).unwrap(), 4.0);
    }

    #[test]
    fn invalid_inputs() {
        assert!(Edge::unit(2, 2).is_err());
        assert!(Edge::new(0, 1, 0.0).is_err());
        assert!(CutQuery::new(3, &[]).is_err());
        assert!(CutQuery::new(3, &[0, 1, 2]).is_err());
        assert!(CutQuery::new(3, &[5]).is_err());
        assert!(WeightedGraph::new(2, vec![Edge::unit(0, 2).unwrap()]).is_err());
        let q = CutQuery::new(4, &[0]).unwrap();
        assert!(cut_value(&triangle(), &q).is_err());
    }
}

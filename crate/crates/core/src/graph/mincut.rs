use serde::{Deserialize, Serialize};

use super::{DenseGraph, WeightedGraph};
use crate::error::{invalid, Result};

/// A minimum cut: its value and the canonical side (the one holding the lowest vertex).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinCut {
    pub value: f64,
    pub side: Vec<usize>,
}

/// Exact global minimum cut over all `n` vertices.
///
/// A disconnected graph yields value 0 with the component of the lowest vertex as witness.
pub fn global_min_cut(g: &WeightedGraph) -> Result<MinCut> {
    if g.n < 2 {
        return Err(invalid("minimum cut needs at least 2 vertices"));
    }
    let dense = g.dense();
    let verts: Vec<usize> = (0..g.n).collect();
    Ok(min_cut_of(&dense, &verts))
}

/// Minimum cut of the subgraph induced by `verts` (sorted, at least 2 entries).
pub(crate) fn min_cut_of(g: &DenseGraph, verts: &[usize]) -> MinCut {
    let comps = g.components(verts);
    if comps.len() > 1 {
        let first = comps.into_iter().find(|c| c[0] == verts[0]).unwrap_or_default();
        return MinCut {
            value: 0.0,
            side: first,
        };
    }
    stoer_wagner(g, verts)
}

fn canonical(side: &[usize], verts: &[usize]) -> Vec<usize> {
    let mut s = side.to_vec();
    s.sort_unstable();
    if s.first() == Some(&verts[0]) {
        return s;
    }
    verts.iter().copied().filter(|v| s.binary_search(v).is_err()).collect()
}

fn stoer_wagner(g: &DenseGraph, verts: &[usize]) -> MinCut {
    let k = verts.len();
    let mut w = vec![0.0; k * k];
    for (i, &a) in verts.iter().enumerate() {
        for (j, &b) in verts.iter().enumerate() {
            w[i * k + j] = g.weight(a, b);
        }
    }
    let mut groups: Vec<Vec<usize>> = verts.iter().map(|&v| vec![v]).collect();
    let mut active: Vec<usize> = (0..k).collect();
    let mut best: Option<MinCut> = None;
    let mut key = vec![0.0; k];
    let mut added = vec![false; k];

    while active.len() > 1 {
        for &a in &active {
            key[a] = 0.0;
            added[a] = false;
        }
        let mut prev = active[0];
        let mut last = active[0];
        for step in 0..active.len() {
            let mut pick = usize::MAX;
            for &a in &active {
                if !added[a] && (pick == usize::MAX || key[a] > key[pick]) {
                    pick = a;
                }
            }
            added[pick] = true;
            if step + 1 == active.len() {
                prev = last;
                last = pick;
                break;
            }
            last = pick;
            for &a in &active {
                if !added[a] {
                    key[a] += w[pick * k + a];
                }
            }
        }
        let value = key[last];
        let side = canonical(&groups[last], verts);
        let better = match &best {
            None => true,
            Some(b) => {
                let tol = 1e-12 * b.value.abs().max(value.abs());
                value < b.value - tol || (value <= b.value + tol && side < b.side)
            }
        };
        if better {
            best = Some(MinCut { value, side });
        }
        let moved = std::mem::take(&mut groups[last]);
        groups[prev].extend(moved);
        for &a in &active {
            if a != prev && a != last {
                w[prev * k + a] += w[last * k + a];
                w[a * k + prev] = w[prev * k + a];
            }
        }
        active.retain(|&a| a != last);
    }
    best.expect("at least one phase runs")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> WeightedGraph {
        WeightedGraph::new(
            n,
            edges.iter().map(|&(u, v, w)| Edge::new(u, v, w).unwrap()).collect(),
        )
        .unwrap()
    }

    fn brute(g: &WeightedGraph) -> f64 {
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << (g.n - 1)) {
            let c: f64 = g
                .edges
                .iter()
                .filter(|e| (mask >> e.u & 1) != (mask >> e.v & 1))
                .map(|e| e.w)
                .sum();
            best = best.min(c);
        }
        best
    }

    #[test]
    fn single_edge() {
        let c = global_min_cut(&graph(2, &[(0, 1, 3.0)])).unwrap();
        assert_eq!(c.value, 3.0);
        assert_eq!(c.side, vec![0]);
    }

    #[test]
    fn triangle_singleton() {
        let c = global_min_cut(&graph(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])).unwrap();
        assert_eq!(c.value, 2.0);
        assert_eq!(c.side, vec![0]);
    }

    #[test]
    fn two_k4_bridge() {
        let mut e = Vec::new();
        for base in [0, 4] {
            for a in 0..4 {
                for b in a + 1..4 {
                    e.push((base + a, base + b, 1.0));
                }
            }
        }
        e.push((3, 4, 1.0));
        let c = global_min_cut(&graph(8, &e)).unwrap();
        assert_eq!(c.value, 1.0);
        assert_eq!(c.side, vec![0, 1, 2, 3]);
    }

    #[test]
    fn disconnected_is_zero() {
        let c = global_min_cut(&graph(4, &[(0, 1, 2.0), (2, 3, 1.0)])).unwrap();
        assert_eq!(c.value, 0.0);
        assert_eq!(c.side, vec![0, 1]);
        assert!(global_min_cut(&graph(1, &[])).is_err());
    }

    #[test]
    fn parallel_edges_merge() {
        let c = global_min_cut(&graph(2, &[(0, 1, 1.0), (1, 0, 2.5)])).unwrap();
        assert_eq!(c.value, 3.5);
    }

    #[test]
    fn agrees_with_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.random_range(2..9);
            let mut e = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.random_bool(0.5) {
                        e.push((u, v, rng.random_range(1..5) as f64));
                    }
                }
            }
            let g = graph(n, &e);
            let c = global_min_cut(&g).unwrap();
            assert!((c.value - brute(&g)).abs() < 1e-9);
            let q = crate::graph::CutQuery::new(n, &c.side).unwrap();
            assert!((crate::graph::cut_value(&g, &q).unwrap() - c.value).abs() < 1e-9);
        }
    }
}

use super::mincut::min_cut_of;
use super::{DenseGraph, WeightedGraph};
use crate::error::{invalid, Result};

/// Strong connectivity of the pair `(u, v)` in `g`: the largest `k` such that some
/// subgraph whose every cut is at least `k` contains both endpoints.
pub fn strong_connectivity(g: &WeightedGraph, u: usize, v: usize) -> Result<f64> {
    if u >= g.n || v >= g.n {
        return Err(invalid(format!("endpoint outside 0..{}", g.n)));
    }
    if u == v {
        return Err(invalid(format!("self-loop at vertex {u}")));
    }
    Ok(pair_connectivity(&g.dense(), u, v))
}

pub(crate) fn pair_connectivity(g: &DenseGraph, u: usize, v: usize) -> f64 {
    let all: Vec<usize> = (0..g.n).collect();
    let mut best = 0.0f64;
    let mut verts = match component_with(g, &all, u, v) {
        Some(c) => c,
        None => return 0.0,
    };
    loop {
        if verts.len() == 2 {
            return best.max(g.weight(u, v));
        }
        let cut = min_cut_of(g, &verts);
        best = best.max(cut.value);
        let u_in = cut.side.binary_search(&u).is_ok();
        let v_in = cut.side.binary_search(&v).is_ok();
        if u_in != v_in {
            return best;
        }
        let part: Vec<usize> = if u_in {
            cut.side
        } else {
            verts
                .iter()
                .copied()
                .filter(|x| cut.side.binary_search(x).is_err())
                .collect()
        };
        verts = match component_with(g, &part, u, v) {
            Some(c) => c,
            None => return best,
        };
    }
}

fn component_with(g: &DenseGraph, verts: &[usize], u: usize, v: usize) -> Option<Vec<usize>> {
    g.components(verts)
        .into_iter()
        .find(|c| c.binary_search(&u).is_ok())
        .filter(|c| c.binary_search(&v).is_ok())
}

/// Strong connectivity of every edge of `g`, in edge order, from one full decomposition.
pub fn edge_connectivities(g: &WeightedGraph) -> Vec<f64> {
    let dense = g.dense();
    let all: Vec<usize> = (0..g.n).collect();
    let mut member = vec![false; g.n];
    let mut value = vec![0.0; g.edges.len()];
    let mut stack: Vec<(Vec<usize>, f64)> =
        dense.components(&all).into_iter().map(|c| (c, 0.0)).collect();
    while let Some((verts, floor)) = stack.pop() {
        if verts.len() < 2 {
            continue;
        }
        let cut = min_cut_of(&dense, &verts);
        let level = floor.max(cut.value);
        let mut in_side = vec![false; g.n];
        for &x in &cut.side {
            in_side[x] = true;
        }
        for &x in &verts {
            member[x] = true;
        }
        for (i, e) in g.edges.iter().enumerate() {
            if member[e.u] && member[e.v] && in_side[e.u] != in_side[e.v] {
                value[i] = level;
            }
        }
        for &x in &verts {
            member[x] = false;
        }
        let rest: Vec<usize> = verts.iter().copied().filter(|&x| !in_side[x]).collect();
        for part in [cut.side, rest] {
            for comp in dense.components(&part) {
                stack.push((comp, level));
            }
        }
    }
    value
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

    fn brute(g: &WeightedGraph, u: usize, v: usize) -> f64 {
        let n = g.n;
        let mut best = 0.0f64;
        for set in 0u32..(1 << n) {
            if set >> u & 1 == 0 || set >> v & 1 == 0 {
                continue;
            }
            let low = set.trailing_zeros();
            let mut min = f64::INFINITY;
            let mut s = (set - 1) & set;
            while s > 0 {
                if s >> low & 1 == 1 {
                    let c: f64 = g
                        .edges
                        .iter()
                        .filter(|e| set >> e.u & 1 == 1 && set >> e.v & 1 == 1)
                        .filter(|e| (s >> e.u & 1) != (s >> e.v & 1))
                        .map(|e| e.w)
                        .sum();
                    min = min.min(c);
                }
                s = (s - 1) & set;
            }
            best = best.max(min);
        }
        best
    }

    #[test]
    fn small_examples() {
        let tri = graph(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]);
        for (u, v) in [(0, 1), (1, 2), (0, 2)] {
            assert_eq!(strong_connectivity(&tri, u, v).unwrap(), 2.0);
        }
        let path = graph(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
        assert_eq!(strong_connectivity(&path, 0, 1).unwrap(), 1.0);
        assert_eq!(edge_connectivities(&path), vec![1.0, 1.0]);
    }

    #[test]
    fn bridged_triangles() {
        let g = graph(
            6,
            &[
                (0, 1, 1.0),
                (1, 2, 1.0),
                (0, 2, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (3, 5, 1.0),
                (2, 3, 1.0),
            ],
        );
        assert_eq!(strong_connectivity(&g, 2, 3).unwrap(), 1.0);
        assert_eq!(strong_connectivity(&g, 0, 1).unwrap(), 2.0);
        assert_eq!(strong_connectivity(&g, 4, 5).unwrap(), 2.0);
        assert_eq!(edge_connectivities(&g), vec![2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 1.0]);
    }

    #[test]
    fn different_components_is_zero() {
        let g = graph(4, &[(0, 1, 1.0), (2, 3, 1.0)]);
        assert_eq!(strong_connectivity(&g, 0, 3).unwrap(), 0.0);
        assert!(strong_connectivity(&g, 0, 4).is_err());
    }

    #[test]
    fn weighted_agrees_with_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..150 {
            let n = rng.random_range(2..8);
            let mut e = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.random_bool(0.6) {
                        e.push((u, v, rng.random_range(1..4) as f64));
                    }
                }
            }
            let g = graph(n, &e);
            let all = edge_connectivities(&g);
            for (i, ed) in g.edges.iter().enumerate() {
                let want = brute(&g, ed.u, ed.v);
                assert_eq!(strong_connectivity(&g, ed.u, ed.v).unwrap(), want);
                assert_eq!(all[i], want);
            }
        }
    }
}

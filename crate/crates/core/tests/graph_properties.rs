use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust_stream::graph::{
    cut_value, edge_connectivities, global_min_cut, sparsifier_check, strong_connectivity,
    CutQuery, Edge, SparsifierConfig, SparsifierState, WeightedGraph,
};

/// Strong connectivity of every vertex pair by enumerating all vertex
/// subsets and all cuts inside each (unit weights, bitmask adjacency).
fn brute_connectivity(n: usize, adj: &[u32]) -> Vec<Vec<u32>> {
    let mut min_cut = vec![0u32; 1 << n];
    for set in 1u32..(1 << n) {
        if set.count_ones() < 2 {
            continue;
        }
        let low = set & set.wrapping_neg();
        let mut best = u32::MAX;
        let mut s = (set - 1) & set;
        while s > 0 {
            if s & low != 0 {
                let mut c = 0;
                for x in 0..n {
                    if s >> x & 1 == 1 {
                        c += (adj[x] & set & !s).count_ones();
                    }
                }
                best = best.min(c);
            }
            s = (s - 1) & set;
        }
        min_cut[set as usize] = best;
    }
    let mut conn = vec![vec![0u32; n]; n];
    for set in 1u32..(1 << n) {
        let m = min_cut[set as usize];
        for u in 0..n {
            for v in u + 1..n {
                if set >> u & 1 == 1 && set >> v & 1 == 1 && m > conn[u][v] {
                    conn[u][v] = m;
                    conn[v][u] = m;
                }
            }
        }
    }
    conn
}

#[test]
fn connectivity_matches_brute_force_on_all_small_graphs() {
    for n in 2..=6usize {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        for mask in 0u32..(1 << pairs.len()) {
            let mut adj = vec![0u32; n];
            let mut edges = Vec::new();
            for (i, &(u, v)) in pairs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    adj[u] |= 1 << v;
                    adj[v] |= 1 << u;
                    edges.push(Edge::unit(u, v).unwrap());
                }
            }
            let g = WeightedGraph::new(n, edges).unwrap();
            let want = brute_connectivity(n, &adj);
            let all = edge_connectivities(&g);
            for (e, &c) in g.edges.iter().zip(&all) {
                let w = want[e.u][e.v] as f64;
                assert_eq!(c, w, "n={n} mask={mask:b} edge ({}, {})", e.u, e.v);
                assert_eq!(strong_connectivity(&g, e.u, e.v).unwrap(), w);
            }
        }
    }
}

fn stream(cfg: SparsifierConfig, edges: &[Edge]) -> SparsifierState {
    let mut s = SparsifierState::new(cfg).unwrap();
    for e in edges {
        s.process_edge(*e).unwrap();
    }
    s
}

fn shuffled(g: &WeightedGraph, seed: u64) -> Vec<Edge> {
    let mut e = g.edges.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..e.len()).rev() {
        e.swap(i, rng.random_range(0..=i));
    }
    e
}

fn erdos_renyi(n: usize, p: f64, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push(Edge::unit(u, v).unwrap());
            }
        }
    }
    WeightedGraph::new(n, edges).unwrap()
}

#[test]
fn saturated_sparsifier_is_exact() {
    let g = erdos_renyi(30, 0.4, 3);
    let s = stream(SparsifierConfig::new(30, g.edges.len(), 0.5, 1), &g.edges);
    assert!(s.kept().iter().all(|k| k.prob == 1.0));
    let h = s.sparsifier();
    assert_eq!(h, g);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let side: Vec<usize> = (0..30).filter(|_| rng.random_bool(0.5)).collect();
        if let Ok(q) = CutQuery::new(30, &side) {
            assert_eq!(cut_value(&h, &q).unwrap(), cut_value(&g, &q).unwrap());
        }
    }
}

#[test]
fn cut_values_are_unbiased() {
    let mut edges = Vec::new();
    for u in 0..6 {
        for v in u + 1..6 {
            edges.push(Edge::new(u, v, 1.0 + ((u + 2 * v) % 3) as f64).unwrap());
        }
    }
    let g = WeightedGraph::new(6, edges.clone()).unwrap();
    let q = CutQuery::new(6, &[0, 1, 2]).unwrap();
    let truth = cut_value(&g, &q).unwrap();
    let seeds = 10_000u64;
    let mut sum = 0.0;
    let mut fractional = 0usize;
    for seed in 0..seeds {
        let s = stream(SparsifierConfig::new(6, 15, 0.5, seed).with_c(0.2), &edges);
        fractional += s.kept().iter().filter(|k| k.prob < 1.0).count();
        sum += cut_value(&s.sparsifier(), &q).unwrap();
    }
    assert!(fractional > 0);
    let mean = sum / seeds as f64;
    assert!((mean / truth - 1.0).abs() <= 0.02, "{mean} vs {truth}");
}

#[test]
fn erdos_renyi_sampled_cuts_hold() {
    let mut passed = 0;
    for seed in 0..20 {
        let g = erdos_renyi(100, 0.3, seed);
        let s = stream(SparsifierConfig::new(100, g.edges.len(), 0.5, seed), &shuffled(&g, seed));
        let r = sparsifier_check(&g, &s.sparsifier(), 0.5, 2000, seed);
        assert!(!r.exhaustive);
        passed += usize::from(r.passed());
    }
    assert!(passed >= 18);
}

#[test]
fn compressing_constant_keeps_cuts() {
    let g = WeightedGraph::complete(60, 1.0);
    let mut passed = 0;
    let mut kept = 0;
    for seed in 0..20 {
        let s = stream(SparsifierConfig::new(60, g.edges.len(), 0.5, seed).with_c(0.5), &shuffled(&g, seed));
        kept += s.kept().len();
        let r = sparsifier_check(&g, &s.sparsifier(), 0.5, 500, seed);
        passed += usize::from(r.passed());
    }
    assert!(kept < 20 * g.edges.len());
    assert!(passed >= 18, "{passed}/20");
}

#[test]
fn kept_edges_within_budget() {
    for seed in 0..5 {
        let g = erdos_renyi(20, 0.5, seed);
        let s = stream(SparsifierConfig::new(20, g.edges.len(), 0.5, seed), &g.edges);
        let r = sparsifier_check(&g, &s.sparsifier(), 0.5, 0, seed);
        assert!(r.exhaustive);
        assert!((s.kept().len() as f64) <= s.edge_budget(r.kappa()));
    }
}

/// Next edge touches the vertex whose current H-degree is smallest.
fn lightest_cut_attack(n: usize, m: usize, cfg: SparsifierConfig, seed: u64) -> (WeightedGraph, SparsifierState) {
    let mut s = SparsifierState::new(cfg).unwrap();
    let mut present = vec![vec![false; n]; n];
    let mut streamed = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..m {
        let mut deg = vec![0.0; n];
        for k in s.kept() {
            deg[k.edge.u] += k.weight();
            deg[k.edge.v] += k.weight();
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| deg[a].total_cmp(&deg[b]).then(a.cmp(&b)));
        let mut pick = None;
        'outer: for &u in &order {
            for &v in &order {
                if u != v && !present[u][v] {
                    pick = Some((u, v));
                    break 'outer;
                }
            }
        }
        let (u, v) = pick.unwrap_or_else(|| (rng.random_range(0..n), rng.random_range(0..n)));
        if u == v || present[u][v] {
            continue;
        }
        present[u][v] = true;
        present[v][u] = true;
        let e = Edge::unit(u, v).unwrap();
        streamed.push(e);
        s.process_edge(e).unwrap();
    }
    (WeightedGraph::new(n, streamed).unwrap(), s)
}

#[test]
fn adaptive_lightest_cut_adversary() {
    let n = 50;
    for seed in 0..20 {
        let cfg = SparsifierConfig::new(n, 1225, 0.5, seed);
        let (g, s) = lightest_cut_attack(n, 600, cfg, seed);
        let r = sparsifier_check(&g, &s.sparsifier(), 0.5, 500, seed);
        assert!(r.passed(), "seed {seed}: worst {}", r.worst_ratio);
    }
}

#[test]
fn min_cut_witness_is_consistent() {
    for seed in 0..30 {
        let g = erdos_renyi(12, 0.4, seed);
        let c = global_min_cut(&g).unwrap();
        assert_eq!(c.side[0], 0);
        if c.side.len() < 12 {
            let q = CutQuery::new(12, &c.side).unwrap();
            assert!((cut_value(&g, &q).unwrap() - c.value).abs() < 1e-9);
        } else {
            assert_eq!(c.value, 0.0);
        }
    }
}

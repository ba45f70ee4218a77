use rand::Rng;
use serde::{Deserialize, Serialize};

use super::mincut::global_min_cut;
use super::{WeightedGraph, DenseGraph};
use crate::rng::{domain, CounterRng};

/// Largest vertex count for which every cut is enumerated.
pub const EXHAUSTIVE_LIMIT: usize = 20;

const MAX_LISTED: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutViolation {
    pub side: Vec<usize>,
    pub g_value: f64,
    pub h_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutReport {
    pub exhaustive: bool,
    pub cuts_checked: u64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// The checked ratio farthest from 1.
    pub worst_ratio: f64,
    pub violation_count: u64,
    /// Up to the first hundred violating cuts.
    pub violations: Vec<CutViolation>,
    /// Smallest and largest G-cut among the checked cuts.
    pub g_min_cut: f64,
    pub g_max_cut: f64,
}

impl CutReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    /// Measured spread of G's cut values over the checked cuts.
    pub fn kappa(&self) -> f64 {
        if self.g_min_cut > 0.0 {
            self.g_max_cut / self.g_min_cut
        } else {
            f64::INFINITY
        }
    }
}

struct Tally {
    eps: f64,
    zero_tol: f64,
    report: CutReport,
}

impl Tally {
    fn new(eps: f64, zero_tol: f64, exhaustive: bool) -> Self {
        Self {
            eps,
            zero_tol,
            report: CutReport {
                exhaustive,
                cuts_checked: 0,
                min_ratio: f64::INFINITY,
                max_ratio: f64::NEG_INFINITY,
                worst_ratio: 1.0,
                violation_count: 0,
                violations: Vec::new(),
                g_min_cut: f64::INFINITY,
                g_max_cut: 0.0,
            },
        }
    }

    fn record(&mut self, g: f64, h: f64, side: impl FnOnce() -> Vec<usize>) {
        let r = &mut self.report;
        r.cuts_checked += 1;
        r.g_min_cut = r.g_min_cut.min(g);
        r.g_max_cut = r.g_max_cut.max(g);
        let ok = if g.abs() <= self.zero_tol {
            h.abs() <= self.zero_tol
        } else {
            let ratio = h / g;
            r.min_ratio = r.min_ratio.min(ratio);
            r.max_ratio = r.max_ratio.max(ratio);
            if (ratio - 1.0).abs() > (r.worst_ratio - 1.0).abs() {
                r.worst_ratio = ratio;
            }
            let slack = 1e-9;
            ratio >= 1.0 - self.eps - slack && ratio <= 1.0 + self.eps + slack
        };
        if !ok {
            r.violation_count += 1;
            if r.violations.len() < MAX_LISTED {
                r.violations.push(CutViolation {
                    side: side(),
                    g_value: g,
                    h_value: h,
                });
            }
        }
    }
}

/// Compares every cut of `h` with the same cut of `g` (exhaustively for small `n`,
/// otherwise `trials` random sides plus the minimum cut of `g`).
pub fn sparsifier_check(
    g: &WeightedGraph,
    h: &WeightedGraph,
    eps: f64,
    trials: u64,
    seed: u64,
) -> CutReport {
    let n = g.n.max(h.n);
    let zero_tol = 1e-9 * (g.total_weight() + h.total_weight()).max(1.0);
    if n < 2 {
        return Tally::new(eps, zero_tol, true).report;
    }
    let gd = resize(g, n).dense();
    let hd = resize(h, n).dense();
    if n <= EXHAUSTIVE_LIMIT {
        exhaustive(&gd, &hd, n, Tally::new(eps, zero_tol, true))
    } else {
        sampled(&gd, &hd, g, n, trials, seed, Tally::new(eps, zero_tol, false))
    }
}

fn resize(g: &WeightedGraph, n: usize) -> WeightedGraph {
    WeightedGraph {
        n,
        edges: g.edges.clone(),
    }
}

fn exhaustive(gd: &DenseGraph, hd: &DenseGraph, n: usize, mut tally: Tally) -> CutReport {
    // Gray-code walk over sides that exclude vertex n-1.
    let mut in_side = vec![false; n];
    let (mut gc, mut hc) = (0.0, 0.0);
    for i in 1u64..(1 << (n - 1)) {
        let x = i.trailing_zeros() as usize;
        let entering = !in_side[x];
        let (mut dg, mut dh) = (0.0, 0.0);
        for y in 0..n {
            if y == x {
                continue;
            }
            let sign = if in_side[y] { -1.0 } else { 1.0 };
            dg += sign * gd.weight(x, y);
            dh += sign * hd.weight(x, y);
        }
        if entering {
            gc += dg;
            hc += dh;
        } else {
            gc -= dg;
            hc -= dh;
        }
        in_side[x] = entering;
        let side = &in_side;
        tally.record(gc, hc, || (0..n).filter(|&v| side[v]).collect());
    }
    tally.report
}

fn direct(d: &DenseGraph, side: &[bool]) -> f64 {
    let n = side.len();
    let mut c = 0.0;
    for x in 0..n {
        if side[x] {
            for y in 0..n {
                if !side[y] {
                    c += d.weight(x, y);
                }
            }
        }
    }
    c
}

fn sampled(
    gd: &DenseGraph,
    hd: &DenseGraph,
    g: &WeightedGraph,
    n: usize,
    trials: u64,
    seed: u64,
    mut tally: Tally,
) -> CutReport {
    let mut rng = CounterRng::new(seed, domain::GENERATOR).stream(0xC07);
    let mut sides: Vec<Vec<bool>> = Vec::new();
    if let Ok(mc) = global_min_cut(g) {
        let mut s = vec![false; n];
        for &v in &mc.side {
            s[v] = true;
        }
        sides.push(s);
    }
    while (sides.len() as u64) < trials + 1 {
        let s: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        let count = s.iter().filter(|&&b| b).count();
        if count > 0 && count < n {
            sides.push(s);
        }
    }
    for s in &sides {
        tally.record(direct(gd, s), direct(hd, s), || {
            (0..n).filter(|&v| s[v]).collect()
        });
    }
    tally.report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn scaled(g: &WeightedGraph, f: f64) -> WeightedGraph {
        WeightedGraph {
            n: g.n,
            edges: g.edges.iter().map(|e| Edge { w: e.w * f, ..*e }).collect(),
        }
    }

    #[test]
    fn identical_graphs_have_unit_ratio() {
        let g = WeightedGraph::complete(6, 1.5);
        let r = sparsifier_check(&g, &g, 0.1, 0, 0);
        assert!(r.exhaustive && r.passed());
        assert_eq!(r.cuts_checked, 31);
        assert!((r.min_ratio - 1.0).abs() < 1e-12 && (r.max_ratio - 1.0).abs() < 1e-12);
        assert_eq!(r.g_min_cut, 7.5);
        assert_eq!(r.g_max_cut, 13.5);
    }

    #[test]
    fn uniform_scaling_fails() {
        let eps = 0.25;
        let g = WeightedGraph::complete(7, 1.0);
        let r = sparsifier_check(&g, &scaled(&g, 1.0 + 2.0 * eps), eps, 0, 0);
        assert!(!r.passed());
        assert_eq!(r.violation_count, 63);
        assert!((r.worst_ratio - 1.5).abs() < 1e-12);
    }

    #[test]
    fn sampled_mode_for_large_graphs() {
        let g = WeightedGraph::complete(30, 1.0);
        let r = sparsifier_check(&g, &g, 0.1, 50, 3);
        assert!(!r.exhaustive && r.passed());
        assert_eq!(r.cuts_checked, 51);
        assert_eq!(r.g_min_cut, 29.0);
        let bad = sparsifier_check(&g, &scaled(&g, 0.5), 0.1, 50, 3);
        assert_eq!(bad.violation_count, 51);
    }

    #[test]
    fn zero_cuts_must_match() {
        let g = WeightedGraph::new(3, vec![Edge::unit(0, 1).unwrap()]).unwrap();
        let h = WeightedGraph::new(3, vec![Edge::unit(0, 1).unwrap(), Edge::unit(1, 2).unwrap()])
            .unwrap();
        let r = sparsifier_check(&g, &h, 0.5, 0, 0);
        assert!(!r.passed());
        assert!(r.violations.iter().any(|v| v.g_value == 0.0));
    }
}

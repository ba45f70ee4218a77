//! Merge-and-reduce coresets for (k, z)-clustering.
//!
//! The offline constructor is sensitivity sampling: every point gets an upper
//! bound `s(p)` on its sensitivity from a bicriteria solution, `m` points are
//! drawn with replacement with probability `q(p) = μ(p)s(p)/S`, and a draw of
//! `p` carries weight `μ(p)/(m·q(p))`. The tree composes that constructor over
//! dyadic blocks of the stream.

mod lloyd;
mod tree;

pub use lloyd::{lloyd_refine, LloydResult};
pub use tree::{CoresetTree, Passthrough, Reducer, SensitivityReducer};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Default constant in the sample size.
pub const DEFAULT_C0: f64 = 10.0;
/// Default constant in the sensitivity bounds.
pub const DEFAULT_C1: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub coords: Vec<f64>,
    pub weight: f64,
}

impl WeightedPoint {
    pub fn new(coords: Vec<f64>, weight: f64) -> Result<Self> {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(invalid(format!("point weight {weight} must be positive")));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(invalid("non-finite point coordinate"));
        }
        Ok(Self { coords, weight })
    }

    pub fn unit(coords: Vec<f64>) -> Result<Self> {
        Self::new(coords, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringConfig {
    pub k: usize,
    pub z: u32,
    pub eps: f64,
    pub delta: f64,
    pub leaf_size: usize,
    /// A-priori bound on the stream length; fixes the number of levels.
    pub n_bound: usize,
    /// Pseudo-dimension proxy; `None` means `d·k·(z+1)·ln(k+1)`.
    pub d_prime: Option<f64>,
    pub c0: f64,
    pub c1: f64,
    /// Largest reduce output; `None` means `leaf_size`.
    pub sample_cap: Option<usize>,
    pub seed: u64,
}

impl ClusteringConfig {
    pub fn new(k: usize, z: u32, eps: f64, leaf_size: usize, n_bound: usize, seed: u64) -> Self {
        Self {
            k,
            z,
            eps,
            delta: 0.1,
            leaf_size,
            n_bound,
            d_prime: None,
            c0: DEFAULT_C0,
            c1: DEFAULT_C1,
            sample_cap: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        if self.z != 1 && self.z != 2 {
            return Err(invalid(format!("z = {} must be 1 or 2", self.z)));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(invalid(format!("eps = {} must lie in (0, 1)", self.eps)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(invalid(format!("delta = {} must lie in (0, 1)", self.delta)));
        }
        if self.leaf_size == 0 || self.n_bound == 0 {
            return Err(invalid("leaf_size and n_bound must be positive"));
        }
        if !(self.c0 > 0.0 && self.c1 > 0.0) {
            return Err(invalid("c0 and c1 must be positive"));
        }
        if self.sample_cap == Some(0) {
            return Err(invalid("sample cap must be positive"));
        }
        Ok(())
    }

    /// `⌈log₂(n_bound / leaf_size)⌉`, at least 1.
    pub fn max_levels(&self) -> usize {
        let blocks = self.n_bound.div_ceil(self.leaf_size).max(1);
        (blocks as f64).log2().ceil().max(1.0) as usize
    }

    /// Per-level accuracy `ε / (2·max_levels)`.
    pub fn eps_level(&self) -> f64 {
        self.eps / (2.0 * self.max_levels() as f64)
    }

    pub fn d_prime(&self, dim: usize) -> f64 {
        self.d_prime.unwrap_or_else(|| {
            dim as f64 * self.k as f64 * (self.z as f64 + 1.0) * (self.k as f64 + 1.0).ln()
        })
    }

    /// `⌈c₀·S²/ε²·(d′ + ln(1/δ))⌉`.
    pub fn theoretical_sample_size(&self, total_sensitivity: f64, eps_level: f64, dim: usize) -> f64 {
        let s = total_sensitivity;
        (self.c0 * s * s / (eps_level * eps_level) * (self.d_prime(dim) + (1.0 / self.delta).ln()))
            .ceil()
    }

    pub fn effective_cap(&self) -> usize {
        self.sample_cap.unwrap_or(self.leaf_size)
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn pow_z(d: f64, z: u32) -> f64 {
    if z == 1 {
        d
    } else {
        d * d
    }
}

/// Index of the closest center, lowest index on ties.
pub(crate) fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centers.iter().enumerate() {
        let d = dist(p, c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

/// `Σ_p w(p)·dist(p, centers)^z`.
pub fn kz_cost(points: &[WeightedPoint], centers: &[Vec<f64>], z: u32) -> f64 {
    if centers.is_empty() {
        return f64::INFINITY;
    }
    points
        .iter()
        .map(|p| p.weight * pow_z(nearest(&p.coords, centers).1, z))
        .sum()
}

/// Weighted D^z seeding: first center drawn by weight, later ones by
/// `w·dist^z` to the chosen set. Stops early once every point coincides with a
/// center.
pub(crate) fn seed_centers<R: Rng + ?Sized>(
    points: &[WeightedPoint],
    count: usize,
    z: u32,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let weights: Vec<f64> = points.iter().map(|p| p.weight).collect();
    let first = WeightedIndex::new(&weights).expect("positive weights").sample(rng);
    let mut centers = vec![points[first].coords.clone()];
    let mut d: Vec<f64> = points.iter().map(|p| pow_z(dist(&p.coords, &centers[0]), z)).collect();
    while centers.len() < count {
        let scores: Vec<f64> = points.iter().zip(&d).map(|(p, d)| p.weight * d).collect();
        let Ok(pick) = WeightedIndex::new(&scores) else {
            break;
        };
        let c = points[pick.sample(rng)].coords.clone();
        for (di, p) in d.iter_mut().zip(points) {
            *di = di.min(pow_z(dist(&p.coords, &c), z));
        }
        centers.push(c);
    }
    centers
}

/// Sensitivity upper bounds from a 2k-center bicriteria solution:
/// `s(p) = c₁·(dist(p,B)^z / Σ_q μ(q)dist(q,B)^z + 1/μ(cluster(p)))`.
pub fn sensitivity_bounds<R: Rng + ?Sized>(
    points: &[WeightedPoint],
    cfg: &ClusteringConfig,
    rng: &mut R,
) -> Vec<f64> {
    if points.is_empty() {
        return Vec::new();
    }
    let centers = seed_centers(points, 2 * cfg.k, cfg.z, rng);
    let assign: Vec<(usize, f64)> = points
        .iter()
        .map(|p| {
            let (i, d) = nearest(&p.coords, &centers);
            (i, pow_z(d, cfg.z))
        })
        .collect();
    let mut mass = vec![0.0; centers.len()];
    let mut total = 0.0;
    for (p, &(i, c)) in points.iter().zip(&assign) {
        mass[i] += p.weight;
        total += p.weight * c;
    }
    assign
        .iter()
        .map(|&(i, c)| {
            let share = if total > 0.0 { c / total } else { 0.0 };
            cfg.c1 * (share + 1.0 / mass[i])
        })
        .collect()
}

/// Offline sensitivity-sampling coreset of `points` at accuracy `eps_level`.
///
/// The number of draws is the theoretical size capped by
/// [`ClusteringConfig::effective_cap`]. When that is at least `|P|` the input
/// is returned unchanged, since a set is an exact coreset of itself.
pub fn offline_coreset<R: Rng + ?Sized>(
    points: &[WeightedPoint],
    cfg: &ClusteringConfig,
    eps_level: f64,
    rng: &mut R,
) -> Vec<WeightedPoint> {
    if points.is_empty() {
        return Vec::new();
    }
    let s = sensitivity_bounds(points, cfg, rng);
    let mass: Vec<f64> = points.iter().zip(&s).map(|(p, s)| p.weight * s).collect();
    let total: f64 = mass.iter().sum();
    let theoretical = cfg.theoretical_sample_size(total, eps_level, points[0].dim());
    let m = (cfg.effective_cap() as f64).min(theoretical).max(1.0) as usize;
    if m >= points.len() {
        return points.to_vec();
    }
    draw_weighted(points, &mass, total, m, rng)
}

/// `m` i.i.d. draws with `q(p) = mass(p)/total`, weight `μ(p)/(m·q(p))`.
pub(crate) fn draw_weighted<R: Rng + ?Sized>(
    points: &[WeightedPoint],
    mass: &[f64],
    total: f64,
    m: usize,
    rng: &mut R,
) -> Vec<WeightedPoint> {
    let index = WeightedIndex::new(mass).expect("positive sensitivities");
    (0..m)
        .map(|_| {
            let i = index.sample(rng);
            let q = mass[i] / total;
            WeightedPoint {
                coords: points[i].coords.clone(),
                weight: points[i].weight / (m as f64 * q),
            }
        })
        .collect()
}

pub fn total_weight(points: &[WeightedPoint]) -> f64 {
    points.iter().map(|p| p.weight).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pts(coords: &[[f64; 2]]) -> Vec<WeightedPoint> {
        coords.iter().map(|c| WeightedPoint::unit(c.to_vec()).unwrap()).collect()
    }

    #[test]
    fn cost_examples() {
        let origin = vec![vec![0.0, 0.0]];
        assert_eq!(kz_cost(&pts(&[[0.0, 0.0]]), &origin, 2), 0.0);
        let p = vec![WeightedPoint::new(vec![3.0, 4.0], 2.0).unwrap()];
        assert_eq!(kz_cost(&p, &origin, 1), 10.0);
        assert_eq!(kz_cost(&p, &origin, 2), 50.0);
    }

    #[test]
    fn identical_points_get_uniform_bounds() {
        let cfg = ClusteringConfig::new(2, 2, 0.3, 16, 100, 0);
        let p = pts(&[[1.0, 1.0]; 10]);
        let s = sensitivity_bounds(&p, &cfg, &mut ChaCha8Rng::seed_from_u64(1));
        for v in s {
            assert!((v - cfg.c1 / 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn outlier_has_maximal_bound() {
        let cfg = ClusteringConfig::new(1, 2, 0.3, 16, 100, 0);
        let mut p = pts(&[[0.0, 0.0]; 19]);
        p.push(WeightedPoint::unit(vec![1e6, 0.0]).unwrap());
        let s = sensitivity_bounds(&p, &cfg, &mut ChaCha8Rng::seed_from_u64(3));
        let out = s[19];
        assert!(out >= cfg.c1 - 1e-9);
        assert!(s[..19].iter().all(|&v| v < out));
    }

    #[test]
    fn two_far_clusters_get_equal_bounds_within_cluster() {
        let cfg = ClusteringConfig::new(2, 2, 0.3, 16, 100, 0);
        let mut c = Vec::new();
        for i in 0..50 {
            let t = i as f64 * 0.1;
            c.push([t.cos() * 0.01, t.sin() * 0.01]);
        }
        for i in 0..50 {
            let t = i as f64 * 0.1;
            c.push([100.0 + t.cos() * 0.01, t.sin() * 0.01]);
        }
        let p = pts(&c);
        let s = sensitivity_bounds(&p, &cfg, &mut ChaCha8Rng::seed_from_u64(7));
        // bicriteria mass term dominates; within a cluster bounds stay within a factor 3
        for block in [&s[..50], &s[50..]] {
            let lo = block.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = block.iter().cloned().fold(0.0, f64::max);
            assert!(hi <= 3.0 * lo, "{lo} {hi}");
        }
    }

    #[test]
    fn uniform_sensitivity_arithmetic() {
        let p = pts(&[[0.0, 0.0]; 100]);
        let mass = vec![0.01; 100];
        let out = draw_weighted(&p, &mass, 1.0, 20, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(out.len(), 20);
        for q in &out {
            assert!((q.weight - 100.0 / 20.0).abs() < 1e-9);
        }
    }

    #[test]
    fn repeated_point_coreset_is_exact() {
        let mut cfg = ClusteringConfig::new(2, 2, 0.3, 64, 1000, 0);
        cfg.sample_cap = Some(7);
        let p = pts(&[[2.0, -1.0]; 30]);
        let out = offline_coreset(&p, &cfg, 0.1, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(out.len(), 7);
        assert!((total_weight(&out) - 30.0).abs() < 1e-9);
        for c in [[0.0, 0.0], [5.0, 5.0], [2.0, -1.0]] {
            let centers = vec![c.to_vec()];
            let full = kz_cost(&p, &centers, 2);
            assert!((kz_cost(&out, &centers, 2) - full).abs() <= 1e-9 * (1.0 + full));
        }
    }

    #[test]
    fn uniform_square_coreset_matches_grid_costs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p: Vec<WeightedPoint> = (0..200)
            .map(|_| WeightedPoint::unit(vec![rng.random::<f64>(), rng.random::<f64>()]).unwrap())
            .collect();
        let mut cfg = ClusteringConfig::new(1, 2, 0.2, 200, 200, 0);
        cfg.sample_cap = Some(100);
        let out = offline_coreset(&p, &cfg, 0.2, &mut ChaCha8Rng::seed_from_u64(4));
        assert_eq!(out.len(), 100);
        for i in 0..=10 {
            for j in 0..=10 {
                let c = vec![vec![i as f64 / 10.0, j as f64 / 10.0]];
                let full = kz_cost(&p, &c, 2);
                let core = kz_cost(&out, &c, 2);
                assert!((core - full).abs() <= 0.2 * full, "{i},{j}: {core} vs {full}");
            }
        }
    }

    #[test]
    fn level_schedule() {
        let cfg = ClusteringConfig::new(3, 2, 0.3, 64, 1024, 0);
        assert_eq!(cfg.max_levels(), 4);
        assert!((cfg.eps_level() - 0.3 / 8.0).abs() < 1e-15);
        assert!(ClusteringConfig::new(0, 2, 0.3, 64, 1024, 0).validate().is_err());
        assert!(ClusteringConfig::new(1, 3, 0.3, 64, 1024, 0).validate().is_err());
    }
}

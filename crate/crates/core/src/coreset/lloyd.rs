use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{kz_cost, nearest, seed_centers, WeightedPoint};
use crate::error::{invalid, Result};

const MAX_ITERATIONS: usize = 100;
const REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LloydResult {
    pub centers: Vec<Vec<f64>>,
    pub cost: f64,
    pub iterations: usize,
    /// Set when there were fewer distinct points than `k`.
    pub duplicate_centers: bool,
}

/// Weighted D^z seeding followed by Lloyd (z = 2) or Weiszfeld-median
/// (z = 1) iterations until the relative cost change drops below `1e-6`.
pub fn lloyd_refine(points: &[WeightedPoint], k: usize, z: u32, seed: u64) -> Result<LloydResult> {
    if points.is_empty() {
        return Err(invalid("cannot cluster an empty coreset"));
    }
    if k == 0 || (z != 1 && z != 2) {
        return Err(invalid(format!("bad clustering parameters k = {k}, z = {z}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = seed_centers(points, k, z, &mut rng);
    let duplicate_centers = centers.len() < k;
    while centers.len() < k {
        centers.push(centers[0].clone());
    }

    let mut cost = kz_cost(points, &centers, z);
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut members: Vec<Vec<&WeightedPoint>> = vec![Vec::new(); k];
        for p in points {
            members[nearest(&p.coords, &centers).0].push(p);
        }
        for (c, m) in centers.iter_mut().zip(&members) {
            if m.is_empty() {
                continue;
            }
            let candidate = if z == 2 { weighted_mean(m) } else { weighted_median(m, c) };
            if cluster_cost(m, &candidate, z) <= cluster_cost(m, c, z) {
                *c = candidate;
            }
        }
        let next = kz_cost(points, &centers, z);
        let change = (cost - next).abs() / cost.max(f64::MIN_POSITIVE);
        cost = next;
        if change < REL_TOL {
            break;
        }
    }
    Ok(LloydResult {
        centers,
        cost,
        iterations,
        duplicate_centers,
    })
}

fn cluster_cost(members: &[&WeightedPoint], c: &[f64], z: u32) -> f64 {
    members
        .iter()
        .map(|p| {
            let d2: f64 = p.coords.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
            p.weight * if z == 2 { d2 } else { d2.sqrt() }
        })
        .sum()
}

fn weighted_mean(members: &[&WeightedPoint]) -> Vec<f64> {
    let dim = members[0].coords.len();
    let mut acc = vec![0.0; dim];
    let mut w = 0.0;
    for p in members {
        for (a, x) in acc.iter_mut().zip(&p.coords) {
            *a += p.weight * x;
        }
        w += p.weight;
    }
    acc.iter().map(|a| a / w).collect()
}

/// Weiszfeld iterations for the weighted geometric median.
fn weighted_median(members: &[&WeightedPoint], start: &[f64]) -> Vec<f64> {
    let mut y = start.to_vec();
    for _ in 0..500 {
        let mut num = vec![0.0; y.len()];
        let mut den = 0.0;
        for p in members {
            let d = p
                .coords
                .iter()
                .zip(&y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
                .max(1e-12);
            let w = p.weight / d;
            for (n, x) in num.iter_mut().zip(&p.coords) {
                *n += w * x;
            }
            den += w;
        }
        let next: Vec<f64> = num.iter().map(|n| n / den).collect();
        let shift: f64 = next.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
        y = next;
        if shift < 1e-12 {
            break;
        }
    }
    y
}

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::baselines::SignSketch;
use crate::error::{invalid, Error, Result};
use crate::rng::{domain, CounterRng};

/// A stream delivered in batches; each entry is one row or point.
pub type BatchStream = Vec<Vec<Vec<f64>>>;

/// Noise level on the regression constellation.
pub const CONSTELLATION_NOISE: f64 = 0.05;

/// Four points whose least-squares line through the origin has slope −1.
pub const CONSTELLATION: [(f64, f64); 4] = [(1.0, -1.0), (-1.0, 1.0), (2.0, -2.0), (-2.0, 2.0)];

fn generator(seed: u64, tag: u64) -> rand_chacha::ChaCha8Rng {
    CounterRng::new(seed, domain::GENERATOR).stream(tag)
}

/// `batches − 1` batches of standard normal 2-d points, then one batch around `(L, L)`.
pub fn distant_cluster_stream(
    batches: usize,
    batch_size: usize,
    l: f64,
    seed: u64,
) -> Result<BatchStream> {
    if batches < 2 {
        return Err(invalid("distant cluster stream needs at least 2 batches"));
    }
    if batch_size == 0 {
        return Err(invalid("batch_size must be positive"));
    }
    let mut rng = generator(seed, 1);
    Ok((0..batches)
        .map(|b| {
            let shift = if b + 1 == batches { l } else { 0.0 };
            (0..batch_size)
                .map(|_| {
                    let x: f64 = rng.sample(StandardNormal);
                    let y: f64 = rng.sample(StandardNormal);
                    vec![x + shift, y + shift]
                })
                .collect()
        })
        .collect())
}

/// Rows `(x, y)` cycling through the constellation with noise on `y`, then a
/// final batch tightly around `(L, L)`.
pub fn regression_flip_stream(
    batches: usize,
    batch_size: usize,
    l: f64,
    seed: u64,
) -> Result<BatchStream> {
    if batches < 2 {
        return Err(invalid("regression flip stream needs at least 2 batches"));
    }
    if batch_size == 0 {
        return Err(invalid("batch_size must be positive"));
    }
    let noise = Normal::new(0.0, CONSTELLATION_NOISE).expect("valid noise level");
    let mut rng = generator(seed, 2);
    let mut i = 0usize;
    Ok((0..batches)
        .map(|b| {
            (0..batch_size)
                .map(|_| {
                    if b + 1 == batches {
                        vec![l + noise.sample(&mut rng), l + noise.sample(&mut rng)]
                    } else {
                        let (x, y) = CONSTELLATION[i % 4];
                        i += 1;
                        vec![x, y + noise.sample(&mut rng)]
                    }
                })
                .collect()
        })
        .collect())
}

/// Gaussian regression rows `(x, x·β + noise)` with `features` columns.
pub fn gaussian_regression_stream(
    batches: usize,
    batch_size: usize,
    features: usize,
    noise: f64,
    seed: u64,
) -> Result<BatchStream> {
    if features == 0 || batches == 0 || batch_size == 0 {
        return Err(invalid("regression stream needs features, batches and rows"));
    }
    let noise = Normal::new(0.0, noise).map_err(|e| invalid(format!("noise: {e}")))?;
    let mut rng = generator(seed, 3);
    let beta: Vec<f64> = (0..features).map(|_| rng.sample(StandardNormal)).collect();
    Ok((0..batches)
        .map(|_| {
            (0..batch_size)
                .map(|_| {
                    let mut row: Vec<f64> = (0..features).map(|_| rng.sample(StandardNormal)).collect();
                    let y = row.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>() + noise.sample(&mut rng);
                    row.push(y);
                    row
                })
                .collect()
        })
        .collect())
}

/// Default label noise of the base stream projected by [`kernel_attack_stream`].
pub const KERNEL_BASE_NOISE: f64 = 0.1;

/// A Gaussian regression stream as wide as the sketch, projected by
/// [`project_to_null_space`].
pub fn kernel_attack_stream(
    sketch: &SignSketch,
    batches: usize,
    batch_size: usize,
    seed: u64,
) -> Result<BatchStream> {
    if sketch.width() < 2 {
        return Err(invalid("sketch must hold at least one feature and a target"));
    }
    let base = gaussian_regression_stream(batches, batch_size, sketch.width() - 1, KERNEL_BASE_NOISE, seed)?;
    project_to_null_space(sketch, &base)
}

/// Projects the columns of a base stream onto the null space of the sketch
/// restricted to the stream's row positions, so the sketch of the whole
/// stream is zero while every prefix still looks ordinary.
pub fn project_to_null_space(sketch: &SignSketch, base: &BatchStream) -> Result<BatchStream> {
    let n: usize = base.iter().map(Vec::len).sum();
    if n > sketch.n_bound() {
        return Err(invalid(format!(
            "stream of {n} rows exceeds sketch bound {}",
            sketch.n_bound()
        )));
    }
    let m = sketch.m();
    if m >= n {
        return Err(Error::Construction(format!(
            "sketch with {m} rows has no null space on {n} positions"
        )));
    }
    let cols = base
        .iter()
        .flatten()
        .next()
        .map(Vec::len)
        .ok_or_else(|| invalid("empty base stream"))?;
    let mut a = DMatrix::zeros(n, cols);
    for (i, row) in base.iter().flatten().enumerate() {
        if row.len() != cols {
            return Err(Error::DimensionMismatch {
                expected: cols,
                got: row.len(),
            });
        }
        for (j, &x) in row.iter().enumerate() {
            a[(i, j)] = x;
        }
    }
    let s = sketch.columns(n);
    let gram = &s * s.transpose();
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Construction("sketch rows are linearly dependent".into()))?;
    // Two projection passes keep the residual at rounding level.
    for _ in 0..2 {
        let coef = chol.solve(&(&s * &a));
        a -= s.transpose() * coef;
    }
    let scale = a.amax();
    let residual = (&s * &a).amax();
    if residual > 1e-9 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Construction(format!(
            "null-space residual {residual:e} exceeds tolerance"
        )));
    }
    let mut out = Vec::with_capacity(base.len());
    let mut i = 0;
    for batch in base {
        let mut rows = Vec::with_capacity(batch.len());
        for _ in batch {
            rows.push(a.row(i).iter().copied().collect());
            i += 1;
        }
        out.push(rows);
    }
    Ok(out)
}

/// Largest absolute entry of `S·A` for a stream placed at positions `0..n`.
pub fn sketch_residual(sketch: &SignSketch, stream: &BatchStream) -> f64 {
    let rows: Vec<&Vec<f64>> = stream.iter().flatten().collect();
    let n = rows.len();
    let cols = rows.first().map_or(0, |r| r.len());
    let s = sketch.columns(n);
    let a = DMatrix::from_fn(n, cols, |i, j| rows[i][j]);
    (s * a).amax()
}

/// Flattens batches into one row list.
pub fn flatten(stream: &BatchStream) -> Vec<Vec<f64>> {
    stream.iter().flatten().cloned().collect()
}

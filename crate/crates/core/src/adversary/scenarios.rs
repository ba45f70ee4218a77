use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::attacks::{
    distant_cluster_stream, flatten, gaussian_regression_stream, kernel_attack_stream,
    regression_flip_stream, sketch_residual, BatchStream, KERNEL_BASE_NOISE,
};
use super::baselines::{mean_squared_residual, DecayKMeans, SgdRegressor, SignSketch};
use super::game::{run_game, GameTranscript, ScriptedAdversary, StreamingAlgorithm};
use super::probe::{orthogonal_probe_adversary, SamplerAlgorithm};
use crate::coreset::{kz_cost, lloyd_refine, ClusteringConfig, CoresetTree, WeightedPoint};
use crate::error::{invalid, Result};
use crate::linalg::{spectral_sandwich_check, DenseMatrix, RowVector};
use crate::sampler::{solve_normal_equations, SamplerConfig, SamplerState, DEFAULT_C_L2};

/// Everything a scenario run produces: per-round series, final scalars and transcripts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub series: BTreeMap<String, Vec<(usize, f64)>>,
    pub finals: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
    pub transcripts: BTreeMap<String, GameTranscript>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub stream: BatchStream,
}

impl ScenarioReport {
    fn new(scenario: &str, stream: BatchStream) -> Self {
        Self {
            scenario: scenario.to_string(),
            series: BTreeMap::new(),
            finals: BTreeMap::new(),
            flags: BTreeMap::new(),
            transcripts: BTreeMap::new(),
            warnings: Vec::new(),
            stream,
        }
    }

    fn absorb_transcript(&mut self, name: &str, t: GameTranscript) {
        let mut keys: Vec<String> = Vec::new();
        for r in &t.rounds {
            for k in r.metrics.keys() {
                if !keys.contains(k) {
                    keys.push(k.clone());
                }
            }
        }
        for k in keys {
            self.series.insert(format!("{name}_{k}"), t.metric(&k));
        }
        if let Some(msg) = &t.aborted {
            self.warnings.push(format!("{name} game aborted: {msg}"));
        }
        self.transcripts.insert(name.to_string(), t);
    }

    pub fn final_value(&self, series: &str) -> Option<f64> {
        self.series.get(series).and_then(|s| s.last()).map(|p| p.1)
    }
}

/// Regression coefficients reported after each batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResponse {
    pub coefficients: Vec<f64>,
    pub stored_rows: usize,
}

/// Clustering centers reported after each batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterResponse {
    pub centers: Vec<Vec<f64>>,
    pub stored_points: usize,
}

/// Online sensitivity sampling followed by least squares on the sample.
pub struct RobustRegressor {
    state: SamplerState,
}

impl RobustRegressor {
    pub fn new(config: SamplerConfig, width: usize) -> Result<Self> {
        Ok(Self {
            state: SamplerState::new(config, width)?,
        })
    }

    pub fn state(&self) -> &SamplerState {
        &self.state
    }
}

impl StreamingAlgorithm for RobustRegressor {
    type Update = Vec<Vec<f64>>;
    type Response = RegressionResponse;

    fn seed(&self) -> u64 {
        self.state.config().seed
    }

    fn update(&mut self, batch: &Vec<Vec<f64>>) -> Result<RegressionResponse> {
        for row in batch {
            self.state.process_row(&RowVector::new(row.clone())?)?;
        }
        Ok(RegressionResponse {
            coefficients: self.state.regress()?.coefficients.into_inner(),
            stored_rows: self.state.sample_count(),
        })
    }
}

pub struct SgdBaseline {
    sgd: SgdRegressor,
    seed: u64,
}

impl StreamingAlgorithm for SgdBaseline {
    type Update = Vec<Vec<f64>>;
    type Response = RegressionResponse;

    fn seed(&self) -> u64 {
        self.seed
    }

    fn update(&mut self, batch: &Vec<Vec<f64>>) -> Result<RegressionResponse> {
        self.sgd.update(batch)?;
        Ok(RegressionResponse {
            coefficients: self.sgd.coefficients.clone(),
            stored_rows: 0,
        })
    }
}

pub struct SketchBaseline {
    sketch: SignSketch,
    seed: u64,
}

impl StreamingAlgorithm for SketchBaseline {
    type Update = Vec<Vec<f64>>;
    type Response = RegressionResponse;

    fn seed(&self) -> u64 {
        self.seed
    }

    fn update(&mut self, batch: &Vec<Vec<f64>>) -> Result<RegressionResponse> {
        for row in batch {
            self.sketch.absorb(row)?;
        }
        Ok(RegressionResponse {
            coefficients: self.sketch.sketch_regress()?.coefficients.into_inner(),
            stored_rows: self.sketch.m(),
        })
    }
}

/// Merge-and-reduce coreset with a weighted Lloyd pass on every query.
pub struct RobustKMeans {
    tree: CoresetTree,
    k: usize,
    z: u32,
}

impl StreamingAlgorithm for RobustKMeans {
    type Update = Vec<Vec<f64>>;
    type Response = ClusterResponse;

    fn seed(&self) -> u64 {
        self.tree.config().seed
    }

    fn update(&mut self, batch: &Vec<Vec<f64>>) -> Result<ClusterResponse> {
        for p in batch {
            self.tree.insert(WeightedPoint::unit(p.clone())?)?;
        }
        let coreset = self.tree.query();
        let round = self.tree.points_seen() as u64;
        let fit = lloyd_refine(&coreset, self.k, self.z, self.seed() ^ round)?;
        Ok(ClusterResponse {
            centers: fit.centers,
            stored_points: self.tree.stored(),
        })
    }
}

pub struct DecayBaseline {
    km: DecayKMeans,
    decay: f64,
    seed: u64,
}

impl StreamingAlgorithm for DecayBaseline {
    type Update = Vec<Vec<f64>>;
    type Response = ClusterResponse;

    fn seed(&self) -> u64 {
        self.seed
    }

    fn update(&mut self, batch: &Vec<Vec<f64>>) -> Result<ClusterResponse> {
        self.km.update(batch, self.decay)?;
        Ok(ClusterResponse {
            centers: self.km.centers.clone(),
            stored_points: self.km.k,
        })
    }
}

/// Least-squares coefficients of the full prefix (last column is the target).
pub fn least_squares(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    let width = rows.first().map(Vec::len).ok_or_else(|| invalid("no rows"))?;
    if width < 2 {
        return Err(invalid("rows need a feature and a target"));
    }
    let f = width - 1;
    let mut gxx = DMatrix::zeros(f, f);
    let mut gxb = DVector::zeros(f);
    for r in rows {
        for i in 0..f {
            gxb[i] += r[i] * r[f];
            for j in 0..f {
                gxx[(i, j)] += r[i] * r[j];
            }
        }
    }
    Ok(solve_normal_equations(gxx, gxb)?.coefficients.into_inner())
}

fn regression_evaluator() -> impl FnMut(usize, &Vec<Vec<f64>>, &RegressionResponse) -> BTreeMap<String, f64> {
    let mut prefix: Vec<Vec<f64>> = Vec::new();
    move |_, batch, resp| {
        prefix.extend(batch.iter().cloned());
        let mut m = BTreeMap::new();
        m.insert("loss".into(), mean_squared_residual(&prefix, &resp.coefficients));
        m.insert("stored".into(), resp.stored_rows as f64);
        if let Ok(opt) = least_squares(&prefix) {
            m.insert("optimal_loss".into(), mean_squared_residual(&prefix, &opt));
            if opt.len() == 1 {
                m.insert("optimal_slope".into(), opt[0]);
            }
        }
        if resp.coefficients.len() == 1 {
            m.insert("slope".into(), resp.coefficients[0]);
        }
        m
    }
}

fn cluster_evaluator(
    z: u32,
) -> impl FnMut(usize, &Vec<Vec<f64>>, &ClusterResponse) -> BTreeMap<String, f64> {
    let mut prefix: Vec<WeightedPoint> = Vec::new();
    move |_, batch, resp| {
        prefix.extend(batch.iter().filter_map(|p| WeightedPoint::unit(p.clone()).ok()));
        let mut m = BTreeMap::new();
        let cost = kz_cost(&prefix, &resp.centers, z) / prefix.len().max(1) as f64;
        m.insert("cost_per_point".into(), cost);
        m.insert("stored".into(), resp.stored_points as f64);
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFlipConfig {
    pub batches: usize,
    pub batch_size: usize,
    /// Distance of the final batch; `None` means `10·√batches`.
    pub l: Option<f64>,
    pub step: f64,
    pub eps: f64,
    pub c: f64,
    pub seed_algorithm: u64,
    pub seed_adversary: u64,
}

impl Default for RegressionFlipConfig {
    fn default() -> Self {
        Self {
            batches: 20,
            batch_size: 50,
            l: None,
            step: 0.02,
            eps: 0.5,
            c: DEFAULT_C_L2,
            seed_algorithm: 1,
            seed_adversary: 2,
        }
    }
}

impl RegressionFlipConfig {
    pub fn effective_l(&self) -> f64 {
        self.l.unwrap_or(10.0 * (self.batches as f64).sqrt())
    }
}

/// Robust sampler and online SGD on the regression-flip stream.
pub fn regression_flip(cfg: &RegressionFlipConfig) -> Result<ScenarioReport> {
    let l = cfg.effective_l();
    let stream = regression_flip_stream(cfg.batches, cfg.batch_size, l, cfg.seed_adversary)?;
    let n = cfg.batches * cfg.batch_size;
    let mut report = ScenarioReport::new("regression-flip", stream.clone());

    let sampler_cfg = SamplerConfig::new(2, cfg.eps, n, cfg.seed_algorithm).with_c(cfg.c);
    let mut robust = RobustRegressor::new(sampler_cfg, 2)?;
    let mut adv = ScriptedAdversary::new(stream.clone(), cfg.seed_adversary);
    let out = run_game(&mut robust, &mut adv, cfg.batches, regression_evaluator())?;
    report.absorb_transcript("robust", out.transcript);
    for w in robust.state().warnings() {
        report.warnings.push(format!("robust sampler at row {}: {}", w.round + 1, w.message));
    }

    let mut sgd = SgdBaseline {
        sgd: SgdRegressor::new(1, cfg.step)?,
        seed: cfg.seed_algorithm,
    };
    let mut adv = ScriptedAdversary::new(stream, cfg.seed_adversary);
    let out = run_game(&mut sgd, &mut adv, cfg.batches, regression_evaluator())?;
    report.absorb_transcript("baseline", out.transcript);
    report.flags.insert("baseline_diverged".into(), sgd.sgd.diverged);

    report.finals.insert("l".into(), l);
    for (key, series) in [
        ("robust_slope", "robust_slope"),
        ("baseline_slope", "baseline_slope"),
        ("optimal_slope", "robust_optimal_slope"),
        ("robust_loss", "robust_loss"),
        ("baseline_loss", "baseline_loss"),
    ] {
        if let Some(v) = report.final_value(series) {
            report.finals.insert(key.into(), v);
        }
    }
    report
        .finals
        .insert("robust_samples".into(), robust.state().sample_count() as f64);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistantClusterConfig {
    pub batches: usize,
    pub batch_size: usize,
    pub l: f64,
    pub k: usize,
    pub z: u32,
    pub eps: f64,
    pub leaf_size: usize,
    pub decay: f64,
    pub seed_algorithm: u64,
    pub seed_adversary: u64,
}

impl Default for DistantClusterConfig {
    fn default() -> Self {
        Self {
            batches: 200,
            batch_size: 10,
            l: 100.0,
            k: 2,
            z: 2,
            eps: 0.3,
            leaf_size: 256,
            decay: 1.0,
            seed_algorithm: 1,
            seed_adversary: 2,
        }
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Merge-and-reduce k-means and decayed streaming k-means on the distant-cluster stream.
pub fn distant_cluster(cfg: &DistantClusterConfig) -> Result<ScenarioReport> {
    let stream = distant_cluster_stream(cfg.batches, cfg.batch_size, cfg.l, cfg.seed_adversary)?;
    let n = cfg.batches * cfg.batch_size;
    let mut report = ScenarioReport::new("distant-cluster", stream.clone());
    let target = [cfg.l, cfg.l];

    let ccfg = ClusteringConfig::new(cfg.k, cfg.z, cfg.eps, cfg.leaf_size, n, cfg.seed_algorithm);
    let mut robust = RobustKMeans {
        tree: CoresetTree::new(ccfg)?,
        k: cfg.k,
        z: cfg.z,
    };
    let mut adv = ScriptedAdversary::new(stream.clone(), cfg.seed_adversary);
    let out = run_game(&mut robust, &mut adv, cfg.batches, cluster_evaluator(cfg.z))?;
    let robust_centers = out.responses.last().map(|r| r.centers.clone()).unwrap_or_default();
    report.absorb_transcript("robust", out.transcript);

    let mut decay = DecayBaseline {
        km: DecayKMeans::new(cfg.k)?,
        decay: cfg.decay,
        seed: cfg.seed_algorithm,
    };
    let mut adv = ScriptedAdversary::new(stream, cfg.seed_adversary);
    let out = run_game(&mut decay, &mut adv, cfg.batches, cluster_evaluator(cfg.z))?;
    let baseline_centers = out.responses.last().map(|r| r.centers.clone()).unwrap_or_default();
    report.absorb_transcript("baseline", out.transcript);

    let nearest_far = |cs: &[Vec<f64>]| cs.iter().map(|c| dist(c, &target)).fold(f64::INFINITY, f64::min);
    let farthest_origin = |cs: &[Vec<f64>]| cs.iter().map(|c| dist(c, &[0.0, 0.0])).fold(0.0, f64::max);
    report.finals.insert("robust_far_center_distance".into(), nearest_far(&robust_centers));
    report.finals.insert("baseline_far_center_distance".into(), nearest_far(&baseline_centers));
    report
        .finals
        .insert("robust_max_origin_distance".into(), farthest_origin(&robust_centers));
    report
        .finals
        .insert("baseline_max_origin_distance".into(), farthest_origin(&baseline_centers));
    report
        .finals
        .insert("robust_peak_stored".into(), robust.tree.peak_stored() as f64);
    for (i, c) in robust_centers.iter().enumerate() {
        report.finals.insert(format!("robust_center_{i}_x"), c[0]);
        report.finals.insert(format!("robust_center_{i}_y"), c[1]);
    }
    for (i, c) in baseline_centers.iter().enumerate() {
        report.finals.insert(format!("baseline_center_{i}_x"), c[0]);
        report.finals.insert(format!("baseline_center_{i}_y"), c[1]);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullSpaceConfig {
    pub n: usize,
    pub features: usize,
    pub m: usize,
    pub batches: usize,
    pub eps: f64,
    pub c: f64,
    /// When false the base stream is used unprojected.
    pub attack: bool,
    pub seed_algorithm: u64,
    pub seed_adversary: u64,
}

impl Default for NullSpaceConfig {
    fn default() -> Self {
        Self {
            n: 2000,
            features: 10,
            m: 60,
            batches: 20,
            eps: 0.5,
            c: DEFAULT_C_L2,
            attack: true,
            seed_algorithm: 1,
            seed_adversary: 2,
        }
    }
}

/// Robust sampler and sign-sketch regression on a stream in the sketch's null space.
pub fn sketch_null_space(cfg: &NullSpaceConfig) -> Result<ScenarioReport> {
    if cfg.batches == 0 || cfg.n % cfg.batches != 0 {
        return Err(invalid(format!(
            "n = {} must split evenly into {} batches",
            cfg.n, cfg.batches
        )));
    }
    let batch_size = cfg.n / cfg.batches;
    let width = cfg.features + 1;
    let sketch = SignSketch::new(cfg.m, cfg.n, width, cfg.seed_algorithm);
    let stream = if cfg.attack {
        kernel_attack_stream(&sketch, cfg.batches, batch_size, cfg.seed_adversary)?
    } else {
        gaussian_regression_stream(cfg.batches, batch_size, cfg.features, KERNEL_BASE_NOISE, cfg.seed_adversary)?
    };
    let mut report = ScenarioReport::new("sketch-null-space", stream.clone());
    let scale = flatten(&stream).iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    report.finals.insert("sketch_residual".into(), sketch_residual(&sketch, &stream));
    report.finals.insert("stream_max_abs".into(), scale);

    let sampler_cfg = SamplerConfig::new(2, cfg.eps, cfg.n, cfg.seed_algorithm).with_c(cfg.c);
    let mut robust = RobustRegressor::new(sampler_cfg, width)?;
    let mut adv = ScriptedAdversary::new(stream.clone(), cfg.seed_adversary);
    let out = run_game(&mut robust, &mut adv, cfg.batches, regression_evaluator())?;
    report.absorb_transcript("robust", out.transcript);
    for w in robust.state().warnings() {
        report.warnings.push(format!("robust sampler at row {}: {}", w.round + 1, w.message));
    }

    let mut sk = SketchBaseline {
        sketch,
        seed: cfg.seed_algorithm,
    };
    let mut adv = ScriptedAdversary::new(stream, cfg.seed_adversary);
    let out = run_game(&mut sk, &mut adv, cfg.batches, regression_evaluator())?;
    report.absorb_transcript("baseline", out.transcript);

    let robust_loss = report.final_value("robust_loss").unwrap_or(f64::NAN);
    let baseline_loss = report.final_value("baseline_loss").unwrap_or(f64::NAN);
    report.finals.insert("robust_loss".into(), robust_loss);
    report.finals.insert("baseline_loss".into(), baseline_loss);
    report.finals.insert("loss_ratio".into(), baseline_loss / robust_loss);
    report
        .finals
        .insert("robust_samples".into(), robust.state().sample_count() as f64);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub d: usize,
    pub rounds: usize,
    pub eps: f64,
    pub c: f64,
    pub checkpoint_every: usize,
    pub seed_algorithm: u64,
    pub seed_adversary: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            d: 5,
            rounds: 200,
            eps: 0.5,
            c: DEFAULT_C_L2,
            checkpoint_every: 50,
            seed_algorithm: 1,
            seed_adversary: 2,
        }
    }
}

/// Row sampler against the orthogonal-probe adversary, with the spectral
/// check evaluated at every checkpoint round.
pub fn orthogonal_probe(cfg: &ProbeConfig) -> Result<ScenarioReport> {
    if cfg.checkpoint_every == 0 {
        return Err(invalid("checkpoint interval must be positive"));
    }
    let sampler_cfg = SamplerConfig::new(2, cfg.eps, cfg.rounds, cfg.seed_algorithm).with_c(cfg.c);
    let mut alg = SamplerAlgorithm::new(sampler_cfg, cfg.d)?;
    let mut adv = orthogonal_probe_adversary(cfg.d, cfg.seed_adversary)?;
    let mut prefix: Vec<RowVector> = Vec::new();
    let (eps, every, rounds, d) = (cfg.eps, cfg.checkpoint_every, cfg.rounds, cfg.d);
    let out = run_game(&mut alg, &mut adv, cfg.rounds, |round, row, resp| {
        prefix.push(row.clone());
        let mut m = BTreeMap::new();
        m.insert("prob".into(), resp.decision.prob);
        m.insert("tau".into(), resp.decision.tau);
        m.insert("stored".into(), resp.embedding.len() as f64);
        if round % every == 0 || round == rounds {
            let a = DenseMatrix::from_rows(&prefix, d).expect("rows share the probe dimension");
            let ok = spectral_sandwich_check(&a, &resp.embedding, eps);
            m.insert("sandwich_ok".into(), if ok { 1.0 } else { 0.0 });
        }
        m
    })?;
    let first_certain = out
        .responses
        .iter()
        .take(cfg.d)
        .all(|r| r.decision.prob == 1.0 && !r.decision.in_span);
    let mut report = ScenarioReport::new("orthogonal-probe", vec![prefix.iter().map(|r| r.as_slice().to_vec()).collect()]);
    report.absorb_transcript("robust", out.transcript);
    for w in alg.state().warnings() {
        report.warnings.push(format!("robust sampler at row {}: {}", w.round + 1, w.message));
    }
    let checks = report.series.get("robust_sandwich_ok").cloned().unwrap_or_default();
    report
        .flags
        .insert("sandwich_all_checkpoints".into(), !checks.is_empty() && checks.iter().all(|p| p.1 == 1.0));
    report.flags.insert("first_d_rounds_certain".into(), first_certain);
    report
        .finals
        .insert("samples".into(), alg.state().sample_count() as f64);
    report
        .finals
        .insert("kappa_online".into(), alg.state().diagnostics().kappa_online());
    Ok(report)
}

//! Runs a validated configuration and writes its artifacts.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use robust_stream::adversary::{
    distant_cluster, least_squares, mean_squared_residual, orthogonal_probe, regression_flip,
    sketch_null_space, ScenarioReport,
};
use robust_stream::coreset::{
    kz_cost, lloyd_refine, total_weight, ClusteringConfig, CoresetTree, Passthrough, Reducer,
    SensitivityReducer, WeightedPoint,
};
use robust_stream::graph::{sparsifier_check, SparsifierConfig, SparsifierState, WeightedGraph};
use robust_stream::linalg::{generalized_eigen_range, DenseMatrix, RowVector, SpectralSummary};
use robust_stream::rng::{domain, CounterRng};
use robust_stream::sampler::{SamplerConfig, SamplerState};

use crate::config::{AttackJob, CoresetJob, Job, RowJob, RunConfig, SparsifyJob};
use crate::error::{bad_input, CliResult};
use crate::io::{read_edges, read_rows, write_edges, write_file, write_table};
use crate::report::{to_json_line, write_json, MetricSeries};

/// Environment variable capping the number of threads used by `--trials`.
pub const THREADS_ENV: &str = "ROBUST_STREAM_THREADS";

/// What one run left behind besides its files.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub seed: u64,
    pub dir: PathBuf,
    pub warnings: Vec<String>,
    pub results: Value,
}

#[derive(Serialize)]
struct Summary<'a> {
    subcommand: &'a str,
    trial: usize,
    config: Value,
    results: Value,
    series: Vec<String>,
    warnings: &'a [String],
}

/// Runs every trial and returns the outcomes in seed order.
pub fn execute(cfg: &RunConfig) -> CliResult<Vec<TrialOutcome>> {
    if cfg.trials == 1 {
        return Ok(vec![run_trial(cfg, 0, &cfg.out)?]);
    }
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| crate::error::usage(format!("thread pool: {e}")))?;
    let outcomes: Vec<CliResult<TrialOutcome>> = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(cfg, t, &cfg.out.join(format!("trial_{t:03}"))))
            .collect()
    });
    let outcomes = outcomes.into_iter().collect::<CliResult<Vec<_>>>()?;
    let merged = json!({
        "subcommand": cfg.job.name(),
        "trials": cfg.trials,
        "config": config_echo(cfg, cfg.seed),
        "runs": outcomes
            .iter()
            .enumerate()
            .map(|(t, o)| json!({
                "trial": t,
                "seed": o.seed,
                "dir": format!("trial_{t:03}"),
                "results": o.results,
                "warnings": o.warnings,
            }))
            .collect::<Vec<_>>(),
    });
    write_json(&cfg.out.join("summary.json"), &merged)?;
    Ok(outcomes)
}

fn config_echo(cfg: &RunConfig, seed: u64) -> Value {
    let mut v = serde_json::to_value(&cfg.job).expect("config serializes");
    if let Value::Object(m) = &mut v {
        m.insert("seed".into(), json!(seed));
        m.insert("trials".into(), json!(cfg.trials));
    }
    v
}

struct Artifacts {
    series: Vec<MetricSeries>,
    results: Map<String, Value>,
    warnings: Vec<String>,
    /// Resolved values of defaulted parameters, merged into the config echo.
    resolved: Map<String, Value>,
}

impl Artifacts {
    fn new() -> Self {
        Self {
            series: Vec::new(),
            results: Map::new(),
            warnings: Vec::new(),
            resolved: Map::new(),
        }
    }

    fn result(&mut self, key: &str, v: impl Serialize) {
        self.results.insert(key.into(), serde_json::to_value(v).expect("value serializes"));
    }

    fn resolve(&mut self, key: &str, v: impl Serialize) {
        self.resolved.insert(key.into(), serde_json::to_value(v).expect("value serializes"));
    }
}

fn run_trial(cfg: &RunConfig, trial: usize, dir: &Path) -> CliResult<TrialOutcome> {
    let seed = cfg.seed.wrapping_add(trial as u64);
    let art = match &cfg.job {
        Job::Embed(j) => rows_job(j, RowMode::Embed, seed, dir)?,
        Job::Regress(j) => rows_job(j, RowMode::Regress, seed, dir)?,
        Job::Lowrank { rows, k } => rows_job(rows, RowMode::LowRank(*k), seed, dir)?,
        Job::Coreset(j) => coreset(j, seed, dir)?,
        Job::Sparsify(j) => sparsify(j, seed, dir)?,
        Job::Attack(j) => attack(j, trial as u64, dir)?,
    };
    for s in &art.series {
        s.write(dir)?;
    }
    let mut config = config_echo(cfg, seed);
    if let Value::Object(m) = &mut config {
        m.extend(art.resolved);
    }
    let results = Value::Object(art.results);
    let summary = Summary {
        subcommand: cfg.job.name(),
        trial,
        config,
        results: results.clone(),
        series: art.series.iter().map(|s| s.name.clone()).collect(),
        warnings: &art.warnings,
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(TrialOutcome {
        seed,
        dir: dir.to_path_buf(),
        warnings: art.warnings,
        results,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum RowMode {
    Embed,
    Regress,
    LowRank(usize),
}

/// Largest relative L1 distortion over seeded random directions.
fn l1_distortion(a: &[RowVector], m: &robust_stream::linalg::WeightedRowBuffer, seed: u64) -> f64 {
    let d = m.dim();
    let coins = CounterRng::new(seed, domain::GENERATOR);
    let mut worst: f64 = 0.0;
    for t in 0..200u64 {
        let x: Vec<f64> = (0..d as u64).map(|i| 2.0 * coins.uniform(t * d as u64 + i) - 1.0).collect();
        let ax: f64 = a.iter().map(|r| r.dot(&x).abs()).sum();
        let mx: f64 = m.rows().iter().map(|r| r.weight * r.row.dot(&x).abs()).sum();
        if ax > 0.0 {
            worst = worst.max((mx - ax).abs() / ax);
        }
    }
    worst
}

fn rows_job(job: &RowJob, mode: RowMode, seed: u64, dir: &Path) -> CliResult<Artifacts> {
    let raw = read_rows(&job.input)?;
    if raw.is_empty() {
        return Err(bad_input(&job.input, "no rows to stream"));
    }
    let dim = raw[0].len();
    if mode == RowMode::Regress && dim < 2 {
        return Err(bad_input(&job.input, "regression rows need a feature and a target column"));
    }
    let n_bound = job.n_bound.unwrap_or(raw.len());
    if raw.len() > n_bound {
        return Err(bad_input(
            &job.input,
            format!("{} rows exceed --n-bound {n_bound}", raw.len()),
        ));
    }
    let mut scfg = SamplerConfig::new(job.p, job.eps, n_bound, seed).with_c(job.c);
    if let RowMode::LowRank(k) = mode {
        scfg = scfg.ridge(k);
    }
    let mut state = SamplerState::new(scfg, dim)?;
    let mut art = Artifacts::new();
    art.resolve("n_bound", n_bound);
    art.resolve("alpha", state.alpha());

    let mut tau = MetricSeries::new("tau");
    let mut prob = MetricSeries::new("prob");
    let mut stored = MetricSeries::new("stored");
    let mut checks: Vec<MetricSeries> = match mode {
        RowMode::Embed if job.p == 2 => vec!["eig_min", "eig_max", "sandwich_ok"],
        RowMode::Embed => vec!["l1_distortion"],
        RowMode::Regress => vec!["loss", "optimal_loss"],
        RowMode::LowRank(_) => vec!["projection_cost", "optimal_cost"],
    }
    .into_iter()
    .map(MetricSeries::new)
    .collect();

    let mut prefix: Vec<RowVector> = Vec::with_capacity(raw.len());
    let n = raw.len();
    for (i, r) in raw.into_iter().enumerate() {
        let row = RowVector::new(r)?;
        let dec = state.process_row(&row)?;
        prefix.push(row);
        let round = i + 1;
        tau.push(round, dec.tau)?;
        prob.push(round, dec.prob)?;
        stored.push(round, state.sample_count() as f64)?;
        if round % job.report_every != 0 && round != n {
            continue;
        }
        let values: Vec<f64> = match mode {
            RowMode::Embed if job.p == 2 => {
                let a = DenseMatrix::from_rows(&prefix, dim)?;
                let (lo, hi) = generalized_eigen_range(&a, state.buffer()).unwrap_or((1.0, 1.0));
                let ok = lo >= 1.0 - job.eps - 1e-9 && hi <= 1.0 + job.eps + 1e-9;
                vec![lo, hi, if ok { 1.0 } else { 0.0 }]
            }
            RowMode::Embed => vec![l1_distortion(&prefix, state.buffer(), seed)],
            RowMode::Regress => {
                let rows: Vec<Vec<f64>> = prefix.iter().map(|r| r.as_slice().to_vec()).collect();
                match (state.regress(), least_squares(&rows)) {
                    (Ok(fit), Ok(opt)) => vec![
                        mean_squared_residual(&rows, fit.coefficients.as_slice()),
                        mean_squared_residual(&rows, &opt),
                    ],
                    _ => continue,
                }
            }
            RowMode::LowRank(k) => {
                let fit = state.low_rank()?;
                let a = DenseMatrix::from_rows(&prefix, dim)?;
                vec![projection_cost(&prefix, &fit.projection), svd_tail(&a, k)]
            }
        };
        for (s, v) in checks.iter_mut().zip(values) {
            s.push(round, v)?;
        }
    }

    let diag = state.diagnostics();
    art.result("rows", n);
    art.result("dim", dim);
    art.result("samples", state.sample_count());
    art.result("rng_draws", state.rng_cursor());
    art.result("tau_sum", diag.tau_sum);
    art.result("prob_sum", diag.prob_sum);
    art.result("sample_budget", state.alpha() * diag.tau_sum);
    art.result("kappa_online", diag.kappa_online());
    art.result("kappa_running", diag.kappa_running);
    art.result("sigma_min_running", diag.sigma_min_running);
    art.result("sigma_max", diag.sigma_max);
    if job.p == 1 {
        art.result("l1_mass_ratio", diag.l1_ratio());
    }
    for s in &checks {
        if let Some(v) = s.last() {
            art.result(&format!("final_{}", s.name), v);
        }
    }
    match mode {
        RowMode::Embed => {}
        RowMode::Regress => {
            let fit = state.regress()?;
            art.result("coefficients", fit.coefficients.as_slice());
            art.result("regularized", fit.regularized);
        }
        RowMode::LowRank(_) => {
            let fit = state.low_rank()?;
            art.resolve("ridge_lambda", state.ridge_lambda(fit.rank.max(1)));
            let p = &fit.projection;
            let rows: Vec<Vec<f64>> = (0..p.rows()).map(|i| p.row(i).to_vec()).collect();
            art.result("projection", rows);
            art.result("rank", fit.rank);
            art.result("rank_deficient", fit.rank_deficient);
        }
    }
    art.warnings = state
        .warnings()
        .iter()
        .map(|w| format!("round {}: {}", w.round + 1, w.message))
        .collect();

    let mut header = vec!["weight".to_string(), "arrival".to_string()];
    header.extend((0..dim).map(|j| format!("x{j}")));
    let table: Vec<Vec<f64>> = state
        .buffer()
        .rows()
        .iter()
        .map(|r| {
            let mut v = vec![r.weight, r.arrival as f64];
            v.extend_from_slice(r.row.as_slice());
            v
        })
        .collect();
    write_table(&dir.join("embedding.csv"), &header, &table)?;
    write_json(&dir.join("checkpoint.json"), &state.checkpoint())?;

    art.series = vec![tau, prob, stored];
    art.series.extend(checks);
    Ok(art)
}

/// `Σ‖a − P·a‖²` over the rows.
fn projection_cost(rows: &[RowVector], p: &DenseMatrix) -> f64 {
    rows.iter()
        .map(|r| {
            let pa = p.apply(r.as_slice());
            r.as_slice().iter().zip(&pa).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()
        })
        .sum()
}

/// Sum of the squared singular values of `a` beyond the top `k`.
fn svd_tail(a: &DenseMatrix, k: usize) -> f64 {
    SpectralSummary::from_matrix(a).eigen().values.iter().skip(k).map(|v| v.max(0.0)).sum()
}

fn coreset(job: &CoresetJob, seed: u64, dir: &Path) -> CliResult<Artifacts> {
    let raw = read_rows(&job.input)?;
    if raw.is_empty() {
        return Err(bad_input(&job.input, "no points to stream"));
    }
    let n_bound = job.n_bound.unwrap_or(raw.len());
    let mut ccfg = ClusteringConfig::new(job.k, job.z, job.eps, job.leaf_size, n_bound, seed);
    ccfg.delta = job.delta;
    ccfg.c0 = job.c0;
    ccfg.c1 = job.c1;
    ccfg.sample_cap = job.sample_cap;
    if job.lossless {
        run_tree(job, CoresetTree::with_reducer(ccfg, Passthrough)?, raw, seed, dir)
    } else {
        run_tree(job, CoresetTree::with_reducer(ccfg, SensitivityReducer)?, raw, seed, dir)
    }
}

fn run_tree<R: Reducer>(
    job: &CoresetJob,
    mut tree: CoresetTree<R>,
    raw: Vec<Vec<f64>>,
    seed: u64,
    dir: &Path,
) -> CliResult<Artifacts> {
    let mut art = Artifacts::new();
    let cfg = tree.config().clone();
    art.resolve("n_bound", cfg.n_bound);
    art.resolve("max_levels", cfg.max_levels());
    art.resolve("eps_level", cfg.eps_level());
    art.resolve("sample_cap", cfg.effective_cap());
    let dim = raw[0].len();
    art.resolve("d_prime", cfg.d_prime(dim));

    let mut stored = MetricSeries::new("stored");
    let mut cost_ratio = MetricSeries::new("cost_ratio");
    let mut prefix = Vec::with_capacity(raw.len());
    let n = raw.len();
    for (i, coords) in raw.into_iter().enumerate() {
        let p = WeightedPoint::unit(coords)?;
        tree.insert(p.clone())?;
        prefix.push(p);
        let round = i + 1;
        if round % job.report_every != 0 && round != n {
            continue;
        }
        stored.push(round, tree.stored() as f64)?;
        let q = tree.query();
        let fit = lloyd_refine(&q, job.k, job.z, seed)?;
        let full = kz_cost(&prefix, &fit.centers, job.z);
        let ratio = if full > 0.0 { kz_cost(&q, &fit.centers, job.z) / full } else { 1.0 };
        cost_ratio.push(round, ratio)?;
    }

    let q = tree.query();
    let fit = lloyd_refine(&q, job.k, job.z, seed)?;
    let full_cost = kz_cost(&prefix, &fit.centers, job.z);
    art.result("points", n);
    art.result("dim", dim);
    art.result("coreset_size", q.len());
    art.result("coreset_weight", total_weight(&q));
    art.result("peak_stored", tree.peak_stored());
    art.result("occupied_levels", tree.occupied_levels());
    art.result("centers", &fit.centers);
    art.result("coreset_cost", fit.cost);
    art.result("full_cost", full_cost);
    art.result("cost_ratio", if full_cost > 0.0 { kz_cost(&q, &fit.centers, job.z) / full_cost } else { 1.0 });
    if fit.duplicate_centers {
        art.warnings.push(format!("fewer than {} distinct coreset points", job.k));
    }

    let mut header = vec!["weight".to_string()];
    header.extend((0..dim).map(|j| format!("x{j}")));
    let table: Vec<Vec<f64>> = q
        .iter()
        .map(|p| std::iter::once(p.weight).chain(p.coords.iter().copied()).collect())
        .collect();
    write_table(&dir.join("coreset.csv"), &header, &table)?;
    art.series = vec![stored, cost_ratio];
    Ok(art)
}

fn sparsify(job: &SparsifyJob, seed: u64, dir: &Path) -> CliResult<Artifacts> {
    let file = read_edges(&job.input)?;
    if file.edges.is_empty() {
        return Err(bad_input(&job.input, "no edges to stream"));
    }
    let n = job
        .vertices
        .or(file.header.map(|h| h.0))
        .unwrap_or_else(|| file.span());
    if file.span() > n {
        return Err(bad_input(
            &job.input,
            format!("endpoint {} outside {n} vertices", file.span() - 1),
        ));
    }
    let scfg = SparsifierConfig::new(n, job.m_bound, job.eps, seed).with_c(job.c);
    let mut state = SparsifierState::new(scfg)?;
    let mut art = Artifacts::new();
    art.resolve("vertices", n);
    art.resolve("rho", state.rho());

    let mut prob = MetricSeries::new("prob");
    let mut kept = MetricSeries::new("kept");
    let mut conn = MetricSeries::new("connectivity");
    for e in &file.edges {
        let dec = state.process_edge(*e)?;
        let round = dec.index + 1;
        prob.push(round, dec.prob)?;
        kept.push(round, state.kept().len() as f64)?;
        if let Some(c) = dec.connectivity {
            conn.push(round, c)?;
        }
    }
    let g = WeightedGraph::new(n, file.edges.clone())?;
    let h = state.sparsifier();
    let report = sparsifier_check(&g, &h, job.eps, job.check_trials, seed);
    art.result("edges", file.edges.len());
    art.result("kept", state.kept().len());
    art.result("rng_draws", state.rng_cursor());
    art.result("g_weight", g.total_weight());
    art.result("h_weight", h.total_weight());
    art.result("edge_budget", state.edge_budget(report.kappa()));
    art.result("cut_check", &report);
    art.result("cut_check_passed", report.passed());
    let edges: Vec<(usize, usize, f64)> = state.kept().iter().map(|k| (k.edge.u, k.edge.v, k.weight())).collect();
    write_edges(&dir.join("sparsifier.txt"), n, &edges)?;
    art.series = vec![prob, kept, conn];
    Ok(art)
}

fn attack(job: &AttackJob, trial: u64, dir: &Path) -> CliResult<Artifacts> {
    let shift = |s: u64| s.wrapping_add(trial);
    let mut art = Artifacts::new();
    let report = match job {
        AttackJob::RegressionFlip(c) => {
            let mut c = c.clone();
            c.seed_algorithm = shift(c.seed_algorithm);
            c.seed_adversary = shift(c.seed_adversary);
            art.resolve("l", c.effective_l());
            art.resolve("seed_algorithm", c.seed_algorithm);
            art.resolve("seed_adversary", c.seed_adversary);
            regression_flip(&c)?
        }
        AttackJob::DistantCluster(c) => {
            let mut c = c.clone();
            c.seed_algorithm = shift(c.seed_algorithm);
            c.seed_adversary = shift(c.seed_adversary);
            art.resolve("seed_algorithm", c.seed_algorithm);
            art.resolve("seed_adversary", c.seed_adversary);
            distant_cluster(&c)?
        }
        AttackJob::SketchNullSpace(c) => {
            let mut c = c.clone();
            c.seed_algorithm = shift(c.seed_algorithm);
            c.seed_adversary = shift(c.seed_adversary);
            art.resolve("seed_algorithm", c.seed_algorithm);
            art.resolve("seed_adversary", c.seed_adversary);
            sketch_null_space(&c)?
        }
        AttackJob::OrthogonalProbe(c) => {
            let mut c = c.clone();
            c.seed_algorithm = shift(c.seed_algorithm);
            c.seed_adversary = shift(c.seed_adversary);
            art.resolve("seed_algorithm", c.seed_algorithm);
            art.resolve("seed_adversary", c.seed_adversary);
            orthogonal_probe(&c)?
        }
    };
    write_scenario(&report, &mut art, dir)?;
    Ok(art)
}

fn write_scenario(report: &ScenarioReport, art: &mut Artifacts, dir: &Path) -> CliResult<()> {
    for (name, points) in &report.series {
        art.series.push(MetricSeries::from_points(name.clone(), points.clone())?);
    }
    art.result("scenario", &report.scenario);
    for (k, v) in &report.finals {
        art.result(k, v);
    }
    for (k, v) in &report.flags {
        art.result(k, v);
    }
    for (name, t) in &report.transcripts {
        art.result(&format!("{name}_complete"), t.is_complete());
        let mut out = Vec::new();
        out.extend(to_json_line(&json!({
            "seed_algorithm": t.seed_algorithm,
            "seed_adversary": t.seed_adversary,
            "horizon": t.horizon,
            "aborted": t.aborted,
        })));
        for r in &t.rounds {
            out.extend(to_json_line(r));
        }
        write_file(&dir.join(format!("transcript_{name}.jsonl")), &out)?;
    }
    art.warnings.extend(report.warnings.iter().cloned());

    let width = report.stream.iter().flatten().map(Vec::len).max().unwrap_or(0);
    let mut header = vec!["batch".to_string()];
    header.extend((0..width).map(|j| format!("x{j}")));
    let rows: Vec<Vec<f64>> = report
        .stream
        .iter()
        .enumerate()
        .flat_map(|(b, batch)| {
            batch
                .iter()
                .map(move |r| std::iter::once((b + 1) as f64).chain(r.iter().copied()).collect())
        })
        .collect();
    write_table(&dir.join("stream.csv"), &header, &rows)
}

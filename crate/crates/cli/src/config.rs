//! Command-line parsing and validation.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use robust_stream::adversary::{
    DistantClusterConfig, NullSpaceConfig, ProbeConfig, RegressionFlipConfig,
};
use robust_stream::coreset::{DEFAULT_C0, DEFAULT_C1};
use robust_stream::graph::DEFAULT_C as DEFAULT_C_GRAPH;
use robust_stream::sampler::{DEFAULT_C_L1, DEFAULT_C_L2};

use crate::error::{usage, CliError, CliResult};
use crate::io::peek_edge_header;

#[derive(Parser, Debug)]
#[command(
    name = "robust-stream",
    version,
    about = "Run adversarially robust streaming algorithms and write metric reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a subspace embedding from a row CSV
    Embed(EmbedArgs),
    /// Least squares on sampled rows (last column is the target)
    Regress(EmbedArgs),
    /// Rank-k projection from ridge-leverage sampled rows
    Lowrank(LowRankArgs),
    /// Merge-and-reduce k-means / k-median coreset of a point CSV
    Coreset(CoresetArgs),
    /// Cut sparsifier of an edge list
    Sparsify(SparsifyArgs),
    /// Play a canned attack against the robust algorithm and its baseline
    Attack(AttackArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Directory receiving the artifacts
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed of the algorithm's randomness
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent runs with seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    trials: usize,
}

#[derive(Args, Debug, Clone)]
struct RowArgs {
    /// Row CSV, one row per line
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Bound on the stream length (default: number of input rows)
    #[arg(long)]
    n_bound: Option<usize>,
    /// Oversampling constant C (default 40 for p = 2, 80 for p = 1)
    #[arg(long)]
    c: Option<f64>,
    /// Rounds between checkpoint evaluations
    #[arg(long, default_value_t = 50)]
    report_every: usize,
}

#[derive(Args, Debug)]
struct EmbedArgs {
    #[command(flatten)]
    rows: RowArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct LowRankArgs {
    #[command(flatten)]
    rows: RowArgs,
    /// Target rank
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct CoresetArgs {
    /// Point CSV, one point per line
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    /// 1 for k-median, 2 for k-means
    #[arg(long, default_value_t = 2)]
    z: u32,
    #[arg(long, default_value_t = 0.3)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 256)]
    leaf_size: usize,
    /// Bound on the stream length (default: number of input points)
    #[arg(long)]
    n_bound: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_C0)]
    c0: f64,
    #[arg(long, default_value_t = DEFAULT_C1)]
    c1: f64,
    /// Largest reduce output (default: the leaf size)
    #[arg(long)]
    sample_cap: Option<usize>,
    /// Keep every point instead of sampling
    #[arg(long)]
    lossless: bool,
    /// Points between checkpoint evaluations
    #[arg(long, default_value_t = 256)]
    report_every: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SparsifyArgs {
    /// Edge list: optional `n m_bound` header, then `u v [w]` per line
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Constant in the sampling level rho
    #[arg(long, default_value_t = DEFAULT_C_GRAPH)]
    c: f64,
    /// Bound on the number of streamed edges (default: from the header)
    #[arg(long)]
    n_bound: Option<usize>,
    /// Vertex count (default: header, else largest endpoint + 1)
    #[arg(long)]
    vertices: Option<usize>,
    /// Random cuts checked when the graph is too large for enumeration
    #[arg(long, default_value_t = 2000)]
    check_trials: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    RegressionFlip,
    DistantCluster,
    SketchNullSpace,
    OrthogonalProbe,
}

#[derive(Args, Debug)]
struct AttackArgs {
    #[arg(long, value_enum)]
    scenario: Scenario,
    /// Attack strength: distance of the final batch, or `auto`; 0 is the null attack
    #[arg(long = "L", default_value = "auto")]
    l: String,
    #[arg(long)]
    batches: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    /// Oversampling constant of the row sampler
    #[arg(long)]
    c: Option<f64>,
    /// SGD step of the regression baseline
    #[arg(long)]
    step: Option<f64>,
    /// Forgetting factor of the decayed k-means baseline
    #[arg(long)]
    decay: Option<f64>,
    #[arg(long)]
    leaf_size: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    z: Option<u32>,
    /// Rows of the sign sketch
    #[arg(long)]
    sketch_m: Option<usize>,
    /// Feature columns of the null-space stream
    #[arg(long)]
    features: Option<usize>,
    /// Stream length of the null-space attack
    #[arg(long)]
    n: Option<usize>,
    /// Dimension of the orthogonal probe
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    checkpoint_every: Option<usize>,
    /// Seed of the adversary (default: seed + 1)
    #[arg(long)]
    seed_adversary: Option<u64>,
    #[command(flatten)]
    common: Common,
}

/// Parameters of the row-sampler subcommands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowJob {
    pub input: PathBuf,
    pub p: u32,
    pub eps: f64,
    pub c: f64,
    pub n_bound: Option<usize>,
    pub report_every: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoresetJob {
    pub input: PathBuf,
    pub k: usize,
    pub z: u32,
    pub eps: f64,
    pub delta: f64,
    pub leaf_size: usize,
    pub n_bound: Option<usize>,
    pub c0: f64,
    pub c1: f64,
    pub sample_cap: Option<usize>,
    pub lossless: bool,
    pub report_every: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparsifyJob {
    pub input: PathBuf,
    pub eps: f64,
    pub c: f64,
    pub m_bound: usize,
    pub vertices: Option<usize>,
    pub check_trials: u64,
}

/// A fully specified attack scenario; seeds are those of trial 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "scenario", rename_all = "kebab-case")]
pub enum AttackJob {
    RegressionFlip(RegressionFlipConfig),
    DistantCluster(DistantClusterConfig),
    SketchNullSpace(NullSpaceConfig),
    OrthogonalProbe(ProbeConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
pub enum Job {
    Embed(RowJob),
    Regress(RowJob),
    Lowrank {
        #[serde(flatten)]
        rows: RowJob,
        k: usize,
    },
    Coreset(CoresetJob),
    Sparsify(SparsifyJob),
    Attack(AttackJob),
}

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::Embed(_) => "embed",
            Job::Regress(_) => "regress",
            Job::Lowrank { .. } => "lowrank",
            Job::Coreset(_) => "coreset",
            Job::Sparsify(_) => "sparsify",
            Job::Attack(_) => "attack",
        }
    }
}

/// A validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub job: Job,
    pub out: PathBuf,
    pub seed: u64,
    pub trials: usize,
}

fn check(ok: bool, flag: &str, msg: impl std::fmt::Display) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(usage(format!("invalid value for --{flag}: {msg}")))
    }
}

fn check_eps(eps: f64) -> CliResult<()> {
    check(eps > 0.0 && eps < 1.0, "eps", format!("{eps} must lie in (0, 1)"))
}

fn check_positive(x: f64, flag: &str) -> CliResult<()> {
    check(x > 0.0 && x.is_finite(), flag, format!("{x} must be positive"))
}

fn check_count(x: usize, flag: &str) -> CliResult<()> {
    check(x > 0, flag, "must be at least 1")
}

fn check_input(path: &Path) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(usage(format!("missing input: --input {} is not a readable file", path.display())))
    }
}

fn common(c: &Common) -> CliResult<()> {
    check_count(c.trials, "trials")
}

fn row_job(a: RowArgs) -> CliResult<RowJob> {
    check_input(&a.input)?;
    check(a.p == 1 || a.p == 2, "p", format!("{} must be 1 or 2", a.p))?;
    check_eps(a.eps)?;
    let c = a.c.unwrap_or(if a.p == 1 { DEFAULT_C_L1 } else { DEFAULT_C_L2 });
    check_positive(c, "c")?;
    if let Some(n) = a.n_bound {
        check_count(n, "n-bound")?;
    }
    check_count(a.report_every, "report-every")?;
    Ok(RowJob {
        input: a.input,
        p: a.p,
        eps: a.eps,
        c,
        n_bound: a.n_bound,
        report_every: a.report_every,
    })
}

fn coreset_job(a: CoresetArgs) -> CliResult<CoresetJob> {
    check_input(&a.input)?;
    check_count(a.k, "k")?;
    check(a.z == 1 || a.z == 2, "z", format!("{} must be 1 or 2", a.z))?;
    check_eps(a.eps)?;
    check(a.delta > 0.0 && a.delta < 1.0, "delta", format!("{} must lie in (0, 1)", a.delta))?;
    check_count(a.leaf_size, "leaf-size")?;
    if let Some(n) = a.n_bound {
        check_count(n, "n-bound")?;
    }
    check_positive(a.c0, "c0")?;
    check_positive(a.c1, "c1")?;
    if let Some(s) = a.sample_cap {
        check_count(s, "sample-cap")?;
    }
    check_count(a.report_every, "report-every")?;
    Ok(CoresetJob {
        input: a.input,
        k: a.k,
        z: a.z,
        eps: a.eps,
        delta: a.delta,
        leaf_size: a.leaf_size,
        n_bound: a.n_bound,
        c0: a.c0,
        c1: a.c1,
        sample_cap: a.sample_cap,
        lossless: a.lossless,
        report_every: a.report_every,
    })
}

fn sparsify_job(a: SparsifyArgs) -> CliResult<SparsifyJob> {
    check_input(&a.input)?;
    check_eps(a.eps)?;
    check_positive(a.c, "c")?;
    let header = peek_edge_header(&a.input)?;
    let m_bound = match (a.n_bound, header) {
        (Some(m), _) => m,
        (None, Some((_, m))) => m,
        (None, None) => {
            return Err(usage(format!(
                "missing --n-bound: {} has no `n m_bound` header line",
                a.input.display()
            )))
        }
    };
    check_count(m_bound, "n-bound")?;
    if let Some(v) = a.vertices {
        check(v >= 2, "vertices", format!("{v} must be at least 2"))?;
    }
    Ok(SparsifyJob {
        input: a.input,
        eps: a.eps,
        c: a.c,
        m_bound,
        vertices: a.vertices,
        check_trials: a.check_trials,
    })
}

/// `auto` or a finite nonnegative number.
fn parse_l(s: &str) -> CliResult<Option<f64>> {
    if s == "auto" {
        return Ok(None);
    }
    let v: f64 = s
        .parse()
        .map_err(|_| usage(format!("invalid value for --L: `{s}` is neither `auto` nor a number")))?;
    check(v >= 0.0 && v.is_finite(), "L", format!("{v} must be finite and nonnegative"))?;
    Ok(Some(v))
}

fn reject_unused(a: &AttackArgs, allowed: &[&str]) -> CliResult<()> {
    let given = [
        ("batches", a.batches.is_some()),
        ("batch-size", a.batch_size.is_some()),
        ("eps", a.eps.is_some()),
        ("c", a.c.is_some()),
        ("step", a.step.is_some()),
        ("decay", a.decay.is_some()),
        ("leaf-size", a.leaf_size.is_some()),
        ("k", a.k.is_some()),
        ("z", a.z.is_some()),
        ("sketch-m", a.sketch_m.is_some()),
        ("features", a.features.is_some()),
        ("n", a.n.is_some()),
        ("dim", a.dim.is_some()),
        ("rounds", a.rounds.is_some()),
        ("checkpoint-every", a.checkpoint_every.is_some()),
    ];
    for (flag, set) in given {
        if set && !allowed.contains(&flag) {
            return Err(usage(format!("--{flag} does not apply to scenario {:?}", a.scenario)));
        }
    }
    Ok(())
}

fn attack_job(a: AttackArgs, seed: u64) -> CliResult<AttackJob> {
    let l = parse_l(&a.l)?;
    let seed_adversary = a.seed_adversary.unwrap_or(seed.wrapping_add(1));
    let job = match a.scenario {
        Scenario::RegressionFlip => {
            reject_unused(&a, &["batches", "batch-size", "eps", "c", "step"])?;
            let d = RegressionFlipConfig::default();
            let cfg = RegressionFlipConfig {
                batches: a.batches.unwrap_or(d.batches),
                batch_size: a.batch_size.unwrap_or(d.batch_size),
                l,
                step: a.step.unwrap_or(d.step),
                eps: a.eps.unwrap_or(d.eps),
                c: a.c.unwrap_or(d.c),
                seed_algorithm: seed,
                seed_adversary,
            };
            check(cfg.batches >= 2, "batches", "needs at least 2 batches")?;
            check_count(cfg.batch_size, "batch-size")?;
            check(cfg.step >= 0.0 && cfg.step.is_finite(), "step", "must be nonnegative")?;
            check_eps(cfg.eps)?;
            check_positive(cfg.c, "c")?;
            AttackJob::RegressionFlip(cfg)
        }
        Scenario::DistantCluster => {
            reject_unused(&a, &["batches", "batch-size", "eps", "decay", "leaf-size", "k", "z"])?;
            let d = DistantClusterConfig::default();
            let cfg = DistantClusterConfig {
                batches: a.batches.unwrap_or(d.batches),
                batch_size: a.batch_size.unwrap_or(d.batch_size),
                l: l.unwrap_or(d.l),
                k: a.k.unwrap_or(d.k),
                z: a.z.unwrap_or(d.z),
                eps: a.eps.unwrap_or(d.eps),
                leaf_size: a.leaf_size.unwrap_or(d.leaf_size),
                decay: a.decay.unwrap_or(d.decay),
                seed_algorithm: seed,
                seed_adversary,
            };
            check(cfg.batches >= 2, "batches", "needs at least 2 batches")?;
            check_count(cfg.batch_size, "batch-size")?;
            check_count(cfg.k, "k")?;
            check(cfg.z == 1 || cfg.z == 2, "z", format!("{} must be 1 or 2", cfg.z))?;
            check_eps(cfg.eps)?;
            check_count(cfg.leaf_size, "leaf-size")?;
            check((0.0..=1.0).contains(&cfg.decay), "decay", format!("{} must lie in [0, 1]", cfg.decay))?;
            AttackJob::DistantCluster(cfg)
        }
        Scenario::SketchNullSpace => {
            reject_unused(&a, &["batches", "eps", "c", "sketch-m", "features", "n"])?;
            let d = NullSpaceConfig::default();
            let cfg = NullSpaceConfig {
                n: a.n.unwrap_or(d.n),
                features: a.features.unwrap_or(d.features),
                m: a.sketch_m.unwrap_or(d.m),
                batches: a.batches.unwrap_or(d.batches),
                eps: a.eps.unwrap_or(d.eps),
                c: a.c.unwrap_or(d.c),
                attack: l != Some(0.0),
                seed_algorithm: seed,
                seed_adversary,
            };
            check_count(cfg.batches, "batches")?;
            check(
                cfg.n % cfg.batches == 0,
                "n",
                format!("{} must split evenly into {} batches", cfg.n, cfg.batches),
            )?;
            check_count(cfg.features, "features")?;
            check(
                cfg.m >= 1 && cfg.m < cfg.n,
                "sketch-m",
                format!("{} must lie in [1, n)", cfg.m),
            )?;
            check_eps(cfg.eps)?;
            check_positive(cfg.c, "c")?;
            AttackJob::SketchNullSpace(cfg)
        }
        Scenario::OrthogonalProbe => {
            reject_unused(&a, &["eps", "c", "dim", "rounds", "checkpoint-every"])?;
            check(l.is_none(), "L", "the orthogonal probe has no strength parameter")?;
            let d = ProbeConfig::default();
            let cfg = ProbeConfig {
                d: a.dim.unwrap_or(d.d),
                rounds: a.rounds.unwrap_or(d.rounds),
                eps: a.eps.unwrap_or(d.eps),
                c: a.c.unwrap_or(d.c),
                checkpoint_every: a.checkpoint_every.unwrap_or(d.checkpoint_every),
                seed_algorithm: seed,
                seed_adversary,
            };
            check_count(cfg.d, "dim")?;
            check_count(cfg.rounds, "rounds")?;
            check_count(cfg.checkpoint_every, "checkpoint-every")?;
            check_eps(cfg.eps)?;
            check_positive(cfg.c, "c")?;
            AttackJob::OrthogonalProbe(cfg)
        }
    };
    Ok(job)
}

/// Outcome of argument parsing.
#[derive(Debug)]
pub enum Parsed {
    Run(RunConfig),
    /// `--help` or `--version`: text to print, then exit successfully.
    Info(String),
}

/// Parses `argv` (including the program name) and validates every parameter
/// before any work is done.
pub fn parse_and_validate<I, T>(argv: I) -> CliResult<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse(argv)? {
        Parsed::Run(cfg) => Ok(cfg),
        Parsed::Info(text) => Err(CliError::Usage(text)),
    }
}

pub fn parse<I, T>(argv: I) -> CliResult<Parsed>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(Parsed::Info(e.to_string())),
                _ => Err(usage(e.to_string().trim_end())),
            };
        }
    };
    let (job, c) = match cli.command {
        Command::Embed(a) => {
            common(&a.common)?;
            (Job::Embed(row_job(a.rows)?), a.common)
        }
        Command::Regress(a) => {
            common(&a.common)?;
            check(a.rows.p == 2, "p", "regression needs p = 2")?;
            (Job::Regress(row_job(a.rows)?), a.common)
        }
        Command::Lowrank(a) => {
            common(&a.common)?;
            check(a.rows.p == 2, "p", "low-rank projection needs p = 2")?;
            check_count(a.k, "k")?;
            (
                Job::Lowrank {
                    rows: row_job(a.rows)?,
                    k: a.k,
                },
                a.common,
            )
        }
        Command::Coreset(a) => {
            common(&a.common)?;
            let c = a.common.clone();
            (Job::Coreset(coreset_job(a)?), c)
        }
        Command::Sparsify(a) => {
            common(&a.common)?;
            let c = a.common.clone();
            (Job::Sparsify(sparsify_job(a)?), c)
        }
        Command::Attack(a) => {
            common(&a.common)?;
            let c = a.common.clone();
            (Job::Attack(attack_job(a, c.seed)?), c)
        }
    };
    Ok(Parsed::Run(RunConfig {
        job,
        out: c.out,
        seed: c.seed,
        trials: c.trials,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_file(contents: &str) -> (tempfile::TempDir, String) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("in.txt");
        std::fs::write(&p, contents).unwrap();
        let s = p.to_str().unwrap().to_string();
        (dir, s)
    }

    fn args(line: &str, input: &str) -> Vec<String> {
        std::iter::once("robust-stream".to_string())
            .chain(line.split_whitespace().map(|t| t.replace("INPUT", input)))
            .collect()
    }

    #[test]
    fn embed_example_is_valid() {
        let (_d, p) = with_file("1,2\n");
        let cfg = parse_and_validate(args("embed --eps 0.5 --p 2 --n-bound 1000 --seed 7 --input INPUT", &p)).unwrap();
        assert_eq!(cfg.seed, 7);
        let Job::Embed(j) = cfg.job else { panic!() };
        assert_eq!((j.p, j.eps, j.c, j.n_bound), (2, 0.5, DEFAULT_C_L2, Some(1000)));
    }

    #[test]
    fn out_of_range_names_the_flag() {
        let (_d, p) = with_file("1,2\n");
        let e = parse_and_validate(args("embed --eps 1.5 --input INPUT", &p)).unwrap_err();
        assert!(e.to_string().contains("--eps"), "{e}");
        let e = parse_and_validate(args("coreset --k 0 --input INPUT", &p)).unwrap_err();
        assert!(e.to_string().contains("--k"), "{e}");
        let e = parse_and_validate(args("embed --bogus 1 --input INPUT", &p)).unwrap_err();
        assert!(e.to_string().contains("--bogus"), "{e}");
    }

    #[test]
    fn missing_input_is_reported() {
        let e = parse_and_validate(args("embed --input /nonexistent/rows.csv", "")).unwrap_err();
        assert!(e.to_string().contains("missing input"), "{e}");
        let e = parse_and_validate(args("embed", "")).unwrap_err();
        assert!(e.to_string().contains("--input"), "{e}");
    }

    #[test]
    fn sparsify_needs_a_bound() {
        let (_d, p) = with_file("0 1 1\n1 2 1\n");
        let e = parse_and_validate(args("sparsify --input INPUT", &p)).unwrap_err();
        assert!(e.to_string().contains("--n-bound"), "{e}");
        assert!(parse_and_validate(args("sparsify --input INPUT --n-bound 5", &p)).is_ok());
        let (_d, p) = with_file("3 5\n0 1 1\n");
        let cfg = parse_and_validate(args("sparsify --input INPUT", &p)).unwrap();
        let Job::Sparsify(j) = cfg.job else { panic!() };
        assert_eq!(j.m_bound, 5);
    }

    #[test]
    fn attack_strength() {
        let cfg = parse_and_validate(args("attack --scenario regression-flip --L auto", "")).unwrap();
        let Job::Attack(AttackJob::RegressionFlip(f)) = cfg.job else { panic!() };
        assert_eq!(f.effective_l(), 10.0 * 20f64.sqrt());
        assert_eq!(f.seed_adversary, 1);
        let cfg = parse_and_validate(args("attack --scenario sketch-null-space --L 0", "")).unwrap();
        let Job::Attack(AttackJob::SketchNullSpace(s)) = cfg.job else { panic!() };
        assert!(!s.attack);
        assert!(parse_and_validate(args("attack --scenario regression-flip --L -3", "")).is_err());
        assert!(parse_and_validate(args("attack --scenario regression-flip --decay 0.5", "")).is_err());
        assert!(parse_and_validate(args("attack --scenario orthogonal-probe --L 2", "")).is_err());
    }

    #[test]
    fn help_is_not_an_error() {
        assert!(matches!(parse(args("--help", "")).unwrap(), Parsed::Info(_)));
        assert!(parse_and_validate(args("--help", "")).is_err());
    }
}

//! Two-player streaming game, attack streams and non-robust baselines.

mod attacks;
mod baselines;
mod game;
mod probe;
mod scenarios;

pub use attacks::{
    distant_cluster_stream, flatten, gaussian_regression_stream, kernel_attack_stream,
    project_to_null_space, regression_flip_stream, sketch_residual, BatchStream, CONSTELLATION,
    CONSTELLATION_NOISE, KERNEL_BASE_NOISE,
};
pub use baselines::{mean_squared_residual, DecayKMeans, SgdRegressor, SignSketch, DIVERGENCE_NORM};
pub use game::{
    digest, run_game, AdversaryStrategy, GameOutcome, GameTranscript, RoundRecord, ScriptedAdversary,
    StreamingAlgorithm,
};
pub use probe::{orthogonal_probe_adversary, EmbeddingResponse, OrthogonalProbe, SamplerAlgorithm, PROBE_JITTER};
pub use scenarios::{
    distant_cluster, least_squares, orthogonal_probe, regression_flip, sketch_null_space,
    ClusterResponse, DecayBaseline, DistantClusterConfig, NullSpaceConfig, ProbeConfig,
    RegressionFlipConfig, RegressionResponse, RobustKMeans, RobustRegressor, ScenarioReport,
    SgdBaseline, SketchBaseline,
};

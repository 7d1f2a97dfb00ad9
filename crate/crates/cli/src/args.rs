use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "roblearn", version, about = "Adversarially robust learning experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RcnAlgo {
    Md,
    Glm,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact robust accuracy of a saved model.
    Certify(RunConfig),
    /// Worst-case perturbation of every example against a saved model.
    Attack(RunConfig),
    /// Robust ERM for homogeneous halfspaces by the ellipsoid method.
    RermEllipsoid(RunConfig),
    /// Boost the margin SVM into a cascade of selective classifiers.
    Roboost(RunConfig),
    /// Cascade boosting on an unlabeled stream labeled by a first model.
    Uroboost(RunConfig),
    /// Boost weighted ERM until the majority vote fits the data.
    AlphaBoost(RunConfig),
    /// Robust learner from a non-robust one, finite perturbation sets.
    Robustify(RunConfig),
    /// Agnostic robust learning by multiplicative weights over perturbations.
    Fms(RunConfig),
    /// Perceptron fed attack witnesses until a clean pass.
    CycleRobust(RunConfig),
    /// Single-pass online-to-batch conversion with the attack oracle.
    OnePass(RunConfig),
    /// Weighted majority over a finite pool against the attack oracle.
    Wm(RunConfig),
    /// Noise-tolerant halfspace training.
    RcnTrain {
        #[arg(value_enum)]
        algo: RcnAlgo,
        #[command(flatten)]
        cfg: RunConfig,
    },
    /// Selective classification against a test set.
    Rejectron(RunConfig),
    /// Unlabeled selective classification.
    Urejectron(RunConfig),
    /// Transductive learner over a finite pool.
    TransductivePool(RunConfig),
    /// Write a synthetic dataset.
    GenData(RunConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Pool,
    Distinguisher,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Realizable,
    Agnostic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum AlphaModeArg {
    Standard,
    Agreement,
}

/// Every flag a run can take; echoed verbatim into the results document.
#[derive(Debug, Clone, Args, Serialize)]
pub struct RunConfig {
    /// Training CSV (features then a ±1 label per row).
    #[arg(long)]
    pub data: Option<String>,
    /// Test CSV.
    #[arg(long)]
    pub test: Option<String>,
    /// Extra unlabeled CSV (uroboost) or the extra noisy set (rejectron).
    #[arg(long)]
    pub aux: Option<String>,
    /// Generator: a preset name (margin-union, moons, gaussian, planted) or
    /// a JSON generator kind, inline or as a file path.
    #[arg(long)]
    pub gen: Option<String>,
    /// Points to generate for training.
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    /// Points to generate for testing.
    #[arg(long, default_value_t = 2000)]
    pub test_n: usize,
    /// Saved model (JSON).
    #[arg(long)]
    pub model: Option<String>,
    /// Hypothesis pool (JSON list of models).
    #[arg(long)]
    pub pool: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    /// Norm of the perturbation ball: 1, 2 or inf.
    #[arg(long, default_value = "2")]
    pub p: String,
    /// Finite offsets (JSON list of vectors, inline or a file path); replaces the ball.
    #[arg(long)]
    pub offsets: Option<String>,
    /// Polytope `{a, b}` around each point (JSON), for rerm-ellipsoid.
    #[arg(long)]
    pub polytope: Option<String>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Label noise rate.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Multiplicative-weights step.
    #[arg(long)]
    pub eta_mw: Option<f64>,
    /// Train-side weight Λ of the redaction algorithms.
    #[arg(long)]
    pub lambda_weight: Option<f64>,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Results document path; stdout when absent.
    #[arg(long)]
    pub out: Option<String>,
    /// Where gen-data writes its CSV.
    #[arg(long)]
    pub csv_out: Option<String>,
    #[arg(long, value_enum, default_value = "realizable")]
    pub mode: Mode,
    #[arg(long)]
    pub multi_granularity: bool,
    #[arg(long, value_enum, default_value = "distinguisher")]
    pub backend: Backend,
    #[arg(long, value_enum, default_value = "agreement")]
    pub alpha_mode: AlphaModeArg,
    /// Boost the robust loss instead of the 0-1 loss (alpha-boost).
    #[arg(long)]
    pub robust: bool,
    /// Sample size of each barely-robust learner call.
    #[arg(long)]
    pub learner_m: Option<usize>,
    /// Mistake cap of the online learner.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Members kept when sparsifying a vote.
    #[arg(long)]
    pub vote_size: Option<usize>,
}

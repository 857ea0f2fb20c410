use thiserror::Error;

/// Errors raised by the model, the solvers and the scenario runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate system: both well-reservoir couplings are zero")]
    DegenerateSystem,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("initial state is not normalized (|C1|^2 + |C2|^2 = {0})")]
    NotNormalized(f64),

    #[error("no bound state: levels are misaligned (epsilon = {0}); use dwell_time")]
    NoBoundState(f64),

    #[error("infinite dwell time: the dark state is decoupled, a bound state exists")]
    InfiniteDwellTime,

    #[error("null result impossible: the dot occupation is zero")]
    NullResultImpossible,

    #[error("empty coupling table")]
    EmptyTable,

    #[error("integration step too large: dt*(G1+G2) = {0} exceeds 0.5")]
    StepTooLarge(f64),

    #[error("a continuum needs at least 10 reservoir levels, got {0}")]
    TooFewLevels(usize),

    #[error("matrix is not Hermitian (max |H - H^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error(
        "dimension {dim} exceeds the cap {cap}; reduce n_levels or the particle number, \
         or raise the cap explicitly"
    )]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("eigendecomposition did not converge")]
    Eigen,

    #[error("not an antisymmetric two-fermion amplitude table: {0}")]
    NotAntisymmetric(String),

    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error("sweep has {count} points, the cap is {cap}")]
    SweepTooLarge { count: usize, cap: usize },

    #[error("{context}: {source}")]
    Scenario {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("determinism check failed: repeated run produced different bytes for {0}")]
    Nondeterministic(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Wraps a module error with the scenario that triggered it.
    pub fn in_context(self, context: impl Into<String>) -> Self {
        Error::Scenario {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

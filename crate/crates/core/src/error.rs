use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The point has no coordinate in the south-centred chart.
    #[error("chart failure: point {0:?} is the north pole")]
    ChartFailure([f64; 3]),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("{n} is not a perfect square")]
    NotPerfectSquare { n: usize },

    #[error("eigensolver did not converge for a {n}x{n} matrix")]
    EigenNoConvergence { n: usize },

    #[error("spherical ensemble: {attempts} attempts failed (singular B or eigensolver failure)")]
    RetriesExhausted { attempts: usize },

    #[error(
        "rejection envelope violated at step {step} (point {point:?}): target/bound ratio {ratio}"
    )]
    EnvelopeViolation {
        step: usize,
        point: [f64; 2],
        ratio: f64,
    },

    #[error("rejection budget of {budget} proposals exhausted at step {step}")]
    RejectionBudget { budget: u64, step: usize },

    #[error("unknown integrand `{0}`")]
    UnknownIntegrand(String),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("integrand evaluation failed: {0}")]
    Evaluation(String),

    #[error("degenerate slope fit: {0}")]
    DegenerateFit(String),

    #[error("{method} N={n} rep={rep} seed={seed}: {source}")]
    Repetition {
        method: String,
        n: usize,
        rep: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input data. `line` is 1-based and counts the header row.
    #[error("{source_name}, line {line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("non-positive price {value} for market '{market}' on {date}")]
    NonPositivePrice {
        market: String,
        date: String,
        value: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("series too short: need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("zero variance: {0}")]
    ZeroVariance(String),

    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    #[error("conditional variance is not positive at index {index} ({value})")]
    NonPositiveVariance { index: usize, value: f64 },

    #[error("log-variance out of floating-point range at index {index}")]
    Overflow { index: usize },

    #[error("empty window: {0}")]
    EmptyWindow(String),

    #[error("window lengths differ: pre has {pre} observations, post has {post}")]
    UnequalWindows { pre: usize, post: usize },

    #[error("rank-deficient regressors; collinear columns: {}", .columns.join(", "))]
    RankDeficient { columns: Vec<String> },

    #[error("every candidate model failed: {}", format_failures(.0))]
    AllCandidatesFailed(Vec<(String, String)>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::AllCandidatesFailed(_)
                | Error::NonPositiveVariance { .. }
                | Error::Overflow { .. }
                | Error::ZeroVariance(_)
        )
    }
}

fn format_failures(failures: &[(String, String)]) -> String {
    failures
        .iter()
        .map(|(name, reason)| format!("{name}: {reason}"))
        .collect::<Vec<_>>()
        .join("; ")
}

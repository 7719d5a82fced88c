use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied parameters that violate a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Not enough admissible connections to route the requested number of
    /// disjoint paths. `transition` names the first frame pair `k -> k+1`
    /// whose bipartite matching is smaller than the request, when one exists.
    #[error("infeasible: {requested} paths requested, at most {achievable} routable{}", fmt_transition(.transition))]
    Infeasible {
        requested: usize,
        achievable: usize,
        transition: Option<usize>,
    },

    /// A solver produced output that breaks the constraint system. This is a
    /// bug, not a user error.
    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("wav error: {0}")]
    Wav(#[from] hound::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

fn fmt_transition(t: &Option<usize>) -> String {
    match t {
        Some(k) => format!(" (frame transition {} -> {})", k, k + 1),
        None => String::new(),
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

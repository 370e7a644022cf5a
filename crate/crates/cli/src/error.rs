use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] steklov_core::Error),
    #[error("cannot read {0}: {1}")]
    Input(String, #[source] std::io::Error),
    #[error("{path}: {source}")]
    Graph {
        path: String,
        #[source]
        source: steklov_core::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 3 for budget overruns, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) | CliError::Graph { source: e, .. } if e.is_budget() => 3,
            _ => 2,
        }
    }
}

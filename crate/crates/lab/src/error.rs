use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("{file}:{line}:{column}: {message}")]
    Parse { file: String, line: usize, column: usize, message: String },
    #[error("unknown case id {0:?}")]
    UnknownCase(String),
    #[error("duplicate case id {0:?}")]
    DuplicateCase(String),
    #[error("unknown group {0:?}")]
    UnknownGroup(String),
    #[error("case {case}: {message}")]
    Parameter { case: String, message: String },
    #[error("unknown operation {module}.{operation}")]
    UnknownOperation { module: String, operation: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("HOLONOMY_LAB_THREADS: {0}")]
    Threads(String),
    #[error(transparent)]
    Core(#[from] holonomy_core::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

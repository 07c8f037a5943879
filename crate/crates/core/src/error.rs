use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("coefficient file format: {0}")]
    Format(String),

    #[error("epoch {epoch} outside supported range [{min}, {max}]")]
    EpochOutOfRange { epoch: f64, min: f64, max: f64 },

    #[error("degenerate field: {0}")]
    DegenerateField(String),

    #[error("invalid position: {0}")]
    Position(String),

    #[error("region: {0}")]
    Region(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("task: {0}")]
    Task(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

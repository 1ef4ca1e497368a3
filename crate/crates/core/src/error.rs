use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("not a closed manifold: face {face:?} has {cofaces} cofaces (expected 2)")]
    NonManifold { face: Vec<u32>, cofaces: usize },

    #[error("structural error: {0}")]
    Structural(String),

    #[error("defect chain not null-homologous")]
    NotNullHomologous,

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("generators {0} and {1} anticommute")]
    Anticommuting(usize, usize),

    #[error("ball placement failed: {0}")]
    Placement(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

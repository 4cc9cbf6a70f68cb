use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported space: {0}")]
    UnsupportedSpace(String),

    #[error("invalid quadrature request: {0}")]
    InvalidQuadrature(String),

    #[error("singular local system in cell {cell:?}: pivot {pivot:e} below tolerance")]
    SingularSystem { cell: Option<usize>, pivot: f64 },

    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("negative cell average {mean:e} in cell {cell:?}; the limiter cannot restore positivity")]
    NegativeAverage { cell: Option<usize>, mean: f64 },

    #[error("evaluator returned a non-finite value at d = {point:?}")]
    NonFiniteEvaluation { point: Vec<f64> },

    #[error("no feasible augmented function found; best min v = {best_min_v:e}")]
    AugmentationInfeasible { best_min_v: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

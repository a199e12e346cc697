use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("degenerate field: need at least 2x2 cells, got {rows}x{cols}")]
    DegenerateGrid { rows: usize, cols: usize },
    #[error("empty value range [{lo}, {hi}]")]
    EmptyRange { lo: f64, hi: f64 },
    #[error("generated field is constant; cannot rescale")]
    ConstantField,
    #[error("cannot move stage backwards from {current} to {requested}")]
    BackwardStage { current: usize, requested: usize },
    #[error("stage {requested} is ahead of the mission clock (stage {clock})")]
    StageAheadOfClock { clock: usize, requested: usize },
    #[error("cell ({0}, {1}) outside grid")]
    CellOutOfBounds(i64, i64),
    #[error("invalid polar table: {0}")]
    InvalidPolar(String),
    #[error("polar table I/O: {0}")]
    PolarIo(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("forecast does not match the environment's current field")]
    ForecastMismatch,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

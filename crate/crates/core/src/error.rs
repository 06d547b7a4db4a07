use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid dimensions must be positive, got {width}x{height}")]
    ZeroDimensions { width: usize, height: usize },
    #[error("cell table has {actual} entries, expected {expected}")]
    CellCount { expected: usize, actual: usize },
    #[error("cell size must be positive and finite, got {0}")]
    CellSize(f64),
    #[error("grid has no destination cell")]
    NoDestination,
    #[error("grid has no origin cell")]
    NoOrigin,
    #[error("origin cell ({x}, {y}) cannot reach any destination")]
    UnreachableOrigin { x: i32, y: i32 },
    #[error("field dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("manhattan value {manhattan} is below chebyshev value {chebyshev} at cell {index}")]
    InconsistentFields {
        index: usize,
        manhattan: f64,
        chebyshev: f64,
    },
    #[error("s_add must be finite and >= 1, got {0}")]
    InvalidSAdd(f64),
    #[error("coupling {name} must be finite and >= 0, got {value}")]
    InvalidCoupling { name: &'static str, value: f64 },
    #[error("invalid speed distribution: {0}")]
    InvalidSpeeds(&'static str),
    #[error("invalid run configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("scale {scale} makes the corridors {cells} cells wide (need at least 2)")]
    DegenerateScale { scale: f64, cells: i64 },
    #[error("parameter table is not a full rectangular grid")]
    NotRectangular,
}

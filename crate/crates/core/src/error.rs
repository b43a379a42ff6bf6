use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("wrong argument count: expected {expected}, got {got}")]
    ArgumentCount { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("polynomial is not homogeneous of degree {degree}: monomial of degree {found}")]
    NotHomogeneous { degree: usize, found: usize },
    #[error("form is not separating: P({witness:?}) = {value}")]
    NotSeparating { witness: Vec<f64>, value: f64 },
    #[error("form is not convex: second derivative {value} at x = {x:?}, h = {h:?}")]
    NotConvex { x: Vec<f64>, h: Vec<f64>, value: f64 },
    #[error("function is not convex: midpoint gap {gap} at x = {x:?}, y = {y:?}")]
    NonConvexFunction { x: Vec<f64>, y: Vec<f64>, gap: f64 },
    #[error("grid error: {0}")]
    Grid(String),
    #[error("point {0:?} lies outside the convex hull of the grid")]
    OutsideHull(Vec<f64>),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex iteration limit reached ({0})")]
    IterationLimit(usize),
    #[error("expression parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("signature mismatch: {0}")]
    Signature(String),
    #[error("leg mismatch: {0}")]
    Legs(String),
    #[error("braiding unavailable for pair ({0}, {1})")]
    BraidingUnavailable(String, String),
    #[error("operator is not unitary (defect {0:.3e})")]
    NotUnitary(f64),
    #[error("element lies outside the span (relative residual {0:.3e})")]
    OutsideSpan(f64),
    #[error("extension is not well defined (residual {0:.3e})")]
    IllDefined(f64),
    #[error("operator does not factor through the outer legs (residual {0:.3e})")]
    NotFactorizable(f64),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("yetter-drinfeld compatibility violated at g={g}, h={h}")]
    YdCompatibility { g: usize, h: usize },
    #[error("residual check failed: {name} = {value:.3e} (tol {tol:.1e})")]
    Residual { name: String, value: f64, tol: f64 },
    #[error("schema error at {path}: {msg}")]
    Schema { path: String, msg: String },
    #[error("unsupported bundle version {0}")]
    UnsupportedVersion(u64),
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

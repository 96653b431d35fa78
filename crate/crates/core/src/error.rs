use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed tabular input. `row` and `col` are 1-based; `col` is 0 when the
    /// problem concerns a whole row.
    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },

    /// A request outside the sizes the exhaustive solvers can handle.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(row: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse { row, col, msg: msg.into() }
    }
}

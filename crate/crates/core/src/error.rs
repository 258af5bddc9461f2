/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input sequence has a length incompatible with the operation.
    #[error("input shape: {0}")]
    InputShape(String),

    /// A parameter is outside its valid range.
    #[error("parameter: {0}")]
    Parameter(String),

    /// A simulation configuration is inconsistent.
    #[error("configuration: {0}")]
    Config(String),

    /// The channel realization is degenerate (all-zero combining gain).
    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    /// A decoder recursion lost all probability mass.
    #[error("numerical degeneracy: {0}")]
    Numerical(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

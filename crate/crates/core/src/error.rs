use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Two expressions built over different symbol tables were combined.
    #[error("symbol table mismatch: [{left}] vs [{right}]")]
    SymbolMismatch { left: String, right: String },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("structural error: {0}")]
    Structural(String),

    /// A term of the reduced ODE has no antiderivative inside the supported template.
    #[error("unsupported ODE form: {0}")]
    UnsupportedForm(String),

    #[error("homogeneous balance failed: {0}")]
    NoBalance(String),

    #[error("solver incomplete: {0}")]
    SolverIncomplete(String),

    #[error("pole: denominator {denominator:e} at {location}")]
    Pole { denominator: f64, location: String },

    #[error("every grid point is a pole")]
    EmptyGrid,

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

use num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("near-degenerate parameters: {0}")]
    Degenerate(String),
    #[error("singular evaluation: {0}")]
    Singular(String),
    #[error("geometry mismatch: {0}")]
    Geometry(String),
    #[error("unsupported domain: {0}")]
    Unsupported(String),
    #[error("linearization failed: {0}")]
    Linearization(String),
    #[error("QR iteration did not converge after {sweeps} sweeps; {} of {total} eigenvalues deflated", deflated.len())]
    NoConvergence {
        sweeps: usize,
        total: usize,
        deflated: Vec<Complex64>,
    },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("misuse: {0}")]
    Misuse(String),
    #[error("refinement failure: {0}")]
    Refinement(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("model inconsistency: {0}")]
    Model(String),
    #[error("property violation: {0}")]
    Property(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Singular(_)
            | Error::Linearization(_)
            | Error::NoConvergence { .. }
            | Error::Refinement(_)
            | Error::Model(_) => 3,
            Error::Property(_) => 4,
            _ => 2,
        }
    }
}

use thiserror::Error;

/// Errors raised by the hyper-Bessel calculus.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HbError {
    #[error("invalid vector index: {0}")]
    InvalidIndex(String),

    #[error("vector index mismatch between operands")]
    IndexMismatch,

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("could not parse rational `{0}`")]
    ParseRational(String),

    #[error("floating-point overflow at term index {index}")]
    Overflow { index: usize },

    #[error("requested tolerance {tol:e} is below the floating-point floor {floor:e}")]
    Precision { tol: f64, floor: f64 },

    #[error("pairing needs moments up to index {needed} but only {available} are stored and no growth certificate is attached")]
    IncompletePairing { needed: usize, available: usize },

    #[error("pairing series fails the absolute-convergence test (certificate radius {radius} too large)")]
    PairingDivergence { radius: f64 },

    #[error("coefficients grow faster than any exponential (log-slope {slope:.3})")]
    NotExponentialType { slope: f64 },

    #[error("series too short for a certificate fit: need truncation >= {needed}, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("growth certificate (C={c}, a={a}) violated at moment {index}")]
    CertificateViolated { c: f64, a: f64, index: usize },

    #[error("grid exhausted without finding both |Psi|<1 and |Psi|>1 samples; enlarge the grid (found {found_a} / {found_b})")]
    EnlargeGrid { found_a: usize, found_b: usize },

    #[error("operator is a scalar multiple of the identity")]
    ScalarOperator,

    #[error("transitivity witness failed: residuals {start:e} / {end:e} exceed {eps:e} after {nodes} nodes per set")]
    WitnessFailure {
        start: f64,
        end: f64,
        eps: f64,
        nodes: usize,
    },
}

pub type Result<T, E = HbError> = std::result::Result<T, E>;

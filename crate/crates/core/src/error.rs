use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical and p-adic routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate}, error {error:e})")]
    NonConvergence {
        estimate: Complex64,
        error: f64,
        subdivisions: usize,
    },
    #[error("integrand does not decay fast enough along the line: {0}")]
    InsufficientDecay(String),
    #[error("pole of the Gamma function at s = {0}")]
    GammaPole(Complex64),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("character mod {modulus} is not primitive (conductor {conductor}); primitivize it first")]
    NotPrimitive { modulus: u64, conductor: u64 },
    #[error("inconsistent generator images: {0}")]
    InconsistentCharacter(String),
    #[error("divergent integral: {0}")]
    Divergent(String),
    #[error("vanishing denominator pairing; choose a different probe")]
    VanishingPairing,
    #[error("function is not cuspidal: {0}")]
    NotCuspidal(String),
    #[error("function must be real-valued")]
    NonReal,
    #[error("regularization tag {tag} is not defined at place {place}")]
    IncompatibleTag { tag: String, place: String },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_finite(z: Complex64, what: &str) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(format!("{what} = {z}")))
    }
}

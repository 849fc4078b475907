use thiserror::Error;

/// Errors raised by the numerical operations of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("symbol is not finite at xi = {xi}")]
    InvalidSymbol { xi: f64 },
    #[error("boost by eta = {0} leaves the Hardy space")]
    ChiralityViolation(f64),
    #[error("eta = {eta} is not a multiple of the grid spacing {dxi}")]
    Alignment { eta: f64, dxi: f64 },
    #[error("functional has imaginary part {0:e} above tolerance")]
    NonRealFunctional(f64),
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("not a soliton: {0}")]
    NotASoliton(String),
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("invalid denominator: {0}")]
    InvalidDenominator(String),
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),
    #[error("evaluation point {0} is too close to the spectrum of M(t)")]
    NearSpectrum(String),
    #[error("pole off the lower half-plane: {0}")]
    PositivityViolation(String),
    #[error("residue a_{index} has modulus {modulus:e}")]
    VanishingResidue { index: usize, modulus: f64 },
    #[error("step size underflow at t = {0}")]
    Stiffness(f64),
    #[error("need at least {need} snapshots, got {got}")]
    Arity { need: usize, got: usize },
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

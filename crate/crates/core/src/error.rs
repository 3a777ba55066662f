use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failures raised by the numerical core.
///
/// Variants split into two families: invalid input (the caller asked for
/// something ill-posed) and numerical refusal (the request is well-posed but
/// the computation cannot be carried out to the required accuracy).
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A vector argument that must be nonzero was zero.
    ZeroArgument,
    /// A symbol failed construction-time validation.
    InvalidSymbol(String),
    /// Argument length does not match the ambient dimension.
    DimensionMismatch { expected: usize, found: usize },
    /// Derivative or admissibility order beyond what the symbol form supports.
    UnsupportedOrder { order: usize, max: usize },
    /// Level-set quadrature is only built for dimensions 1 to 3.
    UnsupportedDimension(usize),
    /// Lattice enumeration would exceed the entry budget.
    OverflowRisk { predicted: f64 },
    /// Evaluation point outside the open interval of the Dirichlet model.
    DomainError(String),
    /// The radial integrand of the limit kernel is not integrable at the origin.
    NonIntegrable { s: f64, bound: f64 },
    /// Not enough (or not spread enough) samples for a regression.
    DegenerateFit(String),
    /// An off-diagonal pair violates the `|x - y| >= kappa L^(-1/m)` constraint.
    PairTooClose { distance: f64, required: f64 },
    /// Level-set quadrature too coarse for the requested oscillation frequency.
    UnderResolved { required: usize, actual: usize },
    /// Band does not match the kernel request (model, cutoff or dimension).
    BandMismatch(String),
    /// Any other out-of-range parameter; the payload names the parameter.
    InvalidParameter(String),
}

impl Error {
    /// True for refusals caused by numerics rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::UnsupportedOrder { .. }
                | Error::UnsupportedDimension(_)
                | Error::OverflowRisk { .. }
                | Error::NonIntegrable { .. }
                | Error::DegenerateFit(_)
                | Error::UnderResolved { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroArgument => f.write_str("argument vector is zero"),
            Error::InvalidSymbol(msg) => write!(f, "invalid symbol: {msg}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::UnsupportedOrder { order, max } => {
                write!(f, "unsupported derivative order {order} (maximum {max})")
            }
            Error::UnsupportedDimension(n) => {
                write!(f, "unsupported dimension {n} (level-set quadrature needs n <= 3)")
            }
            Error::OverflowRisk { predicted } => {
                write!(f, "refusing enumeration: predicted {predicted:.0} lattice points")
            }
            Error::DomainError(msg) => write!(f, "domain error: {msg}"),
            Error::NonIntegrable { s, bound } => {
                write!(f, "limit kernel not integrable: s = {s} >= {bound}")
            }
            Error::DegenerateFit(msg) => write!(f, "degenerate fit: {msg}"),
            Error::PairTooClose { distance, required } => {
                write!(f, "pair too close: |x - y| = {distance} < kappa L^(-1/m) = {required}")
            }
            Error::UnderResolved { required, actual } => {
                write!(f, "quadrature under-resolved: resolution {actual} < required {required}")
            }
            Error::BandMismatch(msg) => write!(f, "band mismatch: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

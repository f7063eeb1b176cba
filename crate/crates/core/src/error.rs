//! Crate-wide error type.
//!
//! A single enum keeps call sites simple and lets the CLI map variants onto
//! exit codes: structural/validation problems versus numerical failures.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A set failed structural validation (reversed endpoints, NaN bounds).
    #[error("malformed set: {0}")]
    MalformedSet(String),

    /// The requested set operation has no representation in this set model
    /// (e.g. a union of overlapping boxes that is not itself a box).
    #[error("unsupported set operation: {0}")]
    UnsupportedSet(String),

    /// A distortion function failed validation (u(0) != 0 or decreasing).
    #[error("invalid distortion: {0}")]
    InvalidDistortion(String),

    /// A documented precondition of an operation was not met.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Bad configuration value (sample counts, tolerances, truncation).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An input list that must be nonempty was empty.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// A sampled function value was NaN or infinite.
    #[error("non-finite sample while {0}")]
    NonFiniteSample(String),

    /// Refinement hit the sample cap before successive results stabilized.
    /// Carries the last computed value so callers can still inspect it.
    #[error("refinement cap reached before stability: value {value}, last delta {delta}")]
    RefinementStalled { value: f64, delta: f64 },

    /// An evaluation point lies outside the operator's domain.
    #[error("point outside domain: {0}")]
    OutsideDomain(String),

    /// A point of the wrong shape (scalar vs planar) was supplied.
    #[error("point shape mismatch: {0}")]
    PointShape(String),

    /// Sequence operator needed a tail limit that the input did not carry.
    #[error("sequence has no tail limit but the operator requires one")]
    MissingTailLimit,

    /// A check that needs a Lipschitz constant got a field without one.
    #[error("scalar field '{0}' has no lipschitz constant")]
    MissingLipschitz(String),

    /// No rate bound is registered for the named family.
    #[error("no rate bound registered for family '{0}'")]
    UnknownPairing(String),

    /// Failure while evaluating an operator, with the offending site.
    #[error("operator {family} at n={n} on '{function}' failed at {point}: {source}")]
    OperatorEval {
        family: String,
        n: u32,
        function: String,
        point: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for errors that indicate bad inputs/configuration rather than a
    /// numerical failure at run time.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::MalformedSet(_)
                | Error::UnsupportedSet(_)
                | Error::InvalidDistortion(_)
                | Error::Precondition(_)
                | Error::InvalidConfig(_)
                | Error::EmptyInput(_)
                | Error::OutsideDomain(_)
                | Error::PointShape(_)
                | Error::MissingTailLimit
                | Error::MissingLipschitz(_)
                | Error::UnknownPairing(_)
        )
    }
}

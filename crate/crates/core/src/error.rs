use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polynomial is reducible over Q: {0}")]
    NotIrreducible(String),
    #[error("polynomial has {real} real roots out of {degree}")]
    NotTotallyReal { degree: usize, real: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("precision exhausted at {bits} bits: {context}")]
    PrecisionExhausted { bits: u32, context: String },
    #[error("elements are not a basis of the field over Q")]
    NotABasis,
    #[error("scalar {0} must not be 0, 1 or -1")]
    BadScalar(i64),
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error("dimension {0} is above the certified enumeration limit")]
    DimensionTooLarge(usize),
    #[error("lattice point norm straddles radius {radius}")]
    BoundaryUndecidable { radius: f64 },
    #[error("operation requires an exact basis")]
    NotExact,
    #[error("coordinate {0} is rational")]
    RationalCoordinate(usize),
    #[error("norm tie between candidates cannot be broken: {0}")]
    TieUnresolvable(String),
    #[error("best-approximation vector is not primitive")]
    NotPrimitive,
    #[error("generators together with 1 do not span the field")]
    NotSpanning,
    #[error("exponent schedule violates the divergence hypothesis: {0}")]
    ScheduleViolation(String),
    #[error("argument outside the convergence domain (valuation {valuation})")]
    OutsideConvergenceDomain { valuation: u32 },
    #[error("value below resolution p^-{precision}: {context}")]
    PrecisionBelowResolution { precision: u32, context: String },
    #[error("enumeration of {size} residues exceeds cap {cap}")]
    EnumerationTooLarge { size: u128, cap: u128 },
    #[error("no witness at resolution p^-{0}")]
    NoWitnessAtResolution(u32),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("feature schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn exhausted(bits: u32, context: impl Into<String>) -> Self {
        Error::PrecisionExhausted { bits, context: context.into() }
    }
}

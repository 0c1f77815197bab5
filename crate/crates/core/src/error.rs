use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The input mesh or point set has nothing in it.
    EmptyInput,
    /// The input exists but has no usable extent (zero area, zero size).
    DegenerateInput(&'static str),
    /// A coordinate lies outside the domain `[-1, 1]`.
    Domain { value: f64 },
    /// Two operands disagree on a dimension.
    Shape {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    /// A pixel or vertex index is out of range.
    Index { index: usize, len: usize },
    /// An operation was called on data that breaks its precondition.
    Precondition(&'static str),
    /// A parameter is outside its valid range.
    InvalidParameter(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyInput => f.write_str("empty input"),
            Error::DegenerateInput(why) => write!(f, "degenerate input: {why}"),
            Error::Domain { value } => write!(f, "value {value} is outside [-1, 1]"),
            Error::Shape {
                what,
                expected,
                actual,
            } => write!(f, "shape mismatch in {what}: expected {expected}, got {actual}"),
            Error::Index { index, len } => write!(f, "index {index} out of range (len {len})"),
            Error::Precondition(why) => write!(f, "precondition violated: {why}"),
            Error::InvalidParameter(why) => write!(f, "invalid parameter: {why}"),
        }
    }
}

impl core::error::Error for Error {}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("scale exponent m = {0} outside 1..=20")]
    InvalidScale(u32),
    #[error("point {index} lies outside the bounding box {bounds}")]
    OutOfBounds { index: usize, bounds: &'static str },
    #[error("points are not strictly increasing at index {0}")]
    NotSorted(usize),
    #[error("scales differ: {0} vs {1}")]
    ScaleMismatch(u32, u32),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("dimension {requested} is not realizable by a dyadic Cantor construction at m = {m}; nearest realizable value is {nearest}")]
    UnrealizableDimension { requested: f64, nearest: f64, m: u32 },
    #[error("scale exponent m = {0} must be even")]
    OddScale(u32),
    #[error("coincident points at indices {0} and {1} (set is not delta-separated)")]
    CoincidentPoints(usize, usize),
    #[error("direction set is empty")]
    NoDirections,
    #[error("only {0} rich tubes; at least two are needed to form consecutive pairs")]
    TooFewRichTubes(usize),
    #[error("consecutive tube directions {j} and {next} are {gap} apart, below the required {required}")]
    SeparationViolated {
        j: usize,
        next: usize,
        gap: f64,
        required: f64,
    },
    #[error("pair ({0}, {1}) is invalid: indices must be distinct and in range")]
    InvalidPair(usize, usize),
    #[error("pair ({0}, {1}) joins two equal points")]
    DegeneratePair(usize, usize),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("configuration field `{field}`: {msg}")]
    Config { field: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("invalid projective point `{0}` (expected `p/q`, `p` or `inf`)")]
    Point(String),
    #[error("invalid matrix `{0}` (expected four integers `a b c d`)")]
    Element(String),
    #[error("invalid arc set `{0}`")]
    ArcSet(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("matrix has non-positive determinant")]
    NonPositiveDeterminant,
    #[error("arc endpoints coincide at {0}")]
    DegenerateArc(String),

    #[error("generator `{0}` is the identity")]
    IdentityGenerator(String),
    #[error("generator `{0}` duplicates an earlier generator")]
    DuplicateGenerator(String),
    #[error("generating system is empty")]
    NoGenerators,
    #[error("domain U is empty")]
    EmptyDomain,
    #[error("closure of V is not contained in U")]
    VNotInsideU,
    #[error("V is required for this operation")]
    MissingV,

    #[error("base point {0} lies outside U")]
    BasePointOutsideU(String),
    #[error("element is not admissible at the base point: {0}")]
    NotAdmissible(String),
    #[error("resource cap exceeded: more than {limit} nodes")]
    ResourceCapExceeded { limit: usize },

    #[error("at least two elements are required, got {0}")]
    TooFewElements(usize),
    #[error("series needs at least {needed} points in the fit window, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("invalid growth series: {0}")]
    InvalidSeries(String),
    #[error("precondition not certified: {0}")]
    NotCertified(String),
    #[error("net {net} is not a {c}-net: orbit point {point} is farther than {c}")]
    NotACNet { net: usize, c: u32, point: String },
    #[error("net {net} contains {point}, which is not in the orbit piece")]
    NetOutsideOrbit { net: usize, point: String },
}

pub type Result<T> = std::result::Result<T, Error>;

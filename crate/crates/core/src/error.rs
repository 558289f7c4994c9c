use serde::Serialize;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Which side of the incidence relation an id or element belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Point,
    Line,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kind::Point => f.write_str("point"),
            Kind::Line => f.write_str("line"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("homogeneous triple is the zero vector")]
    ZeroVector,
    #[error("elements are identical; join/meet is undefined")]
    IdenticalElements,
    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),
    #[error("projective map is singular")]
    SingularMap,
    #[error("unsupported marked set: {0}")]
    UnsupportedFrame(String),
    #[error("no ordering of the marked elements is compatible: {0}")]
    NoCompatibleOrdering(String),

    #[error("points {points:?} are both incident with lines {lines:?}")]
    GirthViolation {
        points: (String, String),
        lines: (String, String),
    },
    #[error("unknown {kind} id `{id}`")]
    UnknownId { kind: Kind, id: String },
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: Kind, id: String },
    #[error("duplicate incidence ({point}, {line})")]
    DuplicateIncidence { point: String, line: String },
    #[error("{kind} id `{id}` has no coordinates")]
    UnmappedId { kind: Kind, id: String },
    #[error("inconsistent signature: {points} point incidences vs {lines} line incidences")]
    InconsistentSignature { points: usize, lines: usize },
    #[error("cannot parse signature `{0}`")]
    SignatureParse(String),

    #[error("cannot identify a point with a line ({0})")]
    KindMismatch(String),
    #[error("identified elements do not coincide: {0}")]
    CoordinateMismatch(String),
    #[error("overlay is degenerate: {0}")]
    DegenerateOverlay(String),
    #[error("not a partition: {0}")]
    NotAPartition(String),
    #[error("no valid matching of the deficient lines: {0}")]
    NoValidMatching(String),
    #[error("points are not on a common line: {0}")]
    NotCollinear(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("genericity search exhausted: {0}")]
    SearchExhausted(String),
    #[error("all {} glue candidates failed", .0.len())]
    ExhaustedCandidates(Vec<String>),

    #[error("line `{0}` maps to the line at infinity of the chart")]
    ChartDegenerate(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

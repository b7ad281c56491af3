//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("node `{0}` declared twice")]
    DuplicateNode(String),

    #[error("invalid node name `{0}`")]
    InvalidNodeName(String),

    #[error("self loop on `{0}`")]
    SelfLoop(String),

    #[error("more than one edge between `{0}` and `{1}`")]
    DuplicateEdge(String, String),

    #[error("edge `{edge}` is not allowed in a {class}")]
    MarkNotAllowedInClass { class: String, edge: String },

    #[error("directed cycle: {}", .0.join(" -> "))]
    DirectedCycle(Vec<String>),

    #[error("almost directed cycle: directed path {} closed by `{} <-> {}`", .path.join(" -> "), .path.last().map(String::as_str).unwrap_or(""), .path.first().map(String::as_str).unwrap_or(""))]
    AlmostDirectedCycle { path: Vec<String> },

    #[error("graph is not maximal: `{0}` and `{1}` are non-adjacent but cannot be m-separated")]
    NotMaximal(String, String),

    #[error("invalid CPDAG: {0}")]
    InvalidCpdag(String),

    #[error("invalid PAG: {0}")]
    InvalidPag(String),

    #[error("operation requires a {expected} but the graph is a {found}")]
    ClassMismatch { expected: String, found: String },

    #[error("path index {index} out of range for a path of {len} nodes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("not a path: {0}")]
    InvalidPath(String),

    #[error("path is not of definite status")]
    NotDefiniteStatus,

    #[error("path endpoint `{0}` is in the conditioning set")]
    EndpointInZ(String),

    #[error("node sets are not pairwise disjoint (`{0}` appears twice)")]
    SetsNotDisjoint(String),

    #[error("treatment and outcome sets must be non-empty")]
    EmptyXOrY,

    #[error("size cap exceeded: {what} ({actual} > {limit})")]
    SizeCapExceeded {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("edge `{0}` is not a directed edge")]
    NotDirectedEdge(String),

    #[error("graphs do not share a skeleton")]
    SkeletonMismatch,

    #[error("graphs are not Markov equivalent")]
    NotEquivalent,

    #[error("graphs are defined over different node sets")]
    NodeSetMismatch,

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("invalid structural equation model: {0}")]
    InvalidSem(String),

    #[error("regression design is singular")]
    SingularDesign,

    #[error("syntax error at {line}:{col}: expected {expected}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

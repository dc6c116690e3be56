//! Error types, one enum per subsystem.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid edge ({u}, {v}) for a graph on {n} vertices")]
    InvalidEdge { u: u32, v: u32, n: u32 },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: u32, v: u32 },
    #[error("wrong number of neighbours: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("the given vertex set does not induce a clique")]
    InvalidClique,
    #[error("invalid graph code: {0}")]
    InvalidCode(String),
    #[error("vertex count {n} exceeds the supported maximum {max}")]
    Capacity { n: u32, max: u32 },
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RigidityError {
    #[error("graph is not {d}-rigid")]
    NotRigid { d: u32 },
    #[error("enumeration supports n <= {max}, got {n}")]
    Capacity { n: u32, max: u32 },
    #[error("operation only supports dimension {supported}, got {d}")]
    UnsupportedDimension { d: u32, supported: u32 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("instance model does not match the requested system")]
    ModelMismatch,
    #[error("system construction needs at least d + 1 = {needed} vertices, got {got}")]
    TooFewVertices { needed: u32, got: u32 },
    #[error("point length {got} does not match variable count {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("lambda must cover exactly the edge set")]
    LambdaMismatch,
    #[error("pin vertices must be {d} distinct vertices of the graph")]
    BadPins { d: u32 },
    #[error(transparent)]
    Rigidity(#[from] RigidityError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("path budget exceeded: {variables} variables needs 2^{variables} paths (cap 2^{max})")]
    PathBudget { variables: usize, max: usize },
    #[error("system core is not square: {equations} equations, {variables} variables")]
    NotSquare { equations: usize, variables: usize },
    #[error("equation of total degree {degree} > 2 is not supported")]
    DegreeTooHigh { degree: u32 },
    #[error("unreliable result: {failed} of {total} paths failed after retry")]
    Unreliable { failed: usize, total: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("trial raw counts disagree: {0:?}")]
    TrialDisagreement(Vec<u64>),
    #[error("raw count {raw} is not divisible by 2^{d}")]
    BadDivisibility { raw: u64, d: u32 },
    #[error("derived count overflows the count type")]
    Overflow,
    #[error("count is infinite where a finite count was required")]
    InfiniteCount,
}

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("empty record set")]
    EmptyInput,
    #[error("alpha bound needs n > d + 1, got n = {n}, d = {d}")]
    Domain { n: u32, d: u32 },
    #[error("CSV parse error on line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("record violates c <= c*: code {code} has c = {c}, c* = {c_star}")]
    RatioViolation { code: String, c: u64, c_star: u64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed framework document: {0}")]
    Malformed(String),

    #[error("duplicate member ({i}, {j})")]
    DuplicateMember { i: usize, j: usize },

    #[error("node index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("member ({i}, {j}) must join two distinct nodes with i < j")]
    InvalidMember { i: usize, j: usize },

    #[error("non-finite value at {0}")]
    NonFinite(String),

    #[error("rest squared length of member ({i}, {j}) must be positive, got {value}")]
    NonPositiveLength { i: usize, j: usize, value: f64 },

    #[error("shape mismatch: expected {expected}, got {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("member ({i}, {j}) has coincident endpoints")]
    DegenerateMember { i: usize, j: usize },

    #[error("leading nodes are affinely dependent; cannot build a moving frame")]
    DegenerateFrame,

    #[error("configuration is not pinned: coordinate {coordinate} of node {node} is {value}")]
    NotPinned { node: usize, coordinate: usize, value: f64 },

    #[error("negative weight {value} on member {index}")]
    NegativeWeight { index: usize, value: f64 },

    #[error("system is not square: {equations} equations in {variables} variables")]
    NotSquare { equations: usize, variables: usize },

    #[error("start point is not a solution of the start system (residual {residual:e})")]
    BadStartPoint { residual: f64 },

    #[error("path budget exceeded: {paths} paths requested, budget is {budget}")]
    PathBudget { paths: u128, budget: u64 },

    #[error("framework has no infinitesimal flex to follow")]
    NoFlex,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

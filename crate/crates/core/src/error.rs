use thiserror::Error;

/// Errors shared by the diagram, dynamics and algebra layers.
#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum Error {
    #[error("horizon exceeded: needed layer {needed}, diagram stores {stored}")]
    HorizonExceeded { needed: usize, stored: usize },

    #[error("contraction sequence violates the parity rule at index {index}")]
    CrViolated { index: usize },

    #[error("digraph has a sink or source at vertex `{vertex}`")]
    SinkOrSource { vertex: String },

    #[error("resource budget exceeded: layer {layer} would hold {requested} vertices (cap {cap})")]
    ResourceBudgetExceeded {
        layer: usize,
        requested: usize,
        cap: usize,
    },

    #[error("operation requires even prefix depth, got {depth}")]
    OddDepth { depth: usize },

    #[error("operation requires odd prefix depth, got {depth}")]
    EvenDepth { depth: usize },

    #[error("diagram is not an h-diagram: {reason}")]
    NotHDiagram { reason: String },

    #[error("prefix depth {depth} too small, need at least {needed}")]
    InsufficientDepth { depth: usize, needed: usize },

    #[error("supplied cylinder decomposition does not match the graph: {reason}")]
    StructureMismatch { reason: String },

    #[error("stage advance past the configured budget at stage {stage}")]
    StageOverflow { stage: usize },

    #[error("no romb completion for the given pair (invalid diagram)")]
    NoCompletion,

    #[error("ambiguous romb completion for the given pair (invalid diagram)")]
    AmbiguousCompletion,

    #[error("sigma is not injective on cell `{cell}`")]
    NonInjectiveCell { cell: String },

    #[error("integer overflow in exact matrix arithmetic")]
    Overflow,

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

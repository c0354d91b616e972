use thiserror::Error;

/// Errors raised by the quadrature toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval [{a}, {b}]: need finite a < b")]
    BadInterval { a: f64, b: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("density is not bounded away from zero (min {min:e} at t = {at})")]
    NonPositiveDensity { min: f64, at: f64 },

    #[error("mesh of {mesh_size} nodes cannot resolve eigenfunction index {m_max} (need at least {required})")]
    MeshTooCoarse {
        mesh_size: usize,
        m_max: usize,
        required: usize,
    },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("eigenfunction index {index} out of range (basis holds 0..={max})")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("nodes {i} and {j} coincide")]
    DuplicateNodes { i: usize, j: usize },

    #[error("{nodes} nodes exceed the {limit} allowed by a Mercer truncation of order {order}")]
    TooManyNodesForTruncation {
        nodes: usize,
        limit: usize,
        order: usize,
    },

    #[error("Gram matrix is numerically singular")]
    SingularGram,

    #[error("basis holds indices up to {available} but {required} are needed")]
    InsufficientBasis { available: usize, required: usize },

    #[error("linear program is infeasible (phase-one residual {0:e})")]
    Infeasible(f64),

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("only {found} support points for {clusters} clusters")]
    TooFewSupportPoints { found: usize, clusters: usize },

    #[error("did not converge: {0}")]
    DidNotConverge(String),

    #[error("expected {expected} sign changes, found {found}")]
    WrongRootCount { expected: usize, found: usize },

    #[error("refined nodes are not strictly increasing inside the interval")]
    WrongOrder,

    #[error("quadrature rule violates its invariants: {0}")]
    InvalidRule(String),

    #[error("orthogonal-polynomial recurrence broke down at degree {0}")]
    MomentBreakdown(usize),

    #[error("covariance factorization failed even with jitter {0:e}")]
    FactorizationFailure(f64),

    #[error("no acceptable density after {0} draws")]
    RejectionLimit(usize),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid time grid: {0}")]
    InvalidGrid(&'static str),

    #[error("invalid dataset: {0}")]
    InvalidDataset(&'static str),

    #[error("invalid basis configuration: n_basis={n_basis}, order={order}, grid points={grid_len}")]
    InvalidBasisConfig {
        n_basis: usize,
        order: usize,
        grid_len: usize,
    },

    #[error("normal equations are rank deficient (too few points or too many basis functions)")]
    SingularFit,

    #[error("requested {requested} components but the data supports at most {available}")]
    RankError { requested: usize, available: usize },

    #[error("grid mismatch between model and data")]
    GridMismatch,

    #[error("weight function must be strictly positive")]
    NonpositiveWeight,

    #[error("model has zero total variance")]
    DegenerateModel,

    #[error("impurity of an empty node is undefined")]
    EmptyNode,

    #[error("training labels contain a single class")]
    SingleClassData,

    #[error("forest was trained without bootstrap resampling")]
    NoBootstrapInfo,

    #[error("no observations supplied")]
    EmptyData,

    #[error("score range of FPC {fpc} is zero")]
    DegenerateScores { fpc: usize },

    #[error("both classes need at least one observation (class 0: {n0}, class 1: {n1})")]
    DegenerateGroups { n0: usize, n1: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}

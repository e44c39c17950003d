use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("universe must contain at least two products (got {0})")]
    TooFewProducts(usize),

    #[error("invalid rank list: {0}")]
    InvalidRankList(String),

    #[error("product {product} is out of range for a universe of {n} products")]
    ProductOutOfRange { product: usize, n: usize },

    #[error("product {product} is not offered in the assortment")]
    NotInAssortment { product: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid prices: {0}")]
    InvalidPrices(String),

    #[error("invalid data vector: {0}")]
    InvalidData(String),

    #[error("invalid model parameters: {0}")]
    InvalidModel(String),

    #[error("N = {n} is too large for this operation (limit {limit})")]
    TooLarge { n: usize, limit: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed linear program: {0}")]
    MalformedLp(String),

    #[error("simplex iteration limit of {0} reached")]
    IterationLimit(usize),

    #[error("numerical failure in the simplex: {0}")]
    Numerical(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("unbounded: {0}")]
    Unbounded(String),
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("permutation does not preserve the projection fibers (fiber of {point} split)")]
    NotBlockCompatible { point: u32 },

    #[error("group of order {order} exceeds the enumeration budget {budget}")]
    TooLarge { order: String, budget: u64 },

    #[error("order hint {target} could not be reached (reached {reached})")]
    OrderHintUnreachable { target: String, reached: String },

    #[error("backend mismatch: expected {expected}, found {found}")]
    BackendMismatch { expected: String, found: String },

    #[error("operation not supported for this chain: {0}")]
    UnsupportedForChainKind(String),

    #[error("operation not supported by backend {0}")]
    UnsupportedBackend(String),

    #[error("level {level} exceeds the arithmetic range of the backend")]
    LevelBudgetExceeded { level: usize },

    #[error("coset space at level {level} exceeds the index budget {limit}")]
    IndexBudgetExceeded { level: usize, limit: usize },

    #[error("element does not fix vertex {0:?}")]
    VertexNotFixed(Vec<u32>),

    #[error("insufficient depth: need {needed} levels, tower has {available}")]
    InsufficientDepth { needed: usize, available: usize },

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("cache format mismatch: {0}")]
    CacheVersionMismatch(String),

    #[error("cache integrity failure: {0}")]
    CacheCorrupt(String),

    #[error("inconsistent tower: {0}")]
    ChainInconsistent(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

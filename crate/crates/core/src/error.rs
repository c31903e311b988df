use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("line {line}: {msg}")]
    Presentation { line: usize, msg: String },

    #[error("collection exceeded the step budget of {0}")]
    CollectionBudget(u64),

    #[error("presentation is inconsistent ({} failing overlaps)", .0.len())]
    Inconsistent(Vec<String>),

    #[error("group order {order} exceeds the table cap {cap}")]
    TableCap { order: u128, cap: usize },

    #[error("subgroup is not normal")]
    NotNormal,

    #[error("group is not abelian")]
    NotAbelian,

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("invalid class-2 relations: {0}")]
    Relations(String),

    #[error("coset enumeration exceeded {cap} cosets ({defined} defined, {live} live)")]
    CosetCap { cap: usize, defined: usize, live: usize },

    #[error("coset enumeration exceeded {0} passes")]
    PassCap(usize),

    #[error("engine not applicable: {0}")]
    EngineInapplicable(String),

    #[error("pairing mode not applicable: {0}")]
    ModeInapplicable(String),

    #[error("pairing has not been verified for this group")]
    UnverifiedPairing,

    #[error("wedge result does not belong to this group")]
    StaleResult,

    #[error("unknown catalog key `{0}`")]
    UnknownKey(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal check failed: {0}")]
    Internal(String),
}

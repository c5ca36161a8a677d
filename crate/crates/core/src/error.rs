use thiserror::Error;

/// Errors produced by the engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown root system type {0:?}; supported types are A_n, B_n (n>=2), C_n (n>=2), D_n (n>=4), E6, E7, E8, F4, G2")]
    UnknownType(String),

    #[error("index {index} out of range (rank {rank})")]
    IndexOutOfRange { index: usize, rank: usize },

    #[error("weight has {got} coordinates, expected {expected}")]
    RankMismatch { expected: usize, got: usize },

    #[error("non-integral deformation line: {0}")]
    NonIntegralLine(String),

    #[error("second deformation direction must be the fundamental weight of node {0}")]
    NotFundamentalDirection(usize),

    #[error("lambda1 is not of the form 2s*omega_j - rho: {0}")]
    NotOnLine(String),

    #[error("no maximal-parabolic line found for the given lambda0")]
    NoLineFound,

    #[error("weight is not dominant")]
    NotDominant,

    #[error("deformation line lies in a polar divisor (factor c(1) with t = 0)")]
    PolarDivisor,

    #[error("epsilon-power invariance violated for mu = {mu}: found powers {first} and {second}")]
    EpsilonPowerInvariance { mu: String, first: i32, second: i32 },

    #[error("inversion with t = {t} < 1 found in W_rel element {word}")]
    LeviInversion { word: String, t: i64 },

    #[error("constant part must be extracted as a unit (series has min power {0})")]
    ConstantPartInExp(i32),

    #[error("truncation windows only determine the product up to eps^{achievable}, requested eps^{requested}")]
    TruncationWindow { requested: i32, achievable: i32 },

    #[error("brute-force oracle limited to |W| <= {limit}, got {order}")]
    OracleTooLarge { order: u128, limit: u128 },

    #[error("requested precision of {requested} digits exceeds the configured working precision bound of {max} digits")]
    PrecisionUnachievable { requested: u32, max: u32 },

    #[error("symbol {0} has no numeric specialization")]
    UnspecializedSymbol(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

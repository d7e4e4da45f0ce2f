use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("B3 defined for even k only (got k = {0})")]
    OddLevel(u32),

    #[error("k = {k} exceeds the supported maximum {max}")]
    LevelTooLarge { k: u32, max: u32 },

    #[error("invalid B2 mode at level {k}: {reason}")]
    InvalidMode { k: u32, reason: String },

    #[error("B3 index ({i}, {j}) out of range 0..={k}")]
    InvalidIndex { k: u32, i: u32, j: u32 },

    #[error("Jacobi polynomial P^({a},{b})_{d} unsupported: parameters must be nonnegative")]
    UnsupportedJacobi { d: u32, a: i64, b: i64 },

    #[error("point out of range: {0}")]
    InvalidPoint(String),

    #[error("quaternion is not a unit quaternion: |q|^2 = {0}")]
    NotUnit(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("lens space L({p},{q}) requires 0 < q < p and gcd(p, q) = 1")]
    NotCoprime { p: u32, q: u32 },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("group closure exceeded {0} elements")]
    GroupTooLarge(usize),

    #[error("oracle system singular after {attempts} attempts (condition number {condition:e})")]
    SingularOracle { attempts: usize, condition: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

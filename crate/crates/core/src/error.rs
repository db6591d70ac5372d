use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid modulus {0}: every modulus must be at least 1")]
    InvalidModulus(u64),

    #[error("element {coords:?} does not belong to the group with moduli {moduli:?}")]
    NotAnElement { coords: Vec<u64>, moduli: Vec<u64> },

    #[error("group mismatch: moduli {left:?} vs {right:?}")]
    GroupMismatch { left: Vec<u64>, right: Vec<u64> },

    #[error("subgroup chain error: {0}")]
    Chain(String),

    #[error("action generator {generator} is not a permutation of the {points} points")]
    NotPermutation { generator: usize, points: usize },

    #[error("expected {expected} generator permutations (one per modulus), found {found}")]
    GeneratorCount { expected: usize, found: usize },

    #[error("weight at point {point} is {value}; weights must be positive and finite")]
    InvalidWeight { point: usize, value: f64 },

    #[error("action law violated: {0}")]
    ActionLaw(String),

    #[error("action is not free: element {tau:?} fixes point {point}")]
    NotFree { tau: Vec<u64>, point: usize },

    #[error("{points} points cannot carry a free action of a group of order {order}")]
    OrbitCount { points: usize, order: usize },

    #[error("generating set is empty")]
    EmptyGenerators,

    #[error("generator is zero; the principal space it spans is trivial")]
    DegenerateGenerator,

    #[error("subspace is not invariant (max residual {residual:e})")]
    NotInvariant { residual: f64 },

    #[error("unknown block index {0}")]
    UnknownBlock(usize),

    #[error("length must be at least 1")]
    InvalidLength,

    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::Dimension { expected, found })
        }
    }
}

use thiserror::Error;

/// Which of the two information families a quantity belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Fake,
    Good,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::Fake => "f",
            Family::Good => "g",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// A violated invariant of a [`crate::model::NetworkSpec`].
///
/// Agent indices are 1-based, as in every user-facing message.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("network must contain at least one agent")]
    NoAgents,
    #[error("`{field}` has length {got}, expected {expected}")]
    Length {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("`{field}` contains a non-finite value at agent {agent}")]
    NonFinite { field: &'static str, agent: usize },
    #[error("p_{family} is not symmetric: [{row}][{col}] = {upper} but [{col}][{row}] = {lower}")]
    Asymmetric {
        family: Family,
        row: usize,
        col: usize,
        upper: f64,
        lower: f64,
    },
    #[error("p_{family}[{agent}][{agent}] = {value}, self-couplings must be zero")]
    NonzeroDiagonal {
        family: Family,
        agent: usize,
        value: f64,
    },
    #[error("p_{family}[{row}][{col}] = {value} is negative")]
    NegativeCoupling {
        family: Family,
        row: usize,
        col: usize,
        value: f64,
    },
    #[error("omega_{family}[{agent}] = {value} must be positive")]
    NonPositiveOmega {
        family: Family,
        agent: usize,
        value: f64,
    },
    #[error("lambda[{agent}] = {value} must be nonnegative")]
    NegativeLambda { agent: usize, value: f64 },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("mode index {index} out of range for {modes} modes")]
    ModeOutOfRange { index: usize, modes: usize },
    #[error("agent index {agent} out of range for {agents} agents")]
    AgentOutOfRange { agent: usize, agents: usize },
    #[error("{modes} modes exceeds the dense cap of {cap}")]
    DimensionCap { modes: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("unknown rule id {0}, expected 0..=6")]
    UnknownRule(u8),
    #[error("invalid rule parameters: {0}")]
    InvalidRule(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("mean value {value} for {family}_{agent} is outside [0, 1]")]
    MeanOutOfRange {
        family: Family,
        agent: usize,
        value: f64,
    },
    #[error("state vector is not normalized (norm {norm})")]
    Unnormalized { norm: f64 },
    #[error("invalid initial state: {0}")]
    InvalidInitialState(String),
    #[error("unresolvable sweep parameter `{0}`")]
    UnknownParameter(String),
    #[error("unknown observable `{0}`")]
    UnknownObservable(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

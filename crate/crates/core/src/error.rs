use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("terminals {0} and {1} are not connected")]
    DisconnectedTerminals(usize, usize),

    #[error("graph is not connected")]
    DisconnectedGraph,

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: duplicate edge between nodes {u} and {v}")]
    DuplicateEdge { line: usize, u: usize, v: usize },

    #[error("line {line}: terminal {id} outside node range 1..={nodes}")]
    TerminalOutOfRange { line: usize, id: usize, nodes: usize },

    #[error("missing mandatory section `{0}`")]
    MissingSection(&'static str),

    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),

    #[error("component size bound r must be at least 2, got {0}")]
    RTooSmall(usize),

    /// A desk-scale guard was hit; every exponential routine checks one of these.
    #[error("{what} is {size}, above the guard of {limit}")]
    GuardExceeded { what: &'static str, size: usize, limit: usize },

    #[error("ratio certification needs an oracle value for opt_r")]
    MissingOracle,
}

impl Error {
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::GuardExceeded { .. })
    }
}

pub(crate) fn guard(what: &'static str, size: usize, limit: usize) -> Result<()> {
    if size > limit {
        Err(Error::GuardExceeded { what, size, limit })
    } else {
        Ok(())
    }
}

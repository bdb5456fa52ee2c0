use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ground set must have between 1 and {max} vertices, got {got}")]
    GroundSetSize { got: usize, max: usize },

    #[error("duplicate vertex label `{0}`")]
    DuplicateLabel(String),

    #[error("invalid vertex label `{0}`")]
    InvalidLabel(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("vertex index {index} out of range for ground set of size {size}")]
    VertexOutOfRange { index: usize, size: usize },

    #[error("triple sets overlap")]
    OverlappingSets,

    #[error("triple has an empty independent side")]
    EmptySide,

    #[error("objects are defined over different ground sets")]
    GroundMismatch,

    #[error("rule {0} has a disjunctive consequent and cannot be used for closure")]
    NonHornRule(&'static str),

    #[error("unknown rule `{0}`")]
    UnknownRule(String),

    #[error("unknown claim `{0}`")]
    UnknownClaim(String),

    #[error("graph has a self-loop at `{0}`")]
    SelfLoop(String),

    #[error("graph is not a forest")]
    NotAForest,

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    #[error("matrix error: {0}")]
    Matrix(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("line {line}: {message} (at `{token}`)")]
    Parse {
        line: usize,
        token: String,
        message: String,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, token: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            token: token.into(),
            message: message.into(),
        }
    }
}

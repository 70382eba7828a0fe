use thiserror::Error;

/// Errors shared across the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("candidate set is empty")]
    EmptyCandidates,

    #[error("electorate is empty")]
    EmptyElectorate,

    #[error("no expressed votes at iteration {iteration}")]
    NoExpressedVotes { iteration: usize },

    #[error("tally has no expressed votes")]
    AllAbstention,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("line {line}: malformed row: {detail}")]
    MalformedRow { line: u64, detail: String },

    #[error("line {line}: score {value} for {candidate} outside [0,100]")]
    ScoreOutOfRange {
        line: u64,
        candidate: String,
        value: f64,
    },

    #[error("line {line}: unknown candidate name {name:?} in official_vote")]
    UnknownCandidate { line: u64, name: String },

    #[error("line {line}: duplicate voter id {id:?}")]
    DuplicateVoterId { line: u64, id: String },

    #[error("candidate {name:?} has no supporters; cannot place by centroid")]
    NoSupporters { name: String },

    #[error("sample of {requested} exceeds population of {population}")]
    SampleTooLarge {
        requested: usize,
        population: usize,
    },

    #[error("line {line}: synthetic spec: {message}")]
    SyntheticSpec { line: usize, message: String },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("scenario: {0}")]
    Scenario(String),

    #[error("electorate mismatch: {0}")]
    ElectorateMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

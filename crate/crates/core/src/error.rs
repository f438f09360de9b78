use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero raised to negative exponent {0}")]
    ZeroToNegativePower(i64),
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("polynomial is not divisible: remainder {remainder}")]
    NotDivisible { remainder: String },
    #[error("{formula}: value {value} is not an integer")]
    NonIntegral { formula: &'static str, value: String },
    #[error("{formula}: two evaluation routes disagree ({left} vs {right})")]
    Inconsistent {
        formula: &'static str,
        left: String,
        right: String,
    },
    #[error("parameters out of domain: {0}")]
    OutOfDomain(String),

    #[error("label {label} out of range 1..={n}")]
    LabelOutOfRange { label: u64, n: u64 },
    #[error("cycle through vertex {0}")]
    Cycle(u32),
    #[error("vertex {0} does not reach a root")]
    Disconnected(u32),
    #[error("root {0} has a parent entry")]
    RootHasParent(u32),
    #[error("missing parent for {0}")]
    MissingParent(u32),
    #[error("expected {expected} parent entries, found {found}")]
    WrongEntryCount { expected: usize, found: usize },
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("size {requested} exceeds the configured cap {cap}")]
    CapExceeded { requested: u32, cap: u32 },
    #[error("infeasible sampling parameters: {0}")]
    Infeasible(String),

    #[error("malformed OEIS id {0:?}")]
    MalformedId(String),
    #[error("b-file line {line}: {message}")]
    BFileParse { line: usize, message: String },
    #[error("no cross-check generator for sequence {0}")]
    UnsupportedSequence(String),
    #[error("fetch failed: {0}")]
    Fetch(String),

    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

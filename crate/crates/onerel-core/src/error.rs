use alloc::string::String;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// A letter with no assigned image during substitution.
    UnassignedLetter(usize),
    /// Input outside the operation's domain.
    Precondition(String),
    /// Word syntax error at a character position.
    Parse { pos: usize, msg: String },
    /// Automata over different alphabets were combined.
    AlphabetMismatch { left: usize, right: usize },
    /// A word expected to lie in a subgroup does not.
    NotInSubgroup,
    /// A factor or base group lacks the algorithm an operation needs.
    CapabilityMissing(String),
    /// No supported decomposition applies.
    Unsupported(String),
    /// A configured size cap was hit before an answer was reached.
    ResourceExceeded { what: &'static str, limit: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnassignedLetter(g) => write!(f, "no assignment for generator {g}"),
            Error::Precondition(m) => write!(f, "precondition failed: {m}"),
            Error::Parse { pos, msg } => write!(f, "parse error at {pos}: {msg}"),
            Error::AlphabetMismatch { left, right } => {
                write!(f, "alphabet mismatch: rank {left} vs rank {right}")
            }
            Error::NotInSubgroup => write!(f, "word does not lie in the subgroup"),
            Error::CapabilityMissing(m) => write!(f, "capability missing: {m}"),
            Error::Unsupported(m) => write!(f, "unsupported: {m}"),
            Error::ResourceExceeded { what, limit } => {
                write!(f, "resource exceeded: {what} over {limit}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

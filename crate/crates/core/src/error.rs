use thiserror::Error;

/// Errors raised by the library.
///
/// Variants split into parameter/usage problems (bad widths, malformed
/// input) and domain failures (a family breaks a hypothesis, a lemma's
/// conclusion does not hold). [`Error::is_domain`] tells them apart.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ground size {0} is outside the supported range 1..={max}", max = crate::family::MAX_GROUND)]
    Width(usize),

    #[error("element {element} is out of range for ground size {n}")]
    ElementRange { element: usize, n: usize },

    #[error("ground size mismatch: {left} vs {right}")]
    Context { left: usize, right: usize },

    #[error("empty input: {0}")]
    Arity(&'static str),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("duplicate members at positions {first} and {second}: {set}")]
    Duplicate {
        first: usize,
        second: usize,
        set: String,
    },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("order violated: {0}")]
    Order(String),

    #[error("internal invariant failure: {0}")]
    Invariant(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("parse error{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse {
            line: None,
            msg: msg.into(),
        }
    }

    pub(crate) fn at_line(self, line: usize) -> Self {
        match self {
            Error::Parse { msg, .. } => Error::Parse {
                line: Some(line),
                msg,
            },
            Error::Verification(msg) => Error::Verification(format!("line {line}: {msg}")),
            other if other.is_domain() => Error::Verification(format!("line {line}: {other}")),
            other => Error::Parse {
                line: Some(line),
                msg: other.to_string(),
            },
        }
    }

    /// True for failures of the mathematical content (invalid family,
    /// violated hypothesis, broken lemma conclusion) as opposed to bad
    /// parameters or malformed input.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Duplicate { .. }
                | Error::Hypothesis(_)
                | Error::Order(_)
                | Error::Invariant(_)
                | Error::Verification(_)
                | Error::Precondition(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

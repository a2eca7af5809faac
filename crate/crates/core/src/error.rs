use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Structural problems with a raw vertex/edge description.
///
/// `line` is filled in when the description came from a text file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForestError {
    #[error("{}duplicate vertex id `{id}`", at(*line))]
    DuplicateVertexId { id: String, line: Option<usize> },
    #[error("{}edge `{a}`-`{b}` references unknown vertex `{missing}`", at(*line))]
    DanglingEdge {
        a: String,
        b: String,
        missing: String,
        line: Option<usize>,
    },
    #[error("{}self-loop at vertex `{id}`", at(*line))]
    SelfLoop { id: String, line: Option<usize> },
    #[error("{}duplicate edge `{a}`-`{b}`", at(*line))]
    DuplicateEdge {
        a: String,
        b: String,
        line: Option<usize>,
    },
    #[error("{}edge `{a}`-`{b}` closes a cycle", at(*line))]
    CycleDetected {
        a: String,
        b: String,
        line: Option<usize>,
    },
}

impl ForestError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ForestError::DuplicateVertexId { line, .. }
            | ForestError::DanglingEdge { line, .. }
            | ForestError::SelfLoop { line, .. }
            | ForestError::DuplicateEdge { line, .. }
            | ForestError::CycleDetected { line, .. } => *line,
        }
    }
}

fn at(line: Option<usize>) -> String {
    match line {
        Some(l) => format!("line {l}: "),
        None => String::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid JSON plumbing document: {0}")]
    Json(String),
    #[error("invalid Seifert data: {0}")]
    Seifert(String),
    #[error("continued fraction needs coprime 0 < beta < alpha, got {alpha}/{beta}")]
    InvalidFraction { alpha: i64, beta: i64 },
    #[error("Seifert data gives no negative-definite star plumbing in either orientation")]
    NotNegativeDefiniteEitherOrientation,
    #[error("intersection form is not negative-definite")]
    NotNegativeDefinite,
    #[error("forest has bad vertices; the semidefinite classification does not apply")]
    NotApplicable,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vector has {got} entries but the forest has {expected} vertices")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector is not characteristic at vertex index {vertex}")]
    NotCharacteristic { vertex: usize },
    #[error("(x,x) + <k0,x> is odd; k0 is not characteristic for this form")]
    ParityViolation,
    #[error("characteristic vectors lie in different orbits")]
    DifferentOrbits,
    #[error("box has {size} characteristic vectors, over the cap of {cap}")]
    BoxTooLarge { size: u128, cap: u64 },
    #[error("enumeration exceeded the budget of {cap} lattice points")]
    EnumerationBudgetExceeded { cap: u64 },
    #[error("vertex `{id}` cannot be blown down: {reason}")]
    NotBlowdownable { id: String, reason: String },
    #[error("invalid surgery triple: {0}")]
    InvalidTriple(String),
    #[error("total dimension {total} is below |det| = {det}; odd summand would be negative")]
    NegativeOddDimension { total: u64, det: u64 },
    #[error("exact integer arithmetic overflowed machine range")]
    Overflow,
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    /// Errors caused by an input that is malformed or fails validation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Forest(_)
                | Error::Syntax { .. }
                | Error::Json(_)
                | Error::Seifert(_)
                | Error::InvalidFraction { .. }
                | Error::NotNegativeDefiniteEitherOrientation
                | Error::NotNegativeDefinite
                | Error::NotApplicable
                | Error::UnknownVertex(_)
                | Error::DimensionMismatch { .. }
                | Error::NotCharacteristic { .. }
                | Error::ParityViolation
                | Error::DifferentOrbits
                | Error::NotBlowdownable { .. }
                | Error::InvalidTriple(_)
        )
    }

    pub fn is_budget_error(&self) -> bool {
        matches!(
            self,
            Error::BoxTooLarge { .. } | Error::EnumerationBudgetExceeded { .. } | Error::Overflow
        )
    }

    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::InvariantViolation(_) | Error::NegativeOddDimension { .. }
        )
    }
}

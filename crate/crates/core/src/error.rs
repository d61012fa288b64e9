use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Hilbert-space dimension {0} (must be at least 2)")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {dim} for {what}")]
    UnsupportedDimension { dim: usize, what: &'static str },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("outcome {index}: {reason}")]
    InvalidOutcome { index: usize, reason: String },

    #[error("outcomes do not sum to the identity (deviation {deviation:.3e})")]
    Incomplete { deviation: f64 },

    #[error("random POM draw stayed degenerate after {attempts} attempts")]
    DegenerateDraw { attempts: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("probability of outcome {index} is {probability:.3e}, at or below the floor")]
    ZeroProbability { index: usize, probability: f64 },

    #[error("measurement is not informationally complete (smallest singular value {s_min:.3e})")]
    NotInformationallyComplete { s_min: f64 },

    #[error("POM is not minimally complete: {0}")]
    NotMinimal(String),

    #[error("POM is not a set of minimally complete bases: {0}")]
    NotMinimalBases(String),

    #[error("Haar moments are implemented up to order 4, requested {0}")]
    UnsupportedOrder(usize),

    #[error("series evaluation needs {required} {unit}, budget is {budget}; use Monte Carlo instead")]
    BudgetExceeded { required: u128, budget: u128, unit: &'static str },

    #[error("{rejected} of {drawn} Haar draws hit a vanishing probability")]
    PathologicalPom { rejected: usize, drawn: usize },

    #[error("no counterexample pair found after {attempts} attempts")]
    SearchExhausted { attempts: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

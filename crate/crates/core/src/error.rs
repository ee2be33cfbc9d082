use thiserror::Error;

/// Faults raised by the library. Running out of fuel is not a fault; see
/// [`crate::Search`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed rational `{0}`")]
    BadRational(String),
    #[error("set is empty")]
    EmptySet,
    #[error("closed sets are not disjoint (both contain {0})")]
    NotDisjoint(String),
    #[error("Pincherle oracle answered inconsistently: {0}")]
    OracleUnsound(String),
    #[error("fullness test undetermined at depth {depth}")]
    Undetermined { depth: u32 },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

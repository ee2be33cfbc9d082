//! Exact computation with open and closed subsets of `[0, 1]`.
//!
//! Open sets come in four presentations of increasing information content:
//! a bare value oracle ([`OpenR1`]), a radius oracle ([`OpenR2`]), a
//! distance-to-complement function ([`OpenR3`]) and an enumeration of
//! rational intervals ([`OpenR4`]). Finite unions of rational intervals
//! ([`FinOpen`], [`FinClosed`]) are the exactly checkable ground truth that
//! every search is verified against.
//!
//! Searches that may not terminate take an explicit fuel budget and answer
//! [`Search::Exhausted`] when it runs out.

pub mod adversary;
pub mod baire;
pub mod enumerate;
pub mod error;
pub mod heine_borel;
pub mod interval;
pub mod rational;
pub mod real;
pub mod represent;
pub mod urysohn;

pub use error::Error;
pub use interval::{covers, measure, FinClosed, FinOpen, IntervalKind, OpenUnion, RatInterval};
pub use rational::Rational;
pub use real::{real_approx, real_cmp, CauchyReal, RealOrdering};
pub use represent::{ClosedRM, OpenR1, OpenR2, OpenR3, OpenR4};

/// Result of a fuel-bounded search.
#[derive(Debug, Clone, PartialEq, Eq)]
#[must_use]
pub enum Search<T> {
    Found(T),
    /// No answer within the budget. Not evidence of a negative answer.
    Exhausted,
}

impl<T> Search<T> {
    pub fn found(self) -> Option<T> {
        match self {
            Search::Found(t) => Some(t),
            Search::Exhausted => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Search::Found(_))
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Search<U> {
        match self {
            Search::Found(t) => Search::Found(f(t)),
            Search::Exhausted => Search::Exhausted,
        }
    }

    #[track_caller]
    pub fn unwrap(self) -> T {
        match self {
            Search::Found(t) => t,
            Search::Exhausted => panic!("search exhausted its fuel"),
        }
    }
}

impl<T> From<Option<T>> for Search<T> {
    fn from(o: Option<T>) -> Self {
        match o {
            Some(t) => Search::Found(t),
            None => Search::Exhausted,
        }
    }
}

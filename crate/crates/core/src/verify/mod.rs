//! Independent oracles and trace checkers.

pub mod checker;
pub mod compare;
pub mod oracles;

use serde::{Deserialize, Serialize};

use crate::geom::{serde_rational, Rational};

pub use checker::check_trace;
pub use compare::compare_runs;
pub use oracles::{brute_bridges, domination_oracle, feature_gap, stability_oracle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    LemmaLowerBreach,
    ContainmentBreach,
    MonotonicityBreach,
    OracleMismatch,
    PathPropertyBreach,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    #[serde(with = "serde_rational")]
    pub time: Rational,
    pub details: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?} at t={}: {}", self.kind, crate::geom::format_rational(&self.time), self.details)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    MalformedTrace(#[from] crate::dynamics::trace::TraceError),
    #[error("traces are not comparable: {0}")]
    IncompatibleTraces(String),
}

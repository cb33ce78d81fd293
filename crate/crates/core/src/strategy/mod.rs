//! The catching strategy: decomposition below the top line and the
//! closed-loop controller that shrinks the allowed region until capture.

pub mod controller;
pub mod decompose;

pub use controller::{
    normalize_start, plan_iteration, run_strategy, Plan, PruneLogEntry, PruneRule, StrategyCaps, StrategyError,
    StrategyReport,
};
pub use decompose::{decompose, dominates, top_edges, ComponentInfo, DecomposeError, DecompositionContext};

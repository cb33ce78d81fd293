//! Time evolution of a configuration while the human walks.

pub mod descent;
pub mod policy;
pub mod sim;
pub mod trace;

pub use descent::{decreasing_directions, edge_local_min, is_captured, is_stable, stabilize, Leg, Stabilized};
pub use policy::{FirstPolicy, GreedyAdversarialPolicy, PolicySpec, PuppyPolicy, SeededRandomPolicy};
pub use sim::{fixed_step_simulate, simulate_move, simulate_path, PuppyMode, SimError, SimState};
pub use trace::{Event, EventKind, Outcome, PruneRecord, Trace, TraceError, TraceHeader};

//! Closed-loop catching strategy.
//!
//! After every elementary move the controller looks at the live configuration
//! and either prunes the allowed region or takes one more step. Prunings:
//!
//! * clip: the human stands on the top line of a region that still reaches
//!   above it, so everything above the line is dropped;
//! * shared component: human and puppy are in the same component below the
//!   top line, so the top line and every other component are dropped;
//! * closure: both actors are inside `D(C)` for a component `C` on the
//!   puppy's domination chain, and `D(C)` is smaller than the region.
//!
//! Otherwise the human heads for the next component on the puppy's chain.

use serde::{Deserialize, Serialize};

use crate::dynamics::policy::PuppyPolicy;
use crate::dynamics::sim::{simulate_move, start_trace, SimError, SimState};
use crate::dynamics::trace::{Event, EventKind, Outcome, PruneRecord, Trace};
use crate::embedding::{Configuration, Embedding, EmbeddingError, Position};
use crate::geom::{serde_rational, Orientation, Rational};
use crate::graph::{bridges, path_between, ElementaryMove, Routes};
use crate::region::{AllowedRegion, RegionError, Restriction};

use super::decompose::{decompose, top_edges, DecomposeError, DecompositionContext};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyCaps {
    pub max_moves: usize,
    pub max_prunings: usize,
}

impl StrategyCaps {
    /// `10·|E|²` elementary moves and `|E|` prunings.
    pub fn for_embedding(emb: &Embedding) -> Self {
        let e = emb.edge_count();
        StrategyCaps { max_moves: 10 * e * e, max_prunings: e }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PruneRule {
    ClipAbove,
    SharedComponent,
    Closure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneLogEntry {
    pub rule: PruneRule,
    pub restriction: Restriction,
    #[serde(with = "serde_rational")]
    pub measure_before: Rational,
    #[serde(with = "serde_rational")]
    pub measure_after: Rational,
    /// Number of top-line edges when the pruning was decided.
    pub top_edges: usize,
    /// The single top-line edge was a bridge of the region.
    pub bridge: bool,
}

#[derive(Debug, Clone)]
pub struct StrategyReport {
    pub outcome: Outcome,
    pub prunings: usize,
    pub moves: usize,
    pub trace: Trace,
    pub log: Vec<PruneLogEntry>,
    /// Every elementary move the human made, in order.
    pub path: Vec<ElementaryMove>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StrategyError {
    #[error("the strategy needs a connected drawing")]
    Disconnected,
    #[error("strategy invariant violated: {0}")]
    InvariantViolated(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Plan {
    /// Route for the human; the controller executes only its first move.
    Walk(Vec<ElementaryMove>),
    Prune(PruneRule, Restriction),
}

/// Planner with the decomposition of the last region cached.
#[derive(Default)]
pub struct Planner {
    cache: Option<(AllowedRegion, DecompositionContext)>,
}

fn violated(msg: impl Into<String>) -> StrategyError {
    StrategyError::InvariantViolated(msg.into())
}

/// All allowed edges lie on one line.
fn is_straight(emb: &Embedding, region: &AllowedRegion) -> bool {
    let mut edges = region.allowed_edges();
    let Some(first) = edges.next() else { return true };
    let e0 = emb.edge(first);
    let p0 = emb.point(e0.u);
    edges.all(|e| {
        let edge = emb.edge(e);
        let p = emb.point(edge.u);
        edge.orientation == e0.orientation
            && match e0.orientation {
                Orientation::Horizontal => p.y == p0.y,
                Orientation::Vertical => p.x == p0.x,
            }
    })
}

fn walk_to(emb: &Embedding, region: &AllowedRegion, from: &Position, to: &Position) -> Result<Plan, StrategyError> {
    let path = path_between(emb, region, from, to).map_err(|_| violated("target unreachable inside the region"))?;
    Ok(Plan::Walk(path))
}

fn route_length(emb: &Embedding, moves: &[ElementaryMove]) -> Rational {
    moves.iter().map(|m| m.duration(emb)).sum()
}

/// Shortest route from `from` to the nearest of `targets` (earliest on ties).
fn nearest_route(
    emb: &Embedding,
    region: &AllowedRegion,
    from: &Position,
    targets: impl IntoIterator<Item = Position>,
) -> Option<Vec<ElementaryMove>> {
    let routes = Routes::from(emb, region, from);
    let mut best: Option<(Rational, Vec<ElementaryMove>)> = None;
    for t in targets {
        if let Some(path) = routes.path_to(emb, region, &t) {
            let len = route_length(emb, &path);
            if best.as_ref().is_none_or(|(b, _)| len < *b) {
                best = Some((len, path));
            }
        }
    }
    best.map(|(_, p)| p)
}

fn top_vertices(emb: &Embedding, t: &[crate::embedding::EdgeId]) -> Vec<Position> {
    let mut out: Vec<Position> = t
        .iter()
        .flat_map(|&e| {
            let edge = emb.edge(e);
            [Position::AtVertex(edge.u), Position::AtVertex(edge.v)]
        })
        .collect();
    out.dedup();
    out
}

impl Planner {
    fn context(&mut self, emb: &Embedding, region: &AllowedRegion) -> Result<&DecompositionContext, StrategyError> {
        if self.cache.as_ref().is_none_or(|(r, _)| r != region) {
            self.cache = Some((region.clone(), decompose(emb, region)?));
        }
        Ok(&self.cache.as_ref().unwrap().1)
    }

    pub fn plan(&mut self, emb: &Embedding, region: &AllowedRegion, config: &Configuration) -> Result<Plan, StrategyError> {
        let (human, puppy) = (&config.human, &config.puppy);
        // Nothing below holds once strands cross, so just give chase.
        if emb.crossing_count() > 0 {
            return walk_to(emb, region, human, puppy);
        }
        let Some((m, t)) = top_edges(emb, region).filter(|_| !is_straight(emb, region)) else {
            return walk_to(emb, region, human, puppy);
        };
        if region.max_y(emb).is_some_and(|y| y > m) {
            if emb.point_of(human).y == m {
                return Ok(Plan::Prune(PruneRule::ClipAbove, Restriction::AboveHeight(m)));
            }
            let path = nearest_route(emb, region, human, top_vertices(emb, &t))
                .ok_or_else(|| violated("top line unreachable"))?;
            return Ok(Plan::Walk(path));
        }

        let ctx = self.context(emb, region)?;
        let hc = ctx.labels.of_position(emb, human);
        if hc.is_some() && hc == ctx.labels.of_position(emb, puppy) {
            let cut = Restriction::Compound(vec![
                Restriction::RemoveEdges(ctx.t_set()),
                Restriction::KeepComponentOf(human.clone()),
            ]);
            return Ok(Plan::Prune(PruneRule::SharedComponent, cut));
        }

        let pc = ctx.component_of(emb, puppy).ok_or_else(|| violated("puppy outside every component"))?;
        let chain = ctx.chain(pc);
        let measure = region.measure(emb);
        let mut deepest_human = None;
        for (i, &c) in chain.iter().enumerate().rev() {
            let keep = ctx.closure_edges(emb, c);
            // The closure of a point component has no edges and holds nobody.
            let Ok(cand) = region.restrict(emb, &Restriction::KeepEdges(keep.clone())) else { continue };
            if !cand.contains(emb, human) {
                continue;
            }
            deepest_human.get_or_insert(i);
            if cand.contains(emb, puppy) && cand.measure(emb) < measure {
                return Ok(Plan::Prune(PruneRule::Closure, Restriction::KeepEdges(keep)));
            }
        }
        let target = match deepest_human {
            None => chain[0],
            Some(i) => chain[(i + 1).min(chain.len() - 1)],
        };
        let tops = ctx.components[target].top.iter().map(|(_, p)| p.clone()).collect::<Vec<_>>();
        match nearest_route(emb, region, human, tops) {
            Some(path) if !path.is_empty() => Ok(Plan::Walk(path)),
            _ => walk_to(emb, region, human, puppy),
        }
    }
}

/// One planning step from scratch (no cached decomposition).
pub fn plan_iteration(emb: &Embedding, region: &AllowedRegion, config: &Configuration) -> Result<Plan, StrategyError> {
    Planner::default().plan(emb, region, config)
}

/// Walks the human to the nearest top-line vertex of `region`, after which
/// the puppy is no higher than the human.
pub fn normalize_start(
    emb: &Embedding,
    region: &AllowedRegion,
    state: &SimState,
    policy: &mut dyn PuppyPolicy,
) -> Result<(SimState, Vec<Event>), StrategyError> {
    let Some((m, t)) = top_edges(emb, region) else { return Ok((state.clone(), Vec::new())) };
    if emb.point_of(&state.config.human).y == m {
        return Ok((state.clone(), Vec::new()));
    }
    let path = nearest_route(emb, region, &state.config.human, top_vertices(emb, &t))
        .ok_or_else(|| violated("top line unreachable"))?;
    let mut st = state.clone();
    let mut events = Vec::new();
    for mv in &path {
        let (next, ev) = simulate_move(emb, &st, mv, policy)?;
        events.extend(ev);
        st = next;
        if st.captured {
            break;
        }
    }
    Ok((st, events))
}

pub fn run_strategy(
    emb: &Embedding,
    initial: &Configuration,
    policy: &mut dyn PuppyPolicy,
    caps: &StrategyCaps,
) -> Result<StrategyReport, StrategyError> {
    if !emb.is_connected() {
        return Err(StrategyError::Disconnected);
    }
    let (mut trace, mut state) = start_trace(emb, initial, policy, "event")?;
    let mut region = AllowedRegion::full(emb);
    let mut planner = Planner::default();
    let (mut moves, mut prunings) = (0, 0);
    let mut log = Vec::new();
    let mut walked = Vec::new();
    let outcome = loop {
        if state.captured {
            break Outcome::Captured { time: state.time.clone() };
        }
        if !region.contains(emb, &state.config.puppy) {
            return Err(violated(format!("puppy left the allowed region at time {}", state.time)));
        }
        if !region.contains(emb, &state.config.human) {
            return Err(violated("human left the allowed region"));
        }
        match planner.plan(emb, &region, &state.config)? {
            Plan::Prune(rule, cut) => {
                if prunings >= caps.max_prunings {
                    break Outcome::CapExceeded;
                }
                let next = region.restrict(emb, &cut)?;
                let (before, after) = (region.measure(emb), next.measure(emb));
                if after >= before {
                    return Err(violated("pruning did not shrink the region"));
                }
                if !next.contains(emb, &state.config.puppy) || !next.contains(emb, &state.config.human) {
                    return Err(violated(format!("{rule:?} pruning would exclude an actor")));
                }
                let t = top_edges(emb, &region).map(|(_, t)| t).unwrap_or_default();
                let bridge = t.len() == 1 && bridges(emb, &region).is_ok_and(|b| b.contains(&t[0]));
                log.push(PruneLogEntry {
                    rule,
                    restriction: cut.clone(),
                    measure_before: before.clone(),
                    measure_after: after.clone(),
                    top_edges: t.len(),
                    bridge,
                });
                trace.events.push(Event {
                    time: state.time.clone(),
                    kind: EventKind::Prune(PruneRecord {
                        restriction: cut,
                        measure_before: before,
                        measure_after: after,
                        line: next.max_y(emb).expect("nonempty region"),
                        region: next.clone(),
                    }),
                    human: state.config.human.clone(),
                    puppy: state.config.puppy.clone(),
                });
                region = next;
                prunings += 1;
            }
            Plan::Walk(path) => {
                let Some(mv) = path.first() else { return Err(violated("empty route while not captured")) };
                if moves >= caps.max_moves {
                    break Outcome::CapExceeded;
                }
                let (next, events) = simulate_move(emb, &state, mv, policy)?;
                trace.events.extend(events);
                state = next;
                walked.push(mv.clone());
                moves += 1;
            }
        }
    };
    trace.outcome = outcome.clone();
    Ok(StrategyReport { outcome, prunings, moves, trace, log, path: walked })
}

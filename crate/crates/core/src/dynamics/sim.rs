//! Continuous coupling of human motion and puppy motion.
//!
//! While the human walks an elementary move at unit speed in direction `w`, the
//! only dot product `(h - p) · u` that changes is the one with `u = w`, and it
//! changes linearly. So a resting puppy starts to slide exactly when that dot
//! product reaches zero, and a sliding puppy moves in lockstep with the human
//! until it reaches a vertex. Every event time solves a linear equation and is
//! an exact rational.

use num_traits::{Signed, Zero};

use crate::embedding::{Configuration, Direction, Embedding, EmbeddingError, Position};
use crate::geom::{AxisDir, Rational};
use crate::graph::ElementaryMove;
use crate::region::AllowedRegion;

use super::descent::{is_captured, stabilize};
use super::policy::PuppyPolicy;
use super::trace::{Event, EventKind, Outcome, Trace};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PuppyMode {
    Resting,
    Sliding(Direction),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimState {
    pub config: Configuration,
    pub mode: PuppyMode,
    pub time: Rational,
    pub captured: bool,
}

impl SimState {
    pub fn new(config: Configuration) -> Self {
        SimState { config, mode: PuppyMode::Resting, time: Rational::zero(), captured: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("more than {0} events in a single move")]
    CapExceeded(usize),
    #[error("move {0} does not start where the human is")]
    DiscontinuousPath(usize),
    #[error("human and puppy lie in different connected components")]
    ImpossibleChase,
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

/// Per-move safety cap on processed events.
pub fn event_cap(emb: &Embedding) -> usize {
    8 * (emb.vertex_count() + emb.edge_count()) + 32
}

fn move_direction(emb: &Embedding, mv: &ElementaryMove) -> AxisDir {
    let d = emb.edge(mv.edge).dir;
    if mv.to > mv.from {
        d
    } else {
        d.opposite()
    }
}

fn human_at(emb: &Embedding, mv: &ElementaryMove, dir: AxisDir, elapsed: &Rational) -> Position {
    let start = mv.start(emb);
    emb.advance(&start, &Direction { edge: mv.edge, dir }, elapsed)
}

/// Applies a descent cascade at the current instant and records it.
pub(crate) fn settle(
    emb: &Embedding,
    state: &mut SimState,
    policy: &mut dyn PuppyPolicy,
    events: &mut Vec<Event>,
) {
    let s = stabilize(emb, &state.config, policy);
    if !s.legs.is_empty() {
        state.config.puppy = s.puppy;
        events.push(Event {
            time: state.time.clone(),
            kind: EventKind::DescentCascade { legs: s.legs },
            human: state.config.human.clone(),
            puppy: state.config.puppy.clone(),
        });
    }
    if s.captured {
        state.captured = true;
        events.push(Event {
            time: state.time.clone(),
            kind: EventKind::Capture,
            human: state.config.human.clone(),
            puppy: state.config.puppy.clone(),
        });
    }
}

/// Integrates one elementary move exactly.
///
/// The puppy must be stable at the start (call [`stabilize`] first). The move
/// ends early on capture.
pub fn simulate_move(
    emb: &Embedding,
    state: &SimState,
    mv: &ElementaryMove,
    policy: &mut dyn PuppyPolicy,
) -> Result<(SimState, Vec<Event>), SimError> {
    let mut st = state.clone();
    let mut events = Vec::new();
    let start = mv.start(emb);
    if emb.point_of(&start) != emb.point_of(&st.config.human) {
        return Err(SimError::DiscontinuousPath(0));
    }
    st.config.human = start;
    st.mode = PuppyMode::Resting;
    let ev = |st: &SimState, kind| Event {
        time: st.time.clone(),
        kind,
        human: st.config.human.clone(),
        puppy: st.config.puppy.clone(),
    };
    if is_captured(emb, &st.config) {
        st.captured = true;
        events.push(ev(&st, EventKind::Capture));
        return Ok((st, events));
    }
    let duration = mv.duration(emb);
    if duration.is_zero() {
        events.push(ev(&st, EventKind::Waypoint));
        return Ok((st, events));
    }
    let w = move_direction(emb, mv);
    let t0 = st.time.clone();
    let t_end = &t0 + &duration;
    let cap = event_cap(emb);

    loop {
        if events.len() > cap {
            return Err(SimError::CapExceeded(cap));
        }
        let elapsed = &st.time - &t0;
        let h = emb.point_of(&st.config.human);
        match st.mode.clone() {
            PuppyMode::Resting => {
                let along = emb
                    .incident_directions(&st.config.puppy)?
                    .into_iter()
                    .find(|d| d.dir == w);
                let Some(dir) = along else { break };
                let p = emb.point_of(&st.config.puppy);
                let dot = h.dot_from(&p, w);
                assert!(!dot.is_positive(), "resting puppy is not stable");
                let wait = -dot;
                if &st.time + &wait >= t_end {
                    break;
                }
                if wait.is_positive() {
                    st.time = &st.time + &wait;
                    st.config.human = human_at(emb, mv, w, &(&elapsed + &wait));
                    events.push(ev(&st, EventKind::StabilityBreak));
                }
                st.mode = PuppyMode::Sliding(dir);
                events.push(ev(&st, EventKind::SlideStart));
            }
            PuppyMode::Sliding(dir) => {
                let room = emb.room(&st.config.puppy, &dir);
                let left = &t_end - &st.time;
                if room > left {
                    st.config.puppy = emb.advance(&st.config.puppy, &dir, &left);
                    break;
                }
                st.time = &st.time + &room;
                st.config.human = human_at(emb, mv, w, &(&elapsed + &room));
                st.config.puppy = emb.advance(&st.config.puppy, &dir, &room);
                events.push(ev(&st, EventKind::ReachVertex));
                settle(emb, &mut st, policy, &mut events);
                if st.captured {
                    return Ok((st, events));
                }
                st.mode = PuppyMode::Resting;
                let continues = emb
                    .incident_directions(&st.config.puppy)?
                    .into_iter()
                    .find(|d| d.dir == w)
                    .filter(|_| {
                        let h = emb.point_of(&st.config.human);
                        h.dot_from(&emb.point_of(&st.config.puppy), w).is_zero()
                    });
                match continues {
                    Some(next) if st.time < t_end => st.mode = PuppyMode::Sliding(next),
                    _ => events.push(ev(&st, EventKind::SlideEnd)),
                }
            }
        }
    }
    st.time = t_end;
    st.config.human = mv.end(emb);
    events.push(ev(&st, EventKind::Waypoint));
    // A sliding puppy is at its foot when the human stops, which is stable.
    st.mode = PuppyMode::Resting;
    debug_assert!(super::descent::is_stable(emb, &st.config), "{:?} {:?}", st.config, events);
    Ok((st, events))
}

fn same_component(emb: &Embedding, a: &Position, b: &Position) -> bool {
    let comps = crate::graph::components(emb, &AllowedRegion::full(emb), &Default::default());
    comps.of_position(emb, a) == comps.of_position(emb, b)
}

pub(crate) fn start_trace(
    emb: &Embedding,
    initial: &Configuration,
    policy: &mut dyn PuppyPolicy,
    simulator: &str,
) -> Result<(Trace, SimState), SimError> {
    emb.check_position(&initial.human)?;
    emb.check_position(&initial.puppy)?;
    if !same_component(emb, &initial.human, &initial.puppy) {
        return Err(SimError::ImpossibleChase);
    }
    let mut trace = Trace::new(emb, policy.id(), policy.seed(), simulator, initial.clone());
    let mut state = SimState::new(initial.clone());
    settle(emb, &mut state, policy, &mut trace.events);
    if state.captured {
        trace.outcome = Outcome::Captured { time: state.time.clone() };
    }
    Ok((trace, state))
}

/// Folds [`simulate_move`] over a continuous chain of moves; stops at capture.
pub fn simulate_path(
    emb: &Embedding,
    initial: &Configuration,
    moves: &[ElementaryMove],
    policy: &mut dyn PuppyPolicy,
) -> Result<Trace, SimError> {
    let (mut trace, mut state) = start_trace(emb, initial, policy, "event")?;
    if state.captured {
        return Ok(trace);
    }
    for (i, mv) in moves.iter().enumerate() {
        let (next, events) = simulate_move(emb, &state, mv, policy).map_err(|e| match e {
            SimError::DiscontinuousPath(_) => SimError::DiscontinuousPath(i),
            other => other,
        })?;
        trace.events.extend(events);
        state = next;
        if state.captured {
            trace.outcome = Outcome::Captured { time: state.time.clone() };
            break;
        }
    }
    Ok(trace)
}

/// Independent approximation: advance the human by at most `delta`, then fully
/// stabilize the puppy, and repeat.
pub fn fixed_step_simulate(
    emb: &Embedding,
    initial: &Configuration,
    moves: &[ElementaryMove],
    policy: &mut dyn PuppyPolicy,
    delta: &Rational,
) -> Result<Trace, SimError> {
    let gap = emb.min_coordinate_gap();
    if !delta.is_positive() || gap.as_ref().is_some_and(|g| delta * Rational::from_integer(4.into()) > *g) {
        return Err(SimError::PreconditionViolation(format!(
            "step {} must be positive and at most a quarter of the minimum coordinate gap",
            crate::geom::format_rational(delta)
        )));
    }
    let (mut trace, mut state) = start_trace(emb, initial, policy, "fixed_step")?;
    if state.captured {
        return Ok(trace);
    }
    for (i, mv) in moves.iter().enumerate() {
        let start = mv.start(emb);
        if emb.point_of(&start) != emb.point_of(&state.config.human) {
            return Err(SimError::DiscontinuousPath(i));
        }
        state.config.human = start;
        let duration = mv.duration(emb);
        let w = move_direction(emb, mv);
        let mut done = Rational::zero();
        while done < duration {
            let step = if &duration - &done < *delta { &duration - &done } else { delta.clone() };
            done += &step;
            state.time += &step;
            state.config.human = human_at(emb, mv, w, &done);
            settle(emb, &mut state, policy, &mut trace.events);
            if state.captured {
                trace.outcome = Outcome::Captured { time: state.time.clone() };
                return Ok(trace);
            }
        }
        state.config.human = mv.end(emb);
        trace.events.push(Event {
            time: state.time.clone(),
            kind: EventKind::Waypoint,
            human: state.config.human.clone(),
            puppy: state.config.puppy.clone(),
        });
    }
    Ok(trace)
}

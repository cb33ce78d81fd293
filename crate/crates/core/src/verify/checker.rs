//! Replays a trace epoch by epoch and checks what must hold between prunings.

use crate::dynamics::trace::{EventKind, Trace, TraceError};
use crate::embedding::{Embedding, Position};
use crate::geom::{format_rational, Rational};
use crate::region::AllowedRegion;
use crate::strategy::PruneLogEntry;

use super::{Violation, ViolationKind, VerifyError};

struct Epoch {
    region: AllowedRegion,
    line: Rational,
    /// The human has not been above `line` since the epoch began.
    human_below: bool,
}

impl Epoch {
    fn new(region: AllowedRegion, line: Rational) -> Self {
        Epoch { region, line, human_below: true }
    }

    /// At most one violation per observed puppy position. A puppy above the
    /// line while the human never was is reported as the lemma breach even
    /// though it is also outside the region.
    fn observe(&mut self, emb: &Embedding, time: &Rational, human: Option<&Position>, puppy: &Position, out: &mut Vec<Violation>) {
        if let Some(h) = human {
            if emb.point_of(h).y > self.line {
                self.human_below = false;
            }
        }
        let py = emb.point_of(puppy).y;
        if self.human_below && py > self.line {
            out.push(Violation {
                kind: ViolationKind::LemmaLowerBreach,
                time: time.clone(),
                details: format!("puppy at y={} above line {} while the human stayed below", format_rational(&py), format_rational(&self.line)),
            });
        } else if !self.region.contains(emb, puppy) {
            out.push(Violation {
                kind: ViolationKind::ContainmentBreach,
                time: time.clone(),
                details: format!("puppy at {puppy:?} outside the allowed region"),
            });
        }
    }
}

/// Checks a finished trace. `log` is the pruning log of the run when at hand;
/// it must then list the prunings recorded in the trace, in order.
pub fn check_trace(trace: &Trace, log: &[PruneLogEntry]) -> Result<Vec<Violation>, VerifyError> {
    let emb = trace.embedding()?;
    let records: Vec<_> = trace.events.iter().filter(|e| matches!(e.kind, EventKind::Prune(_))).collect();
    if !log.is_empty() && log.len() != records.len() {
        return Err(TraceError::Malformed(format!("{} log entries for {} prune events", log.len(), records.len())).into());
    }
    for ev in &trace.events {
        for p in [&ev.human, &ev.puppy] {
            emb.check_position(p).map_err(|e| TraceError::Malformed(e.to_string()))?;
        }
    }

    let start = trace.header.region.clone();
    let line = start.max_y(&emb).ok_or_else(|| TraceError::Malformed("empty starting region".into()))?;
    let mut epoch = Epoch::new(start, line);
    let mut out = Vec::new();
    let mut pruned = 0;
    epoch.observe(&emb, &Rational::from_integer(0.into()), Some(&trace.header.initial.human), &trace.header.initial.puppy, &mut out);

    for ev in &trace.events {
        if let EventKind::Prune(rec) = &ev.kind {
            let current = epoch.region.measure(&emb);
            let mut problems = Vec::new();
            if rec.measure_before != current {
                problems.push(format!("recorded measure {} but the region measures {}", format_rational(&rec.measure_before), format_rational(&current)));
            }
            if rec.region.measure(&emb) != rec.measure_after {
                problems.push("recorded measure of the new region is wrong".to_string());
            }
            if rec.measure_after >= rec.measure_before {
                problems.push(format!("measure went from {} to {}", format_rational(&rec.measure_before), format_rational(&rec.measure_after)));
            }
            if let Some(entry) = log.get(pruned) {
                if entry.measure_after >= entry.measure_before {
                    problems.push(format!("log entry {pruned}: measure went from {} to {}", format_rational(&entry.measure_before), format_rational(&entry.measure_after)));
                }
            }
            if !rec.region.is_subset_of(&epoch.region) {
                problems.push("new region is not inside the old one".to_string());
            }
            if !problems.is_empty() {
                out.push(Violation { kind: ViolationKind::MonotonicityBreach, time: ev.time.clone(), details: problems.join("; ") });
            }
            pruned += 1;
            epoch = Epoch::new(rec.region.clone(), rec.line.clone());
        }
        if let EventKind::DescentCascade { legs } = &ev.kind {
            for leg in legs {
                epoch.observe(&emb, &ev.time, None, &leg.from, &mut out);
                epoch.observe(&emb, &ev.time, None, &leg.to, &mut out);
            }
        }
        epoch.observe(&emb, &ev.time, Some(&ev.human), &ev.puppy, &mut out);
        if !epoch.region.contains(&emb, &ev.human) {
            out.push(Violation {
                kind: ViolationKind::ContainmentBreach,
                time: ev.time.clone(),
                details: format!("human at {:?} outside the allowed region", ev.human),
            });
        }
    }
    Ok(out)
}

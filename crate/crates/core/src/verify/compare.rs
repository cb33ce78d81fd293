//! Cross-checks two runs of the same scenario, typically one from the event
//! simulator and one from the fixed-step simulator.

use num_traits::Signed;

use crate::dynamics::trace::{EventKind, Outcome, Trace};
use crate::geom::{format_rational, Rational};

use super::{Violation, ViolationKind, VerifyError};

fn incompatible(a: &Trace, b: &Trace) -> Option<String> {
    let (ha, hb) = (&a.header, &b.header);
    if ha.embedding_hash != hb.embedding_hash {
        return Some("different drawings".into());
    }
    if ha.policy != hb.policy || ha.seed != hb.seed {
        return Some(format!("policy {} seed {:?} vs policy {} seed {:?}", ha.policy, ha.seed, hb.policy, hb.seed));
    }
    if ha.initial != hb.initial {
        return Some("different starting configurations".into());
    }
    None
}

/// Compares capture verdicts and the puppy position at each waypoint, allowing
/// `2 * delta` per coordinate.
pub fn compare_runs(a: &Trace, b: &Trace, delta: &Rational) -> Result<Vec<Violation>, VerifyError> {
    if let Some(why) = incompatible(a, b) {
        return Err(VerifyError::IncompatibleTraces(why));
    }
    let emb = a.embedding()?;
    let mut out = Vec::new();
    let captured = |t: &Trace| matches!(t.outcome, Outcome::Captured { .. });
    if captured(a) != captured(b) {
        let time = match (&a.outcome, &b.outcome) {
            (Outcome::Captured { time }, _) | (_, Outcome::Captured { time }) => time.clone(),
            _ => unreachable!(),
        };
        out.push(Violation {
            kind: ViolationKind::OracleMismatch,
            time,
            details: format!("verdicts differ: {:?} vs {:?}", a.outcome, b.outcome),
        });
    }
    let waypoints = |t: &Trace| t.events.iter().filter(|e| e.kind == EventKind::Waypoint).cloned().collect::<Vec<_>>();
    let (wa, wb) = (waypoints(a), waypoints(b));
    let tol = delta * Rational::from_integer(2.into());
    for (k, (ea, eb)) in wa.iter().zip(&wb).enumerate() {
        let (pa, pb) = (emb.point_of(&ea.puppy), emb.point_of(&eb.puppy));
        if (&pa.x - &pb.x).abs() > tol || (&pa.y - &pb.y).abs() > tol {
            out.push(Violation {
                kind: ViolationKind::OracleMismatch,
                time: ea.time.clone(),
                details: format!(
                    "waypoint {k}: puppy at ({}, {}) vs ({}, {})",
                    format_rational(&pa.x),
                    format_rational(&pa.y),
                    format_rational(&pb.x),
                    format_rational(&pb.y)
                ),
            });
        }
    }
    // A captured run stops early, so only uncaptured runs must agree on length.
    if !captured(a) && !captured(b) && wa.len() != wb.len() {
        out.push(Violation {
            kind: ViolationKind::OracleMismatch,
            time: Rational::from_integer(0.into()),
            details: format!("{} waypoints vs {}", wa.len(), wb.len()),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::policy::{FirstPolicy, SeededRandomPolicy};
    use crate::dynamics::sim::{fixed_step_simulate, simulate_path};
    use crate::embedding::Configuration;
    use crate::fixtures::{self, vertex};
    use crate::geom::rat;
    use crate::strategy::{run_strategy, StrategyCaps};

    fn f3_runs() -> (Trace, Trace) {
        let emb = fixtures::two_rail();
        let ids: Vec<_> = emb.vertex_ids().collect();
        let initial = Configuration { human: crate::embedding::Position::AtVertex(ids[0]), puppy: crate::embedding::Position::AtVertex(ids[ids.len() - 1]) };
        let r = run_strategy(&emb, &initial, &mut FirstPolicy, &StrategyCaps::for_embedding(&emb)).unwrap();
        let a = simulate_path(&emb, &initial, &r.path, &mut FirstPolicy).unwrap();
        let b = fixed_step_simulate(&emb, &initial, &r.path, &mut FirstPolicy, &rat(1, 64)).unwrap();
        (a, b)
    }

    #[test]
    fn simulators_agree_on_two_rail() {
        let (a, b) = f3_runs();
        assert_eq!(compare_runs(&a, &b, &rat(1, 64)).unwrap(), vec![]);
    }

    #[test]
    fn different_seeds_are_incompatible() {
        let emb = fixtures::staple();
        let initial = Configuration { human: vertex(&emb, "a"), puppy: vertex(&emb, "d") };
        let a = simulate_path(&emb, &initial, &[], &mut SeededRandomPolicy::new(1)).unwrap();
        let b = simulate_path(&emb, &initial, &[], &mut SeededRandomPolicy::new(2)).unwrap();
        assert!(matches!(compare_runs(&a, &b, &rat(1, 8)), Err(VerifyError::IncompatibleTraces(_))));
    }

    #[test]
    fn verdict_mismatch_is_reported() {
        let (a, mut b) = f3_runs();
        assert!(matches!(a.outcome, Outcome::Captured { .. }));
        b.outcome = Outcome::CapExceeded;
        let kinds: Vec<_> = compare_runs(&a, &b, &rat(1, 64)).unwrap().iter().map(|v| v.kind).collect();
        assert_eq!(kinds, [ViolationKind::OracleMismatch]);
    }
}

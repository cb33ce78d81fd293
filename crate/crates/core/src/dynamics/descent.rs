//! Instantaneous puppy behaviour: the stability predicate and the descent cascade.
//!
//! A direction `u` at the puppy strictly decreases the distance to the human iff
//! `(h - p) · u > 0`. Perpendicular directions increase it quadratically and are
//! never taken.

use serde::{Deserialize, Serialize};

use crate::embedding::{Configuration, Direction, Embedding, Position};
use crate::geom::{min_rat, Point};

use super::policy::PuppyPolicy;

/// One straight run of the puppy inside a cascade.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leg {
    pub direction: Direction,
    pub from: Position,
    pub to: Position,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stabilized {
    pub puppy: Position,
    pub captured: bool,
    pub legs: Vec<Leg>,
}

pub fn decreasing_directions(emb: &Embedding, config: &Configuration) -> Vec<Direction> {
    let h = emb.point_of(&config.human);
    let p = emb.point_of(&config.puppy);
    if h == p {
        return Vec::new();
    }
    emb.incident_directions(&config.puppy)
        .expect("valid puppy position")
        .into_iter()
        .filter(|d| h.dot_from(&p, d.dir) > num_traits::Zero::zero())
        .collect()
}

pub fn is_stable(emb: &Embedding, config: &Configuration) -> bool {
    decreasing_directions(emb, config).is_empty()
}

/// Same point of the graph. Positions are canonical, so on a crossing-free
/// drawing this is equality of the plane points; at a crossing the two strands
/// stay apart.
pub fn is_captured(_emb: &Embedding, config: &Configuration) -> bool {
    config.human == config.puppy
}

/// Closest point to `human` on the part of `dir.edge` reachable from `puppy`
/// along `dir`: the perpendicular foot, clamped to the edge end.
pub fn edge_local_min(emb: &Embedding, puppy: &Position, dir: &Direction, human: &Point) -> Position {
    let p = emb.point_of(puppy);
    let foot = human.dot_from(&p, dir.dir);
    debug_assert!(foot > num_traits::Zero::zero(), "direction does not decrease the distance");
    let room = emb.room(puppy, dir);
    emb.advance(puppy, dir, min_rat(&foot, &room))
}

/// Runs the puppy at infinite speed until no direction decreases its distance.
pub fn stabilize(emb: &Embedding, config: &Configuration, policy: &mut dyn PuppyPolicy) -> Stabilized {
    let h = emb.point_of(&config.human);
    let mut cur = config.clone();
    let mut legs = Vec::new();
    loop {
        let options = decreasing_directions(emb, &cur);
        if options.is_empty() {
            break;
        }
        let pick = policy.choose(emb, &cur, &options);
        let dir = options[pick];
        let next = edge_local_min(emb, &cur.puppy, &dir, &h);
        legs.push(Leg { direction: dir, from: cur.puppy.clone(), to: next.clone() });
        cur.puppy = next;
        // Each leg strictly decreases the distance, so no vertex repeats.
        assert!(legs.len() <= emb.vertex_count() + 1, "descent cascade exceeded |V|+1 legs");
    }
    let captured = cur.puppy == config.human;
    Stabilized { puppy: cur.puppy, captured, legs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::policy::{FirstPolicy, GreedyAdversarialPolicy, SeededRandomPolicy};
    use crate::fixtures::{self, on_edge, vertex};
    use crate::geom::{rat, AxisDir, Rational};

    fn cfg(h: Position, p: Position) -> Configuration {
        Configuration { human: h, puppy: p }
    }

    #[test]
    fn decreasing_direction_examples() {
        let emb = fixtures::staple();
        let e3 = emb.edge_by_name("e3").unwrap();
        let e1 = emb.edge_by_name("e1").unwrap();
        assert_eq!(
            decreasing_directions(&emb, &cfg(vertex(&emb, "b"), vertex(&emb, "d"))),
            vec![Direction { edge: e3, dir: AxisDir::Up }]
        );
        assert!(decreasing_directions(&emb, &cfg(vertex(&emb, "a"), vertex(&emb, "d"))).is_empty());
        let mid = on_edge(&emb, "e2", &Point::from_ints(1, 2));
        assert_eq!(
            decreasing_directions(&emb, &cfg(mid, vertex(&emb, "a"))),
            vec![Direction { edge: e1, dir: AxisDir::Up }]
        );
    }

    #[test]
    fn stability_examples() {
        let emb = fixtures::staple();
        assert!(is_stable(&emb, &cfg(vertex(&emb, "a"), vertex(&emb, "d"))));
        assert!(!is_stable(&emb, &cfg(vertex(&emb, "b"), vertex(&emb, "d"))));
        let c = cfg(vertex(&emb, "c"), vertex(&emb, "c"));
        assert!(is_stable(&emb, &c) && is_captured(&emb, &c));
    }

    #[test]
    fn edge_local_min_examples() {
        let emb = fixtures::staple();
        let e3 = emb.edge_by_name("e3").unwrap();
        let e2 = emb.edge_by_name("e2").unwrap();
        let up = Direction { edge: e3, dir: AxisDir::Up };
        assert_eq!(edge_local_min(&emb, &vertex(&emb, "d"), &up, &Point::from_ints(0, 2)), vertex(&emb, "c"));
        let left = Direction { edge: e2, dir: AxisDir::Left };
        let h = Point::from_ints(1, 2);
        assert_eq!(edge_local_min(&emb, &vertex(&emb, "c"), &left, &h), on_edge(&emb, "e2", &h));

        let rail = fixtures::two_rail();
        let bottom = rail.edge_by_name("bottom").unwrap();
        let right = Direction { edge: bottom, dir: AxisDir::Right };
        assert_eq!(
            edge_local_min(&rail, &vertex(&rail, "bl"), &right, &Point::from_ints(3, 2)),
            on_edge(&rail, "bottom", &Point::from_ints(3, 0))
        );
    }

    /// Independent oracle: move the puppy in steps of `step` along the first
    /// decreasing direction (edge-id order) until no step improves the distance.
    fn fixed_step_descent(emb: &Embedding, config: &Configuration, step: &Rational) -> Point {
        let h = emb.point_of(&config.human);
        let mut p = config.puppy.clone();
        loop {
            let here = emb.point_of(&p).dist_sq(&h);
            let mut moved = false;
            for d in emb.incident_directions(&p).unwrap() {
                let room = emb.room(&p, &d);
                let s = if room < *step { room } else { step.clone() };
                let q = emb.advance(&p, &d, &s);
                if emb.point_of(&q).dist_sq(&h) < here {
                    p = q;
                    moved = true;
                    break;
                }
            }
            if !moved {
                return emb.point_of(&p);
            }
        }
    }

    #[test]
    fn stabilize_examples_match_fixed_step_oracle() {
        let step = rat(1, 64);
        let emb = fixtures::staple();
        let c = cfg(vertex(&emb, "b"), vertex(&emb, "d"));
        let s = stabilize(&emb, &c, &mut FirstPolicy);
        assert_eq!(s.puppy, vertex(&emb, "b"));
        assert!(s.captured);
        assert_eq!(s.legs.len(), 2);
        assert_eq!(s.legs[0].to, vertex(&emb, "c"));
        assert_eq!(emb.point_of(&s.puppy), fixed_step_descent(&emb, &c, &step));

        let c = cfg(vertex(&emb, "a"), vertex(&emb, "d"));
        let s = stabilize(&emb, &c, &mut FirstPolicy);
        assert_eq!((s.puppy, s.captured, s.legs.len()), (vertex(&emb, "d"), false, 0));

        let rail = fixtures::two_rail();
        let h = on_edge(&rail, "top", &Point::from_ints(3, 2));
        let c = cfg(h, vertex(&rail, "bl"));
        let s = stabilize(&rail, &c, &mut FirstPolicy);
        assert_eq!(rail.point_of(&s.puppy), Point::from_ints(3, 0));
        assert_eq!(s.legs.len(), 1);
        assert_eq!(rail.point_of(&s.puppy), fixed_step_descent(&rail, &c, &step));
    }

    #[test]
    fn cascades_strictly_decrease_and_end_stable() {
        let emb = fixtures::five_components();
        let positions: Vec<Position> = emb
            .vertex_ids()
            .map(Position::AtVertex)
            .chain(emb.edge_ids().map(|e| Position::OnEdge(e, rat(1, 3))))
            .collect();
        for h in &positions {
            for p in &positions {
                let c = cfg(h.clone(), p.clone());
                for policy in [
                    &mut FirstPolicy as &mut dyn PuppyPolicy,
                    &mut SeededRandomPolicy::new(3),
                    &mut GreedyAdversarialPolicy,
                ] {
                    let s = stabilize(&emb, &c, policy);
                    let hp = emb.point_of(h);
                    let mut last = emb.point_of(p).dist_sq(&hp);
                    for leg in &s.legs {
                        let d = emb.point_of(&leg.to).dist_sq(&hp);
                        assert!(d < last);
                        last = d;
                    }
                    let end = cfg(h.clone(), s.puppy.clone());
                    assert!(is_stable(&emb, &end));
                    assert_eq!(s.captured, is_captured(&emb, &end));
                    assert!(s.legs.len() <= emb.vertex_count() + 1);
                }
            }
        }
    }
}

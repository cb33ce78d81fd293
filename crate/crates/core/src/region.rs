//! Allowed-region bookkeeping for the catching strategy.
//!
//! Each edge keeps at most one closed parameter interval. Restrictions only ever
//! remove whole edges or clip a vertical edge from its upper end, so one interval
//! always suffices; [`AllowedRegion::restrict`] asserts this.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::embedding::{EdgeId, Embedding, Position, VertexId};
use crate::geom::{max_rat, min_rat, serde_rational, AxisDir, Orientation, Rational};
use crate::graph::components;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "serde_rational")]
    pub lo: Rational,
    #[serde(with = "serde_rational")]
    pub hi: Rational,
}

impl Interval {
    pub fn full() -> Self {
        Interval { lo: Rational::zero(), hi: Rational::one() }
    }

    pub fn contains(&self, t: &Rational) -> bool {
        &self.lo <= t && t <= &self.hi
    }

    pub fn is_full(&self) -> bool {
        self.lo.is_zero() && self.hi.is_one()
    }
}

/// Per-edge allowed sub-interval; `None` means the edge is removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllowedRegion {
    pub intervals: Vec<Option<Interval>>,
}

/// A way of shrinking an [`AllowedRegion`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Restriction {
    /// Forbid every point strictly above the line `y = m`.
    AboveHeight(#[serde(with = "serde_rational")] Rational),
    RemoveEdges(BTreeSet<EdgeId>),
    /// Keep only the connected component containing the given (allowed) position.
    KeepComponentOf(Position),
    /// Keep only the listed edges (each with its current interval).
    KeepEdges(BTreeSet<EdgeId>),
    /// Apply the parts left to right.
    Compound(Vec<Restriction>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegionError {
    #[error("restriction leaves no allowed points")]
    EmptyResult,
    #[error("position {0:?} is not in the allowed region")]
    PositionNotAllowed(Position),
}

impl AllowedRegion {
    pub fn full(emb: &Embedding) -> Self {
        AllowedRegion { intervals: vec![Some(Interval::full()); emb.edge_count()] }
    }

    pub fn interval(&self, e: EdgeId) -> Option<&Interval> {
        self.intervals[e.index()].as_ref()
    }

    pub fn edge_allowed(&self, e: EdgeId) -> bool {
        self.intervals[e.index()].is_some()
    }

    pub fn edge_fully_allowed(&self, e: EdgeId) -> bool {
        self.interval(e).is_some_and(Interval::is_full)
    }

    pub fn allowed_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.intervals
            .iter()
            .enumerate()
            .filter(|(_, i)| i.is_some())
            .map(|(i, _)| EdgeId(i as u32))
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.iter().all(Option::is_none)
    }

    /// A vertex is allowed iff it is an endpoint of some allowed sub-interval.
    pub fn vertex_allowed(&self, emb: &Embedding, v: VertexId) -> bool {
        emb.incident(v).iter().any(|&e| {
            let t = if emb.edge(e).u == v { Rational::zero() } else { Rational::one() };
            self.interval(e).is_some_and(|i| i.contains(&t))
        })
    }

    pub fn contains(&self, emb: &Embedding, pos: &Position) -> bool {
        match pos {
            Position::AtVertex(v) => self.vertex_allowed(emb, *v),
            Position::OnEdge(e, t) => self.interval(*e).is_some_and(|i| i.contains(t)),
        }
    }

    /// Total allowed length, in plane units.
    pub fn measure(&self, emb: &Embedding) -> Rational {
        self.intervals
            .iter()
            .enumerate()
            .filter_map(|(i, iv)| {
                iv.as_ref().map(|iv| (&iv.hi - &iv.lo) * &emb.edge(EdgeId(i as u32)).length)
            })
            .fold(Rational::zero(), |acc, x| acc + x)
    }

    /// Pointwise containment in `parent`.
    pub fn is_subset_of(&self, parent: &AllowedRegion) -> bool {
        self.intervals.iter().zip(&parent.intervals).all(|(c, p)| match (c, p) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(c), Some(p)) => p.lo <= c.lo && c.hi <= p.hi,
        })
    }

    /// Highest allowed y-coordinate.
    pub fn max_y(&self, emb: &Embedding) -> Option<Rational> {
        self.allowed_edges()
            .flat_map(|e| {
                let iv = self.interval(e).unwrap();
                [
                    emb.point_of(&emb.position_on_edge(e, iv.lo.clone())).y,
                    emb.point_of(&emb.position_on_edge(e, iv.hi.clone())).y,
                ]
            })
            .max()
    }

    pub fn restrict(&self, emb: &Embedding, cut: &Restriction) -> Result<AllowedRegion, RegionError> {
        let out = match cut {
            Restriction::AboveHeight(m) => self.clip_above(emb, m),
            Restriction::RemoveEdges(set) => {
                let mut r = self.clone();
                for e in set {
                    r.intervals[e.index()] = None;
                }
                r
            }
            Restriction::KeepEdges(set) => {
                let mut r = self.clone();
                for (i, iv) in r.intervals.iter_mut().enumerate() {
                    if !set.contains(&EdgeId(i as u32)) {
                        *iv = None;
                    }
                }
                r
            }
            Restriction::KeepComponentOf(pos) => {
                if !self.contains(emb, pos) {
                    return Err(RegionError::PositionNotAllowed(pos.clone()));
                }
                let comps = components(emb, self, &BTreeSet::new());
                let target = comps.of_position(emb, pos).expect("allowed position has a component");
                let mut r = self.clone();
                for (i, iv) in r.intervals.iter_mut().enumerate() {
                    if comps.edge[i] != Some(target) {
                        *iv = None;
                    }
                }
                r
            }
            Restriction::Compound(parts) => {
                let mut r = self.clone();
                for p in parts {
                    r = r.restrict(emb, p)?;
                }
                r
            }
        };
        if out.is_empty() {
            return Err(RegionError::EmptyResult);
        }
        debug_assert!(out.is_subset_of(self));
        for iv in out.intervals.iter().flatten() {
            assert!(
                iv.lo.is_zero() || iv.hi.is_one(),
                "allowed interval detached from both endpoints"
            );
        }
        Ok(out)
    }

    fn clip_above(&self, emb: &Embedding, m: &Rational) -> AllowedRegion {
        let mut r = self.clone();
        for e in emb.edge_ids() {
            let Some(iv) = r.intervals[e.index()].clone() else { continue };
            let edge = emb.edge(e);
            let u = emb.point(edge.u);
            let clipped = match edge.orientation {
                Orientation::Horizontal => (u.y <= *m).then_some(iv),
                Orientation::Vertical => {
                    // y = u.y ± t·len, so y ≤ m is a half-line in t.
                    let tm = match edge.dir {
                        AxisDir::Up => (m - &u.y) / &edge.length,
                        _ => (&u.y - m) / &edge.length,
                    };
                    let (lo, hi) = if edge.dir == AxisDir::Up {
                        (iv.lo.clone(), min_rat(&iv.hi, &tm).clone())
                    } else {
                        (max_rat(&iv.lo, &tm).clone(), iv.hi.clone())
                    };
                    (lo < hi).then_some(Interval { lo, hi })
                }
            };
            r.intervals[e.index()] = clipped;
        }
        r
    }
}

//! The drawing data model: vertices at exact points, axis-aligned straight edges,
//! and points of the drawing addressed as [`Position`]s.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::geom::{axis_length, max_rat, min_rat, AxisDir, Orientation, Point, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Raw, unvalidated drawing description as it appears in scenario files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingSpec {
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default)]
    pub allow_crossings: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSpec {
    pub id: String,
    #[serde(with = "crate::geom::serde_rational")]
    pub x: Rational,
    #[serde(with = "crate::geom::serde_rational")]
    pub y: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub id: String,
    pub u: String,
    pub v: String,
}

impl EmbeddingSpec {
    /// Convenience builder used by fixtures: vertices named by the caller, edges
    /// given as endpoint-name pairs.
    pub fn from_parts(
        vertices: &[(&str, Point)],
        edges: &[(&str, &str, &str)],
        allow_crossings: bool,
    ) -> Self {
        EmbeddingSpec {
            vertices: vertices
                .iter()
                .map(|(id, p)| VertexSpec { id: id.to_string(), x: p.x.clone(), y: p.y.clone() })
                .collect(),
            edges: edges
                .iter()
                .map(|(id, u, v)| EdgeSpec { id: id.to_string(), u: u.to_string(), v: v.to_string() })
                .collect(),
            allow_crossings,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmbeddingError {
    #[error("unknown id {0:?}")]
    UnknownId(String),
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("edge {0} is neither horizontal nor vertical")]
    NonOrthogonalEdge(String),
    #[error("edge {0} has zero length")]
    ZeroLengthEdge(String),
    #[error("vertices {0} and {1} share coordinates")]
    DuplicateVertexCoordinates(String, String),
    #[error("vertex {0} lies in the interior of edge {1}")]
    VertexOnEdgeInterior(String, String),
    #[error("edges {0} and {1} overlap on a segment of positive length")]
    OverlappingEdges(String, String),
    #[error("edges {0} and {1} cross away from a shared endpoint")]
    ImproperCrossing(String, String),
    #[error("the drawing is not connected")]
    Disconnected,
    #[error("the drawing has no vertices")]
    Empty,
    #[error("edge parameter {0} outside [0, 1]")]
    ParameterOutOfRange(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub orientation: Orientation,
    /// Direction of travel from `u` towards `v`.
    pub dir: AxisDir,
    pub length: Rational,
}

/// A validated orthogonal drawing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    vertex_names: Vec<String>,
    points: Vec<Point>,
    edge_names: Vec<String>,
    edges: Vec<Edge>,
    incidence: Vec<Vec<EdgeId>>,
    allow_crossings: bool,
    crossings: usize,
    connected: bool,
    spec: EmbeddingSpec,
}

/// A point of the drawing viewed as a topological space.
///
/// Parameters 0 and 1 are always normalized to [`Position::AtVertex`], so two
/// equal points of a crossing-free drawing have equal positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Position {
    AtVertex(VertexId),
    OnEdge(EdgeId, #[serde(with = "crate::geom::serde_rational")] Rational),
}

/// A (human, puppy) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub human: Position,
    pub puppy: Position,
}

/// A locally available motion: leave a position along `edge` in direction `dir`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Direction {
    pub edge: EdgeId,
    pub dir: AxisDir,
}

pub fn build_embedding(spec: &EmbeddingSpec) -> Result<Embedding, EmbeddingError> {
    Embedding::build(spec)
}

impl Embedding {
    pub fn build(spec: &EmbeddingSpec) -> Result<Embedding, EmbeddingError> {
        if spec.vertices.is_empty() {
            return Err(EmbeddingError::Empty);
        }
        let mut by_name = HashMap::new();
        for (i, v) in spec.vertices.iter().enumerate() {
            if by_name.insert(v.id.clone(), VertexId(i as u32)).is_some() {
                return Err(EmbeddingError::DuplicateId(v.id.clone()));
            }
        }
        let points: Vec<Point> =
            spec.vertices.iter().map(|v| Point::new(v.x.clone(), v.y.clone())).collect();
        let vertex_names: Vec<String> = spec.vertices.iter().map(|v| v.id.clone()).collect();

        let mut edge_seen = BTreeSet::new();
        let mut edges = Vec::with_capacity(spec.edges.len());
        for e in &spec.edges {
            if !edge_seen.insert(e.id.clone()) {
                return Err(EmbeddingError::DuplicateId(e.id.clone()));
            }
            let u = *by_name.get(&e.u).ok_or_else(|| EmbeddingError::UnknownId(e.u.clone()))?;
            let v = *by_name.get(&e.v).ok_or_else(|| EmbeddingError::UnknownId(e.v.clone()))?;
            let (pu, pv) = (&points[u.index()], &points[v.index()]);
            if pu == pv {
                return Err(EmbeddingError::ZeroLengthEdge(e.id.clone()));
            }
            let dir = AxisDir::between(pu, pv)
                .ok_or_else(|| EmbeddingError::NonOrthogonalEdge(e.id.clone()))?;
            edges.push(Edge { u, v, orientation: dir.orientation(), dir, length: axis_length(pu, pv) });
        }
        let edge_names: Vec<String> = spec.edges.iter().map(|e| e.id.clone()).collect();

        let mut sorted: Vec<usize> = (0..points.len()).collect();
        sorted.sort_by(|&a, &b| points[a].cmp(&points[b]));
        for w in sorted.windows(2) {
            if points[w[0]] == points[w[1]] {
                let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(EmbeddingError::DuplicateVertexCoordinates(
                    vertex_names[a].clone(),
                    vertex_names[b].clone(),
                ));
            }
        }

        for (ei, e) in edges.iter().enumerate() {
            let (a, b) = (&points[e.u.index()], &points[e.v.index()]);
            for (vi, p) in points.iter().enumerate() {
                if vi == e.u.index() || vi == e.v.index() {
                    continue;
                }
                if strictly_inside(a, b, p) {
                    return Err(EmbeddingError::VertexOnEdgeInterior(
                        vertex_names[vi].clone(),
                        edge_names[ei].clone(),
                    ));
                }
            }
        }

        let mut crossings = 0;
        for i in 0..edges.len() {
            for j in (i + 1)..edges.len() {
                let (ei, ej) = (&edges[i], &edges[j]);
                let (a1, b1) = (&points[ei.u.index()], &points[ei.v.index()]);
                let (a2, b2) = (&points[ej.u.index()], &points[ej.v.index()]);
                if ei.orientation == ej.orientation {
                    if collinear_overlap(a1, b1, a2, b2, ei.orientation) {
                        return Err(EmbeddingError::OverlappingEdges(
                            edge_names[i].clone(),
                            edge_names[j].clone(),
                        ));
                    }
                } else if proper_cross(a1, b1, a2, b2, ei.orientation) {
                    if !spec.allow_crossings {
                        return Err(EmbeddingError::ImproperCrossing(
                            edge_names[i].clone(),
                            edge_names[j].clone(),
                        ));
                    }
                    crossings += 1;
                }
            }
        }

        let mut incidence = vec![Vec::new(); points.len()];
        for (i, e) in edges.iter().enumerate() {
            incidence[e.u.index()].push(EdgeId(i as u32));
            incidence[e.v.index()].push(EdgeId(i as u32));
        }

        let mut emb = Embedding {
            vertex_names,
            points,
            edge_names,
            edges,
            incidence,
            allow_crossings: spec.allow_crossings,
            crossings,
            connected: false,
            spec: spec.clone(),
        };
        emb.connected = emb.count_components() == 1;
        Ok(emb)
    }

    fn count_components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.points.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut count = self.points.len();
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.u.index()), find(&mut parent, e.v.index()));
            if a != b {
                parent[a] = b;
                count -= 1;
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn require_connected(&self) -> Result<(), EmbeddingError> {
        if self.connected {
            Ok(())
        } else {
            Err(EmbeddingError::Disconnected)
        }
    }

    pub fn allow_crossings(&self) -> bool {
        self.allow_crossings
    }

    /// Number of pairs of edges that cross away from their endpoints.
    pub fn crossing_count(&self) -> usize {
        self.crossings
    }

    pub fn spec(&self) -> &EmbeddingSpec {
        &self.spec
    }

    pub fn vertex_count(&self) -> usize {
        self.points.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.points.len() as u32).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn point(&self, v: VertexId) -> &Point {
        &self.points[v.index()]
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.index()]
    }

    pub fn endpoints(&self, e: EdgeId) -> (&Point, &Point) {
        let edge = self.edge(e);
        (self.point(edge.u), self.point(edge.v))
    }

    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.incidence[v.index()]
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.index()]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edge_names[e.index()]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertex_names.iter().position(|n| n == name).map(|i| VertexId(i as u32))
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.edge_names.iter().position(|n| n == name).map(|i| EdgeId(i as u32))
    }

    pub fn other_end(&self, e: EdgeId, v: VertexId) -> VertexId {
        let edge = self.edge(e);
        if edge.u == v {
            edge.v
        } else {
            edge.u
        }
    }

    /// Minimum positive difference between any two vertex x-coordinates or any
    /// two vertex y-coordinates.
    pub fn min_coordinate_gap(&self) -> Option<Rational> {
        let gap = |mut vals: Vec<&Rational>| -> Option<Rational> {
            vals.sort();
            vals.dedup();
            vals.windows(2).map(|w| w[1] - w[0]).min()
        };
        let gx = gap(self.points.iter().map(|p| &p.x).collect());
        let gy = gap(self.points.iter().map(|p| &p.y).collect());
        match (gx, gy) {
            (Some(a), Some(b)) => Some(min_rat(&a, &b).clone()),
            (a, b) => a.or(b),
        }
    }

    pub fn check_position(&self, pos: &Position) -> Result<(), EmbeddingError> {
        match pos {
            Position::AtVertex(v) if v.index() < self.points.len() => Ok(()),
            Position::AtVertex(v) => Err(EmbeddingError::UnknownId(v.to_string())),
            Position::OnEdge(e, _) if e.index() >= self.edges.len() => {
                Err(EmbeddingError::UnknownId(e.to_string()))
            }
            Position::OnEdge(_, t) if *t <= Rational::zero() || *t >= Rational::one() => {
                Err(EmbeddingError::ParameterOutOfRange(crate::geom::format_rational(t)))
            }
            Position::OnEdge(..) => Ok(()),
        }
    }

    /// Canonical position for parameter `t ∈ [0, 1]` on edge `e`.
    pub fn position_on_edge(&self, e: EdgeId, t: Rational) -> Position {
        debug_assert!(t >= Rational::zero() && t <= Rational::one());
        let edge = self.edge(e);
        if t.is_zero() {
            Position::AtVertex(edge.u)
        } else if t.is_one() {
            Position::AtVertex(edge.v)
        } else {
            Position::OnEdge(e, t)
        }
    }

    /// Parameter of `p` along edge `e`; `p` must lie on the edge's line.
    pub fn param_of(&self, e: EdgeId, p: &Point) -> Rational {
        let edge = self.edge(e);
        let u = self.point(edge.u);
        p.dot_from(u, edge.dir) / &edge.length
    }

    /// Parameter of `pos` along `e` when `pos` lies on the closed edge.
    pub fn param_on(&self, e: EdgeId, pos: &Position) -> Option<Rational> {
        let edge = self.edge(e);
        match pos {
            Position::OnEdge(f, t) if *f == e => Some(t.clone()),
            Position::AtVertex(v) if *v == edge.u => Some(Rational::zero()),
            Position::AtVertex(v) if *v == edge.v => Some(Rational::one()),
            _ => None,
        }
    }

    pub fn locate(&self, pos: &Position) -> Result<Point, EmbeddingError> {
        self.check_position(pos)?;
        Ok(self.point_of(pos))
    }

    /// Plane point of an already validated position.
    pub fn point_of(&self, pos: &Position) -> Point {
        match pos {
            Position::AtVertex(v) => self.point(*v).clone(),
            Position::OnEdge(e, t) => {
                let edge = self.edge(*e);
                self.point(edge.u).offset(edge.dir, &(t * &edge.length))
            }
        }
    }

    pub fn dist_sq(&self, a: &Position, b: &Position) -> Result<Rational, EmbeddingError> {
        Ok(self.locate(a)?.dist_sq(&self.locate(b)?))
    }

    /// Every locally available motion direction at `pos`, in edge-id order.
    pub fn incident_directions(&self, pos: &Position) -> Result<Vec<Direction>, EmbeddingError> {
        self.check_position(pos)?;
        Ok(match pos {
            Position::AtVertex(v) => self
                .incident(*v)
                .iter()
                .map(|&e| {
                    let edge = self.edge(e);
                    let dir = if edge.u == *v { edge.dir } else { edge.dir.opposite() };
                    Direction { edge: e, dir }
                })
                .collect(),
            Position::OnEdge(e, _) => {
                let dir = self.edge(*e).dir;
                vec![Direction { edge: *e, dir }, Direction { edge: *e, dir: dir.opposite() }]
            }
        })
    }

    /// Parameter of the edge end reached when leaving along `d`.
    pub fn far_param(&self, d: &Direction) -> Rational {
        if self.edge(d.edge).dir == d.dir {
            Rational::one()
        } else {
            Rational::zero()
        }
    }

    /// The position `s` plane units from `pos` along direction `d` (clamped by caller).
    pub fn advance(&self, pos: &Position, d: &Direction, s: &Rational) -> Position {
        let edge = self.edge(d.edge);
        let t0 = self.param_on(d.edge, pos).expect("direction not incident to position");
        let dt = s / &edge.length;
        let t = if edge.dir == d.dir { t0 + dt } else { t0 - dt };
        self.position_on_edge(d.edge, t)
    }

    /// Plane distance from `pos` to the far end of its edge along `d`.
    pub fn room(&self, pos: &Position, d: &Direction) -> Rational {
        let edge = self.edge(d.edge);
        let t0 = self.param_on(d.edge, pos).expect("direction not incident to position");
        let remaining = if edge.dir == d.dir { Rational::one() - t0 } else { t0 };
        remaining * &edge.length
    }

    /// Edges whose closure contains `pos` (one for interior points, the incident
    /// edges for vertices).
    pub fn edges_at(&self, pos: &Position) -> Vec<EdgeId> {
        match pos {
            Position::AtVertex(v) => self.incident(*v).to_vec(),
            Position::OnEdge(e, _) => vec![*e],
        }
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = self.points[0].clone();
        let mut hi = self.points[0].clone();
        for p in &self.points {
            lo.x = min_rat(&lo.x, &p.x).clone();
            lo.y = min_rat(&lo.y, &p.y).clone();
            hi.x = max_rat(&hi.x, &p.x).clone();
            hi.y = max_rat(&hi.y, &p.y).clone();
        }
        (lo, hi)
    }
}

fn strictly_inside(a: &Point, b: &Point, p: &Point) -> bool {
    if a.x == b.x {
        p.x == a.x && p.y > *min_rat(&a.y, &b.y) && p.y < *max_rat(&a.y, &b.y)
    } else {
        p.y == a.y && p.x > *min_rat(&a.x, &b.x) && p.x < *max_rat(&a.x, &b.x)
    }
}

fn collinear_overlap(a1: &Point, b1: &Point, a2: &Point, b2: &Point, o: Orientation) -> bool {
    let (line1, line2, lo1, hi1, lo2, hi2) = match o {
        Orientation::Horizontal => (&a1.y, &a2.y, &a1.x, &b1.x, &a2.x, &b2.x),
        Orientation::Vertical => (&a1.x, &a2.x, &a1.y, &b1.y, &a2.y, &b2.y),
    };
    if line1 != line2 {
        return false;
    }
    let lo = max_rat(min_rat(lo1, hi1), min_rat(lo2, hi2));
    let hi = min_rat(max_rat(lo1, hi1), max_rat(lo2, hi2));
    lo < hi
}

/// Interior-interior intersection of a horizontal and a vertical segment.
fn proper_cross(a1: &Point, b1: &Point, a2: &Point, b2: &Point, first: Orientation) -> bool {
    let ((ha, hb), (va, vb)) = match first {
        Orientation::Horizontal => ((a1, b1), (a2, b2)),
        Orientation::Vertical => ((a2, b2), (a1, b1)),
    };
    let y = &ha.y;
    let x = &va.x;
    x > min_rat(&ha.x, &hb.x)
        && x < max_rat(&ha.x, &hb.x)
        && y > min_rat(&va.y, &vb.y)
        && y < max_rat(&va.y, &vb.y)
}

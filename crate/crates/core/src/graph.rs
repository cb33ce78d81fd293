//! Structural queries on the allowed part of a drawing: connected components,
//! bridges, and shortest routes for the human.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::embedding::{EdgeId, Embedding, Position, VertexId};
use crate::geom::{serde_rational, Rational};
use crate::region::AllowedRegion;

/// Connected-component labelling of the allowed region (minus some edges).
///
/// Every allowed vertex is labelled, including vertices whose only allowed
/// edges were subtracted; such vertices form point components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub vertex: Vec<Option<usize>>,
    pub edge: Vec<Option<usize>>,
    pub count: usize,
}

impl Components {
    pub fn of_position(&self, emb: &Embedding, pos: &Position) -> Option<usize> {
        match pos {
            Position::AtVertex(v) => self.vertex[v.index()],
            Position::OnEdge(e, _) => {
                let _ = emb;
                self.edge[e.index()]
            }
        }
    }

    pub fn edges_of(&self, c: usize) -> Vec<EdgeId> {
        self.edge
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == Some(c))
            .map(|(i, _)| EdgeId(i as u32))
            .collect()
    }

    pub fn vertices_of(&self, c: usize) -> Vec<VertexId> {
        self.vertex
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == Some(c))
            .map(|(i, _)| VertexId(i as u32))
            .collect()
    }
}

pub(crate) struct UnionFind(Vec<usize>);

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Ends of the allowed fragment of `e` that are vertices.
fn fragment_vertices(emb: &Embedding, region: &AllowedRegion, e: EdgeId) -> Vec<VertexId> {
    let Some(iv) = region.interval(e) else { return Vec::new() };
    let edge = emb.edge(e);
    let mut out = Vec::with_capacity(2);
    if iv.lo.is_zero() {
        out.push(edge.u);
    }
    if iv.hi.is_one() {
        out.push(edge.v);
    }
    out
}

pub fn components(emb: &Embedding, region: &AllowedRegion, minus: &BTreeSet<EdgeId>) -> Components {
    let nv = emb.vertex_count();
    let allowed_v: Vec<bool> = emb.vertex_ids().map(|v| region.vertex_allowed(emb, v)).collect();
    let mut uf = UnionFind::new(nv);
    let mut anchor = vec![None; emb.edge_count()];
    for e in region.allowed_edges() {
        if minus.contains(&e) {
            continue;
        }
        let ends = fragment_vertices(emb, region, e);
        assert!(!ends.is_empty(), "allowed fragment of {e} touches no vertex");
        if let [a, b] = ends[..] {
            uf.union(a.index(), b.index());
        }
        anchor[e.index()] = Some(ends[0]);
    }
    let mut label = vec![usize::MAX; nv];
    let mut count = 0;
    let mut vertex = vec![None; nv];
    for v in 0..nv {
        if !allowed_v[v] {
            continue;
        }
        let r = uf.find(v);
        if label[r] == usize::MAX {
            label[r] = count;
            count += 1;
        }
        vertex[v] = Some(label[r]);
    }
    let edge = anchor.iter().map(|a| a.map(|v: VertexId| vertex[v.index()].unwrap())).collect();
    Components { vertex, edge, count }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("allowed region is not connected")]
    DisconnectedInput,
    #[error("target is unreachable inside the allowed region")]
    Unreachable,
}

/// Edges whose removal disconnects the allowed region, by a lowpoint DFS.
///
/// Clipped fragments (attached to a single vertex) never separate vertices and
/// so are never bridges.
pub fn bridges(emb: &Embedding, region: &AllowedRegion) -> Result<BTreeSet<EdgeId>, GraphError> {
    if components(emb, region, &BTreeSet::new()).count != 1 {
        return Err(GraphError::DisconnectedInput);
    }
    let nv = emb.vertex_count();
    let mut adj: Vec<Vec<(usize, EdgeId)>> = vec![Vec::new(); nv];
    for e in region.allowed_edges() {
        if region.edge_fully_allowed(e) {
            let edge = emb.edge(e);
            adj[edge.u.index()].push((edge.v.index(), e));
            adj[edge.v.index()].push((edge.u.index(), e));
        }
    }
    let Some(root) = emb.vertex_ids().find(|&v| region.vertex_allowed(emb, v)) else {
        return Ok(BTreeSet::new());
    };

    let mut disc = vec![usize::MAX; nv];
    let mut low = vec![usize::MAX; nv];
    let mut out = BTreeSet::new();
    let mut timer = 0;
    // (vertex, edge used to enter it, next adjacency index)
    let mut stack: Vec<(usize, Option<EdgeId>, usize)> = vec![(root.index(), None, 0)];
    disc[root.index()] = timer;
    low[root.index()] = timer;
    timer += 1;
    while let Some(&mut (v, via, ref mut next)) = stack.last_mut() {
        if *next < adj[v].len() {
            let (w, e) = adj[v][*next];
            *next += 1;
            if Some(e) == via {
                continue;
            }
            if disc[w] == usize::MAX {
                disc[w] = timer;
                low[w] = timer;
                timer += 1;
                stack.push((w, Some(e), 0));
            } else {
                low[v] = low[v].min(disc[w]);
            }
        } else {
            stack.pop();
            if let Some(&(parent, _, _)) = stack.last() {
                low[parent] = low[parent].min(low[v]);
                if low[v] > disc[parent] {
                    out.insert(via.unwrap());
                }
            }
        }
    }
    Ok(out)
}

/// Human motion along a single edge at unit speed, between two parameters.
///
/// `from == to` is a zero-duration stay-put marker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementaryMove {
    pub edge: EdgeId,
    #[serde(with = "serde_rational")]
    pub from: Rational,
    #[serde(with = "serde_rational")]
    pub to: Rational,
}

impl ElementaryMove {
    pub fn duration(&self, emb: &Embedding) -> Rational {
        (&self.to - &self.from).abs() * &emb.edge(self.edge).length
    }

    pub fn start(&self, emb: &Embedding) -> Position {
        emb.position_on_edge(self.edge, self.from.clone())
    }

    pub fn end(&self, emb: &Embedding) -> Position {
        emb.position_on_edge(self.edge, self.to.clone())
    }
}

/// Single-source shortest routes (by plane length) inside an allowed region.
pub struct Routes {
    source: Position,
    dist: Vec<Option<Rational>>,
    /// How each vertex was reached: from a vertex over an edge, or directly from
    /// the source over an edge.
    pred: Vec<Option<(Option<VertexId>, EdgeId)>>,
}

impl Routes {
    pub fn from(emb: &Embedding, region: &AllowedRegion, source: &Position) -> Routes {
        let nv = emb.vertex_count();
        let mut dist: Vec<Option<Rational>> = vec![None; nv];
        let mut pred = vec![None; nv];
        let mut heap = BinaryHeap::new();
        match source {
            Position::AtVertex(v) => {
                dist[v.index()] = Some(Rational::zero());
                heap.push(Reverse((Rational::zero(), v.index())));
            }
            Position::OnEdge(e, t) => {
                let iv = region.interval(*e).expect("source edge not allowed");
                let edge = emb.edge(*e);
                if iv.lo.is_zero() {
                    let d = t * &edge.length;
                    dist[edge.u.index()] = Some(d.clone());
                    pred[edge.u.index()] = Some((None, *e));
                    heap.push(Reverse((d, edge.u.index())));
                }
                if iv.hi.is_one() {
                    let d = (Rational::one() - t) * &edge.length;
                    let better = dist[edge.v.index()].as_ref().is_none_or(|cur| d < *cur);
                    if better {
                        dist[edge.v.index()] = Some(d.clone());
                        pred[edge.v.index()] = Some((None, *e));
                        heap.push(Reverse((d, edge.v.index())));
                    }
                }
            }
        }
        while let Some(Reverse((d, v))) = heap.pop() {
            if dist[v].as_ref() != Some(&d) {
                continue;
            }
            let vid = VertexId(v as u32);
            for &e in emb.incident(vid) {
                if !region.edge_fully_allowed(e) {
                    continue;
                }
                let w = emb.other_end(e, vid).index();
                let nd = &d + &emb.edge(e).length;
                if dist[w].as_ref().is_none_or(|cur| nd < *cur) {
                    dist[w] = Some(nd.clone());
                    pred[w] = Some((Some(vid), e));
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        Routes { source: source.clone(), dist, pred }
    }

    pub fn distance_to_vertex(&self, v: VertexId) -> Option<&Rational> {
        self.dist[v.index()].as_ref()
    }

    /// Moves from the source to vertex `v`, or `None` if unreachable.
    pub fn path_to_vertex(&self, emb: &Embedding, v: VertexId) -> Option<Vec<ElementaryMove>> {
        self.dist[v.index()].as_ref()?;
        if self.source == Position::AtVertex(v) {
            return Some(Vec::new());
        }
        let mut moves = Vec::new();
        let mut cur = v;
        loop {
            let (prev, e) = self.pred[cur.index()].expect("reached vertex has a predecessor");
            let to = emb.param_on(e, &Position::AtVertex(cur)).unwrap();
            match prev {
                Some(p) => {
                    let from = emb.param_on(e, &Position::AtVertex(p)).unwrap();
                    moves.push(ElementaryMove { edge: e, from, to });
                    if Position::AtVertex(p) == self.source {
                        break;
                    }
                    cur = p;
                }
                None => {
                    let from = emb.param_on(e, &self.source).unwrap();
                    moves.push(ElementaryMove { edge: e, from, to });
                    break;
                }
            }
        }
        moves.reverse();
        Some(moves)
    }

    /// Moves from the source to an arbitrary allowed position.
    pub fn path_to(&self, emb: &Embedding, region: &AllowedRegion, target: &Position) -> Option<Vec<ElementaryMove>> {
        if *target == self.source {
            return Some(Vec::new());
        }
        match target {
            Position::AtVertex(v) => self.path_to_vertex(emb, *v),
            Position::OnEdge(e, t) => {
                let iv = region.interval(*e)?;
                if !iv.contains(t) {
                    return None;
                }
                let edge = emb.edge(*e);
                let mut best: Option<(Rational, Vec<ElementaryMove>)> = None;
                // Same edge as the source: walk directly.
                if let Some(t0) = emb.param_on(*e, &self.source) {
                    let d = (t - &t0).abs() * &edge.length;
                    best = Some((d, vec![ElementaryMove { edge: *e, from: t0, to: t.clone() }]));
                }
                let entries = [(iv.lo.is_zero(), edge.u, Rational::zero()), (iv.hi.is_one(), edge.v, Rational::one())];
                for (ok, v, tv) in entries {
                    if !ok {
                        continue;
                    }
                    let Some(dv) = self.distance_to_vertex(v) else { continue };
                    let d = dv + (t - &tv).abs() * &edge.length;
                    if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                        let mut moves = self.path_to_vertex(emb, v).unwrap();
                        moves.push(ElementaryMove { edge: *e, from: tv, to: t.clone() });
                        best = Some((d, moves));
                    }
                }
                best.map(|(_, m)| m)
            }
        }
    }
}

pub fn path_between(
    emb: &Embedding,
    region: &AllowedRegion,
    from: &Position,
    to: &Position,
) -> Result<Vec<ElementaryMove>, GraphError> {
    if !region.contains(emb, from) || !region.contains(emb, to) {
        return Err(GraphError::Unreachable);
    }
    Routes::from(emb, region, from).path_to(emb, region, to).ok_or(GraphError::Unreachable)
}

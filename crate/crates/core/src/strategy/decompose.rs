//! Structure of the allowed region below its top line: the edges `T` at the
//! top height `m`, the components of the region minus `T`, their nesting, and
//! the path formed by the outermost components.

use std::collections::{BTreeSet, VecDeque};

use crate::embedding::{EdgeId, Embedding, Position, VertexId};
use crate::geom::{Orientation, Point, Rational};
use crate::graph::{components, Components};
use crate::region::AllowedRegion;

/// Top height `m` and the allowed horizontal edges at that height, left to right.
pub fn top_edges(emb: &Embedding, region: &AllowedRegion) -> Option<(Rational, Vec<EdgeId>)> {
    let horizontal: Vec<EdgeId> = region
        .allowed_edges()
        .filter(|&e| emb.edge(e).orientation == Orientation::Horizontal)
        .collect();
    let m = horizontal.iter().map(|&e| emb.point(emb.edge(e).u).y.clone()).max()?;
    let mut t: Vec<EdgeId> = horizontal.into_iter().filter(|&e| emb.point(emb.edge(e).u).y == m).collect();
    t.sort_by_key(|&e| left_x(emb, e));
    Some((m, t))
}

fn left_x(emb: &Embedding, e: EdgeId) -> Rational {
    let (a, b) = emb.endpoints(e);
    if a.x < b.x {
        a.x.clone()
    } else {
        b.x.clone()
    }
}

/// The two ends of the allowed fragment of `e`, as positions.
pub fn fragment_ends(emb: &Embedding, region: &AllowedRegion, e: EdgeId) -> [Position; 2] {
    let iv = region.interval(e).expect("edge is allowed");
    [emb.position_on_edge(e, iv.lo.clone()), emb.position_on_edge(e, iv.hi.clone())]
}

/// One component of the region minus `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentInfo {
    pub edges: Vec<EdgeId>,
    pub vertices: Vec<VertexId>,
    /// `T(C)`: top-line edges incident to the component, left to right.
    pub attachments: Vec<EdgeId>,
    /// Points of the component on the top line, sorted by x.
    pub top: Vec<(Rational, Position)>,
}

impl ComponentInfo {
    /// Closed x-interval spanned by the top points.
    pub fn span(&self) -> (&Rational, &Rational) {
        (&self.top[0].0, &self.top[self.top.len() - 1].0)
    }

    pub fn is_point(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecomposeError {
    #[error("region has no horizontal edge")]
    NoTopLine,
    #[error("region extends above its top line")]
    NotClipped,
    #[error("component {0} does not reach the top line")]
    Detached(usize),
    #[error("domination is not a laminar order: {0}")]
    NotLaminar(String),
    #[error("outer components do not form a path: {0}")]
    GDNotPath(String),
}

#[derive(Debug, Clone)]
pub struct DecompositionContext {
    pub m: Rational,
    pub t: Vec<EdgeId>,
    pub labels: Components,
    pub components: Vec<ComponentInfo>,
    /// `dominates[i][j]`: component `i` dominates component `j`.
    pub dominates: Vec<Vec<bool>>,
    /// Components not dominated by any other, left to right.
    pub nondominated: Vec<usize>,
    /// Consecutive pairs of `nondominated` joined by a top-line edge.
    pub gd_links: Vec<(usize, usize, EdgeId)>,
}

impl DecompositionContext {
    pub fn t_set(&self) -> BTreeSet<EdgeId> {
        self.t.iter().copied().collect()
    }

    /// Dominators of `c` from outermost to innermost.
    pub fn chain(&self, c: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.components.len()).filter(|&i| self.dominates[i][c]).collect();
        // Laminar: the dominator with more dominators of its own is deeper.
        out.sort_by_key(|&i| (0..self.components.len()).filter(|&k| self.dominates[k][i]).count());
        out.push(c);
        out
    }

    /// Component of a position; a point inside a top-line edge gets the
    /// component of its nearer end (left on ties).
    pub fn component_of(&self, emb: &Embedding, pos: &Position) -> Option<usize> {
        if let Some(c) = self.labels.of_position(emb, pos) {
            return Some(c);
        }
        let Position::OnEdge(e, _) = pos else { return None };
        let edge = emb.edge(*e);
        let p = emb.point_of(pos);
        let (du, dv) = (p.dist_sq(emb.point(edge.u)), p.dist_sq(emb.point(edge.v)));
        let pick = if du < dv || (du == dv && emb.point(edge.u).x < emb.point(edge.v).x) { edge.u } else { edge.v };
        self.labels.vertex[pick.index()]
    }

    /// Edge set of `D(C)`: `C`, every component it dominates, and the
    /// top-line edges inside its span.
    pub fn closure_edges(&self, emb: &Embedding, c: usize) -> BTreeSet<EdgeId> {
        let mut out: BTreeSet<EdgeId> = self.components[c].edges.iter().copied().collect();
        for (j, info) in self.components.iter().enumerate() {
            if self.dominates[c][j] {
                out.extend(info.edges.iter().copied());
            }
        }
        let (xl, xr) = self.components[c].span();
        for &e in &self.t {
            let (a, b) = emb.endpoints(e);
            if a.x >= *xl && a.x <= *xr && b.x >= *xl && b.x <= *xr {
                out.insert(e);
            }
        }
        out
    }
}

/// Breadth-first vertex path inside one component, over fully allowed edges.
fn vertex_path(
    emb: &Embedding,
    region: &AllowedRegion,
    edges: &BTreeSet<EdgeId>,
    from: VertexId,
    to: VertexId,
) -> Option<Vec<VertexId>> {
    let mut pred = vec![None; emb.vertex_count()];
    let mut seen = vec![false; emb.vertex_count()];
    let mut queue = VecDeque::from([from]);
    seen[from.index()] = true;
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = vec![to];
            let mut cur = to;
            while let Some(p) = pred[cur.index()] {
                path.push(p);
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        for &e in emb.incident(v) {
            if !edges.contains(&e) || !region.edge_fully_allowed(e) {
                continue;
            }
            let w = emb.other_end(e, v);
            if !seen[w.index()] {
                seen[w.index()] = true;
                pred[w.index()] = Some(v);
                queue.push_back(w);
            }
        }
    }
    None
}

/// Vertex end of the fragment holding a clipped top point.
fn anchor_vertex(emb: &Embedding, region: &AllowedRegion, pos: &Position) -> VertexId {
    match pos {
        Position::AtVertex(v) => *v,
        Position::OnEdge(e, _) => fragment_ends(emb, region, *e)
            .into_iter()
            .find_map(|p| match p {
                Position::AtVertex(v) => Some(v),
                _ => None,
            })
            .expect("fragment touches a vertex"),
    }
}

/// Closed curve made of a simple path through `c` between its extreme top
/// points and the top-line segment joining them.
fn boundary_curve(emb: &Embedding, region: &AllowedRegion, m: &Rational, c: &ComponentInfo) -> Vec<(Point, Point)> {
    let (lp, rp) = (&c.top[0].1, &c.top[c.top.len() - 1].1);
    let (lv, rv) = (anchor_vertex(emb, region, lp), anchor_vertex(emb, region, rp));
    let edges: BTreeSet<EdgeId> = c.edges.iter().copied().collect();
    let inner = vertex_path(emb, region, &edges, lv, rv).expect("component is connected");
    let mut pts = vec![emb.point_of(lp)];
    pts.extend(inner.iter().map(|v| emb.point(*v).clone()));
    pts.push(emb.point_of(rp));
    pts.dedup();
    let mut segs: Vec<(Point, Point)> = pts.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    let (xl, xr) = c.span();
    segs.push((Point::new(xl.clone(), m.clone()), Point::new(xr.clone(), m.clone())));
    segs
}

/// A value strictly between `lo` and `hi` avoiding every value in `avoid`.
fn free_between(lo: &Rational, hi: &Rational, avoid: &[Rational]) -> Rational {
    let next = avoid.iter().filter(|v| *v > lo && *v < hi).min().unwrap_or(hi);
    (lo + next) / Rational::from_integer(2.into())
}

/// Whether `c` dominates `d`: a representative point of `d` lies inside the
/// region bounded by `c` and the top line, decided by ray parity.
pub fn dominates(emb: &Embedding, region: &AllowedRegion, m: &Rational, c: &ComponentInfo, d: &ComponentInfo) -> bool {
    let (xl, xr) = c.span();
    if xl == xr {
        return false;
    }
    if d.is_point() {
        let x = &d.top[0].0;
        return x > xl && x < xr;
    }
    let curve = boundary_curve(emb, region, m, c);
    let [a, b] = fragment_ends(emb, region, d.edges[0]).map(|p| emb.point_of(&p));
    let crossings = if a.y == b.y {
        let avoid: Vec<Rational> = curve.iter().flat_map(|(p, q)| [p.x.clone(), q.x.clone()]).collect();
        let (lo, hi) = if a.x < b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
        let x0 = free_between(lo, hi, &avoid);
        let y0 = &a.y;
        curve
            .iter()
            .filter(|(p, q)| p.y == q.y && p.y > *y0 && x0 > p.x.clone().min(q.x.clone()) && x0 < p.x.clone().max(q.x.clone()))
            .count()
    } else {
        let avoid: Vec<Rational> = curve.iter().flat_map(|(p, q)| [p.y.clone(), q.y.clone()]).collect();
        let (lo, hi) = if a.y < b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
        let y0 = free_between(lo, hi, &avoid);
        let x0 = &a.x;
        curve
            .iter()
            .filter(|(p, q)| p.x == q.x && p.x > *x0 && y0 > p.y.clone().min(q.y.clone()) && y0 < p.y.clone().max(q.y.clone()))
            .count()
    };
    crossings % 2 == 1
}

fn component_infos(
    emb: &Embedding,
    region: &AllowedRegion,
    m: &Rational,
    t: &[EdgeId],
    labels: &Components,
) -> Result<Vec<ComponentInfo>, DecomposeError> {
    let mut infos: Vec<ComponentInfo> = (0..labels.count)
        .map(|c| ComponentInfo {
            edges: labels.edges_of(c),
            vertices: labels.vertices_of(c),
            attachments: Vec::new(),
            top: Vec::new(),
        })
        .collect();
    for &e in t {
        let edge = emb.edge(e);
        for v in [edge.u, edge.v] {
            let c = labels.vertex[v.index()].expect("top-line vertex is allowed");
            if !infos[c].attachments.contains(&e) {
                infos[c].attachments.push(e);
            }
        }
    }
    for (c, info) in infos.iter_mut().enumerate() {
        let mut top: Vec<(Rational, Position)> = info
            .vertices
            .iter()
            .filter(|v| emb.point(**v).y == *m)
            .map(|v| (emb.point(*v).x.clone(), Position::AtVertex(*v)))
            .collect();
        for &e in &info.edges {
            for p in fragment_ends(emb, region, e) {
                if matches!(p, Position::OnEdge(..)) && emb.point_of(&p).y == *m {
                    top.push((emb.point_of(&p).x.clone(), p));
                }
            }
        }
        if top.is_empty() {
            return Err(DecomposeError::Detached(c));
        }
        top.sort_by(|a, b| a.0.cmp(&b.0));
        info.top = top;
        info.attachments.sort_by_key(|&e| left_x(emb, e));
    }
    Ok(infos)
}

fn check_laminar(dom: &[Vec<bool>]) -> Result<(), DecomposeError> {
    let n = dom.len();
    for i in 0..n {
        if dom[i][i] {
            return Err(DecomposeError::NotLaminar(format!("component {i} dominates itself")));
        }
        for j in 0..n {
            if dom[i][j] && dom[j][i] {
                return Err(DecomposeError::NotLaminar(format!("components {i} and {j} dominate each other")));
            }
            for k in 0..n {
                if dom[i][j] && dom[j][k] && !dom[i][k] {
                    return Err(DecomposeError::NotLaminar(format!("{i} > {j} > {k} but not {i} > {k}")));
                }
                if i != j && dom[i][k] && dom[j][k] && !dom[i][j] && !dom[j][i] {
                    return Err(DecomposeError::NotLaminar(format!("{k} has unnested dominators {i} and {j}")));
                }
            }
        }
    }
    Ok(())
}

pub fn decompose(emb: &Embedding, region: &AllowedRegion) -> Result<DecompositionContext, DecomposeError> {
    let (m, t) = top_edges(emb, region).ok_or(DecomposeError::NoTopLine)?;
    if region.max_y(emb).is_some_and(|y| y > m) {
        return Err(DecomposeError::NotClipped);
    }
    let t_set: BTreeSet<EdgeId> = t.iter().copied().collect();
    let labels = components(emb, region, &t_set);
    let infos = component_infos(emb, region, &m, &t, &labels)?;
    let n = infos.len();
    let dom: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| i != j && dominates(emb, region, &m, &infos[i], &infos[j])).collect())
        .collect();
    check_laminar(&dom)?;

    let mut nondominated: Vec<usize> = (0..n).filter(|&j| (0..n).all(|i| !dom[i][j])).collect();
    nondominated.sort_by(|&a, &b| infos[a].span().0.cmp(infos[b].span().0));
    for w in nondominated.windows(2) {
        if infos[w[0]].span().1 >= infos[w[1]].span().0 {
            return Err(DecomposeError::GDNotPath(format!("spans of components {} and {} overlap", w[0], w[1])));
        }
    }
    let rank = |c: usize| nondominated.iter().position(|&x| x == c);
    let mut gd_links = Vec::new();
    for &e in &t {
        let edge = emb.edge(e);
        let (a, b) = (labels.vertex[edge.u.index()].unwrap(), labels.vertex[edge.v.index()].unwrap());
        if a == b {
            continue;
        }
        if let (Some(ra), Some(rb)) = (rank(a), rank(b)) {
            if ra.abs_diff(rb) != 1 {
                return Err(DecomposeError::GDNotPath(format!("edge {e} joins non-adjacent components")));
            }
            let (l, r) = if ra < rb { (a, b) } else { (b, a) };
            gd_links.push((l, r, e));
        }
    }
    for w in nondominated.windows(2) {
        if !gd_links.iter().any(|&(l, r, _)| l == w[0] && r == w[1]) {
            return Err(DecomposeError::GDNotPath(format!("components {} and {} are not linked", w[0], w[1])));
        }
    }
    Ok(DecompositionContext { m, t, labels, components: infos, dominates: dom, nondominated, gd_links })
}

//! Deliberately naive oracles. They read raw coordinates and intervals and do
//! not call the predicates they are compared against.

use std::collections::{BTreeSet, VecDeque};

use num_traits::{One, Signed, Zero};

use crate::embedding::{Configuration, EdgeId, Embedding, Position, VertexId};
use crate::geom::{Point, Rational};
use crate::region::AllowedRegion;
use crate::strategy::ComponentInfo;

fn locate(emb: &Embedding, pos: &Position) -> Point {
    match pos {
        Position::AtVertex(v) => emb.point(*v).clone(),
        Position::OnEdge(e, t) => {
            let (a, b) = emb.endpoints(*e);
            Point::new(&a.x + (&b.x - &a.x) * t, &a.y + (&b.y - &a.y) * t)
        }
    }
}

/// Smallest positive difference among the x (and y) coordinates of all
/// vertices and of the two actors.
pub fn feature_gap(emb: &Embedding, config: &Configuration) -> Option<Rational> {
    let mut pts: Vec<Point> = emb.vertex_ids().map(|v| emb.point(v).clone()).collect();
    pts.push(locate(emb, &config.human));
    pts.push(locate(emb, &config.puppy));
    let gap = |mut vals: Vec<Rational>| {
        vals.sort();
        vals.dedup();
        vals.windows(2).map(|w| &w[1] - &w[0]).min()
    };
    let gx = gap(pts.iter().map(|p| p.x.clone()).collect());
    let gy = gap(pts.iter().map(|p| p.y.clone()).collect());
    match (gx, gy) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// Stability by sampling: for every way out of the puppy's position, look at
/// the point `eps` further along (or the edge end if closer) and ask whether it
/// is strictly closer to the human.
///
/// Exact when `eps` is below a quarter of [`feature_gap`].
pub fn stability_oracle(emb: &Embedding, config: &Configuration, eps: &Rational) -> bool {
    let h = locate(emb, &config.human);
    let p = locate(emb, &config.puppy);
    if h == p {
        return true;
    }
    let here = p.dist_sq(&h);
    let mut targets: Vec<Point> = Vec::new();
    match &config.puppy {
        Position::AtVertex(v) => {
            for e in emb.edge_ids() {
                let edge = emb.edge(e);
                if edge.u == *v {
                    targets.push(emb.point(edge.v).clone());
                } else if edge.v == *v {
                    targets.push(emb.point(edge.u).clone());
                }
            }
        }
        Position::OnEdge(e, _) => {
            let (a, b) = emb.endpoints(*e);
            targets.push(a.clone());
            targets.push(b.clone());
        }
    }
    targets.iter().all(|t| {
        let len = (&t.x - &p.x).abs() + (&t.y - &p.y).abs();
        let s = if len < *eps { len.clone() } else { eps.clone() };
        let sample = Point::new(&p.x + (&t.x - &p.x) * &s / &len, &p.y + (&t.y - &p.y) * &s / &len);
        sample.dist_sq(&h) >= here
    })
}

/// Number of connected pieces among allowed vertices joined by fully allowed
/// edges, skipping `skip`.
fn pieces(emb: &Embedding, region: &AllowedRegion, skip: Option<EdgeId>) -> usize {
    let n = emb.vertex_count();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut alive = vec![false; n];
    for e in emb.edge_ids() {
        let Some(iv) = &region.intervals[e.index()] else { continue };
        let edge = emb.edge(e);
        if iv.lo.is_zero() {
            alive[edge.u.index()] = true;
        }
        if iv.hi.is_one() {
            alive[edge.v.index()] = true;
        }
        if Some(e) != skip && iv.lo.is_zero() && iv.hi.is_one() {
            adj[edge.u.index()].push(edge.v.index());
            adj[edge.v.index()].push(edge.u.index());
        }
    }
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if !alive[s] || seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    count
}

/// Bridges by removing each allowed edge in turn and recounting pieces.
pub fn brute_bridges(emb: &Embedding, region: &AllowedRegion) -> BTreeSet<EdgeId> {
    let base = pieces(emb, region, None);
    emb.edge_ids()
        .filter(|e| region.intervals[e.index()].is_some())
        .filter(|&e| pieces(emb, region, Some(e)) > base)
        .collect()
}

/// Allowed part of edge `e` as a segment.
fn fragment(emb: &Embedding, region: &AllowedRegion, e: EdgeId) -> (Point, Point) {
    let iv = region.intervals[e.index()].as_ref().expect("edge allowed");
    (locate(emb, &Position::OnEdge(e, iv.lo.clone())), locate(emb, &Position::OnEdge(e, iv.hi.clone())))
}

fn component_points(emb: &Embedding, region: &AllowedRegion, c: &ComponentInfo) -> Vec<Point> {
    let mut pts: Vec<Point> = c.vertices.iter().map(|&v: &VertexId| emb.point(v).clone()).collect();
    for &e in &c.edges {
        let (a, b) = fragment(emb, region, e);
        pts.push(a);
        pts.push(b);
    }
    pts
}

/// Flood fill on the grid spanned by every coordinate in play. Walls are the
/// fragments of `c` and the segment of the line `y = m` between the outermost
/// points of `c` on that line. `d` is dominated iff none of its grid nodes is
/// reached from outside.
pub fn domination_oracle(emb: &Embedding, region: &AllowedRegion, m: &Rational, c: &ComponentInfo, d: &ComponentInfo) -> bool {
    let c_pts = component_points(emb, region, c);
    let on_line: Vec<&Rational> = c_pts.iter().filter(|p| p.y == *m).map(|p| &p.x).collect();
    let (Some(xl), Some(xr)) = (on_line.iter().min(), on_line.iter().max()) else { return false };
    let d_pts = component_points(emb, region, d);
    let mut xs: Vec<Rational> = c_pts.iter().chain(&d_pts).map(|p| p.x.clone()).collect();
    let mut ys: Vec<Rational> = c_pts.iter().chain(&d_pts).map(|p| p.y.clone()).collect();
    ys.push(m.clone());
    xs.sort();
    xs.dedup();
    ys.sort();
    ys.dedup();
    // Coordinate k sits at lattice index 2k+1; even indices are the gaps.
    let (w, h) = (2 * xs.len() + 1, 2 * ys.len() + 1);
    let ix = |x: &Rational| 2 * xs.binary_search(x).unwrap() + 1;
    let iy = |y: &Rational| 2 * ys.binary_search(y).unwrap() + 1;
    let mut wall = vec![false; w * h];
    let mut paint = |a: &Point, b: &Point| {
        let (x0, x1) = (ix(&a.x).min(ix(&b.x)), ix(&a.x).max(ix(&b.x)));
        let (y0, y1) = (iy(&a.y).min(iy(&b.y)), iy(&a.y).max(iy(&b.y)));
        for x in x0..=x1 {
            for y in y0..=y1 {
                wall[y * w + x] = true;
            }
        }
    };
    for &e in &c.edges {
        let (a, b) = fragment(emb, region, e);
        paint(&a, &b);
    }
    for &v in &c.vertices {
        let p = emb.point(v);
        paint(p, p);
    }
    paint(&Point::new((*xl).clone(), m.clone()), &Point::new((*xr).clone(), m.clone()));

    let mut reached = vec![false; w * h];
    let mut queue = VecDeque::from([0usize]);
    reached[0] = true;
    while let Some(i) = queue.pop_front() {
        let (x, y) = (i % w, i / w);
        let mut next = Vec::with_capacity(4);
        if x > 0 {
            next.push(i - 1);
        }
        if x + 1 < w {
            next.push(i + 1);
        }
        if y > 0 {
            next.push(i - w);
        }
        if y + 1 < h {
            next.push(i + w);
        }
        for j in next {
            if !wall[j] && !reached[j] {
                reached[j] = true;
                queue.push_back(j);
            }
        }
    }

    let mut d_nodes: Vec<usize> = Vec::new();
    for &e in &d.edges {
        let (a, b) = fragment(emb, region, e);
        let (x0, x1) = (ix(&a.x).min(ix(&b.x)), ix(&a.x).max(ix(&b.x)));
        let (y0, y1) = (iy(&a.y).min(iy(&b.y)), iy(&a.y).max(iy(&b.y)));
        for x in x0..=x1 {
            for y in y0..=y1 {
                d_nodes.push(y * w + x);
            }
        }
    }
    for &v in &d.vertices {
        let p = emb.point(v);
        d_nodes.push(iy(&p.y) * w + ix(&p.x));
    }
    d_nodes.iter().all(|&i| !reached[i])
}

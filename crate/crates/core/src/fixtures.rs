//! Named drawings used by tests, examples and the shipped gallery.

use crate::embedding::{Embedding, EmbeddingSpec, Position};
use crate::geom::{Point, Rational};

fn build(vertices: &[(&str, i64, i64)], edges: &[(&str, &str, &str)], cross: bool) -> Embedding {
    let vs: Vec<(&str, Point)> =
        vertices.iter().map(|&(n, x, y)| (n, Point::from_ints(x, y))).collect();
    Embedding::build(&EmbeddingSpec::from_parts(&vs, edges, cross)).expect("fixture must validate")
}

/// "Staple": a=(0,0), b=(0,2), c=(2,2), d=(2,0) with edges e1=ab, e2=bc, e3=cd.
pub fn staple() -> Embedding {
    build(
        &[("a", 0, 0), ("b", 0, 2), ("c", 2, 2), ("d", 2, 0)],
        &[("e1", "a", "b"), ("e2", "b", "c"), ("e3", "c", "d")],
        false,
    )
}

/// Five components below a common top line y=4: C1 and C2 are nested U shapes,
/// C3 and C4 hang inside C2, C5 hangs to the right of C1.
pub fn five_components() -> Embedding {
    build(
        &[
            ("A", 0, 4),
            ("B", 3, 4),
            ("C", 5, 4),
            ("D", 6, 4),
            ("E", 7, 4),
            ("F", 10, 4),
            ("G", 12, 4),
            ("H", 0, 0),
            ("I", 10, 0),
            ("J", 3, 1),
            ("K", 7, 1),
            ("L", 5, 2),
            ("M", 6, 3),
            ("N", 12, 3),
        ],
        &[
            ("t1", "A", "B"),
            ("t2", "B", "C"),
            ("t3", "C", "D"),
            ("t4", "E", "F"),
            ("t5", "F", "G"),
            ("c1a", "A", "H"),
            ("c1b", "H", "I"),
            ("c1c", "I", "F"),
            ("c2a", "B", "J"),
            ("c2b", "J", "K"),
            ("c2c", "K", "E"),
            ("c3", "C", "L"),
            ("c4", "D", "M"),
            ("c5", "G", "N"),
        ],
        false,
    )
}

/// Two horizontal rails joined by a post on the right.
pub fn two_rail() -> Embedding {
    build(
        &[("tl", 0, 2), ("tr", 6, 2), ("bl", 0, 0), ("br", 6, 0)],
        &[("top", "tl", "tr"), ("bottom", "bl", "br"), ("post", "br", "tr")],
        false,
    )
}

/// A single closed orthogonal curve that winds twice around its centre. The
/// inner and outer windings swap on the left through one crossing, so the
/// drawing is only valid with `allow_crossings`.
pub fn double_loop() -> Embedding {
    let pts = [
        ("q0", 3, 10),
        ("q1", 3, 5),
        ("q2", 0, 5),
        ("q3", 0, 0),
        ("q4", 13, 0),
        ("q5", 13, 12),
        ("q6", 1, 12),
        ("q7", 1, 7),
        ("q8", 4, 7),
        ("q9", 4, 2),
        ("q10", 11, 2),
        ("q11", 11, 10),
    ];
    let names: Vec<String> = (0..pts.len()).map(|i| format!("s{i}")).collect();
    let edges: Vec<(&str, &str, &str)> =
        (0..pts.len()).map(|i| (names[i].as_str(), pts[i].0, pts[(i + 1) % pts.len()].0)).collect();
    build(&pts, &edges, true)
}

pub fn vertex(emb: &Embedding, name: &str) -> Position {
    Position::AtVertex(emb.vertex_by_name(name).unwrap_or_else(|| panic!("no vertex {name}")))
}

/// Canonical position of the point `(x, y)` lying on the named edge.
pub fn on_edge(emb: &Embedding, name: &str, p: &Point) -> Position {
    let e = emb.edge_by_name(name).unwrap_or_else(|| panic!("no edge {name}"));
    let t: Rational = emb.param_of(e, p);
    emb.position_on_edge(e, t)
}

//! Random connected, crossing-free orthogonal drawings on an irregular grid.
//!
//! A random tree is grown cell by cell over grid points, a few extra grid
//! edges close cycles, and columns and rows get random integer spacing. In
//! generic mode every grid point carries at most one horizontal edge, and each
//! horizontal edge is then lifted by its own small offset so that no two
//! horizontal edges share a height.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::{Configuration, EdgeSpec, Embedding, EmbeddingSpec, Position, VertexSpec};
use crate::geom::{int, Orientation, Rational};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub seed: u64,
    /// Grid points per side; derived from the edge target when absent.
    pub grid: Option<(usize, usize)>,
    /// Inclusive edge-count range.
    pub edges: (usize, usize),
    /// Share of the edge budget spent on cycle-closing edges.
    pub extra_cycle_prob: f64,
    pub generic_mode: bool,
}

impl GeneratorParams {
    pub fn new(seed: u64, edges: (usize, usize), generic_mode: bool) -> Self {
        GeneratorParams { seed, grid: None, edges, extra_cycle_prob: 0.2, generic_mode }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenerateError {
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("no drawing met the constraints within the retry budget")]
    GenerationFailed,
}

const RETRIES: usize = 200;

type Cell = (usize, usize);

struct Draft {
    cells: BTreeSet<Cell>,
    edges: Vec<(Cell, Cell)>,
}

impl Draft {
    fn has_horizontal(&self, c: Cell) -> bool {
        self.edges.iter().any(|&(a, b)| a.1 == b.1 && (a == c || b == c))
    }

    fn has_edge(&self, a: Cell, b: Cell) -> bool {
        self.edges.iter().any(|&e| e == (a, b) || e == (b, a))
    }
}

fn neighbours(c: Cell, w: usize, h: usize) -> Vec<Cell> {
    let mut out = Vec::with_capacity(4);
    if c.0 > 0 {
        out.push((c.0 - 1, c.1));
    }
    if c.0 + 1 < w {
        out.push((c.0 + 1, c.1));
    }
    if c.1 > 0 {
        out.push((c.0, c.1 - 1));
    }
    if c.1 + 1 < h {
        out.push((c.0, c.1 + 1));
    }
    out
}

fn grow(rng: &mut ChaCha8Rng, w: usize, h: usize, points: usize, extra: usize, generic: bool) -> Option<Draft> {
    let start = (rng.gen_range(0..w), rng.gen_range(0..h));
    let mut d = Draft { cells: BTreeSet::from([start]), edges: Vec::new() };
    while d.cells.len() < points {
        let frontier: Vec<(Cell, Cell)> = d
            .cells
            .iter()
            .flat_map(|&c| neighbours(c, w, h).into_iter().map(move |n| (c, n)))
            .filter(|(c, n)| !d.cells.contains(n) && !(generic && c.1 == n.1 && d.has_horizontal(*c)))
            .collect();
        let &(c, n) = frontier.choose(rng)?;
        d.cells.insert(n);
        d.edges.push((c, n));
    }
    let mut candidates: Vec<(Cell, Cell)> = d
        .cells
        .iter()
        .flat_map(|&c| neighbours(c, w, h).into_iter().map(move |n| (c, n)))
        .filter(|&(c, n)| c < n && d.cells.contains(&n) && !d.has_edge(c, n))
        .collect();
    candidates.shuffle(rng);
    let mut added = 0;
    for (c, n) in candidates {
        if added == extra {
            break;
        }
        if generic && c.1 == n.1 && (d.has_horizontal(c) || d.has_horizontal(n)) {
            continue;
        }
        d.edges.push((c, n));
        added += 1;
    }
    Some(d)
}

fn spacing(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    let mut acc = 0i64;
    (0..n)
        .map(|_| {
            acc += rng.gen_range(1..=3);
            int(acc)
        })
        .collect()
}

fn to_spec(rng: &mut ChaCha8Rng, d: &Draft, w: usize, h: usize, generic: bool) -> EmbeddingSpec {
    let xs = spacing(rng, w);
    let ys = spacing(rng, h);
    let index: Vec<Cell> = d.cells.iter().copied().collect();
    let id = |c: Cell| format!("v{}", index.binary_search(&c).unwrap());
    let mut y_of: Vec<Rational> = index.iter().map(|c| ys[c.1].clone()).collect();
    if generic {
        let min_gap = ys.windows(2).map(|p| &p[1] - &p[0]).min().unwrap_or_else(|| int(1));
        let horizontal: Vec<usize> = (0..d.edges.len()).filter(|&i| d.edges[i].0 .1 == d.edges[i].1 .1).collect();
        let mut ranks: Vec<usize> = (1..=horizontal.len()).collect();
        ranks.shuffle(rng);
        let k = int(2 * (horizontal.len() as i64 + 1));
        for (&i, r) in horizontal.iter().zip(ranks) {
            let lift = &min_gap * int(r as i64) / &k;
            for c in [d.edges[i].0, d.edges[i].1] {
                let j = index.binary_search(&c).unwrap();
                y_of[j] = &ys[c.1] + &lift;
            }
        }
    }
    EmbeddingSpec {
        vertices: index
            .iter()
            .enumerate()
            .map(|(j, &c)| VertexSpec { id: id(c), x: xs[c.0].clone(), y: y_of[j].clone() })
            .collect(),
        edges: d
            .edges
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| EdgeSpec { id: format!("e{i}"), u: id(a), v: id(b) })
            .collect(),
        allow_crossings: false,
    }
}

/// Horizontal edges have pairwise distinct heights.
pub fn is_generic(emb: &Embedding) -> bool {
    let mut heights = BTreeSet::new();
    emb.edge_ids()
        .filter(|&e| emb.edge(e).orientation == Orientation::Horizontal)
        .all(|e| heights.insert(emb.point(emb.edge(e).u).y.clone()))
}

pub fn generate(params: &GeneratorParams) -> Result<EmbeddingSpec, GenerateError> {
    let (lo, hi) = params.edges;
    if lo == 0 || lo > hi {
        return Err(GenerateError::InvalidParams(format!("edge range {lo}..={hi}")));
    }
    if !(0.0..1.0).contains(&params.extra_cycle_prob) {
        return Err(GenerateError::InvalidParams("extra-cycle probability must lie in [0, 1)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for _ in 0..RETRIES {
        let target = rng.gen_range(lo..=hi);
        let extra = (target as f64 * params.extra_cycle_prob).round() as usize;
        let points = target - extra + 1;
        let (w, h) = params.grid.unwrap_or_else(|| {
            let side = (points as f64).sqrt().ceil() as usize + 1;
            (side + rng.gen_range(0..=2), side + rng.gen_range(0..=2))
        });
        if w * h < points {
            return Err(GenerateError::InvalidParams(format!("grid {w}x{h} too small for {points} points")));
        }
        let Some(draft) = grow(&mut rng, w, h, points, extra, params.generic_mode) else { continue };
        if !(lo..=hi).contains(&draft.edges.len()) {
            continue;
        }
        let spec = to_spec(&mut rng, &draft, w, h, params.generic_mode);
        let Ok(emb) = Embedding::build(&spec) else { continue };
        if emb.is_connected() && (!params.generic_mode || is_generic(&emb)) {
            return Ok(spec);
        }
    }
    Err(GenerateError::GenerationFailed)
}

/// A random point of the drawing: a vertex, or an edge point at a multiple of 1/4.
pub fn random_position(rng: &mut impl Rng, emb: &Embedding) -> Position {
    if rng.gen_bool(0.5) {
        Position::AtVertex(crate::embedding::VertexId(rng.gen_range(0..emb.vertex_count()) as u32))
    } else {
        let e = crate::embedding::EdgeId(rng.gen_range(0..emb.edge_count()) as u32);
        emb.position_on_edge(e, Rational::new(rng.gen_range(1..=3).into(), 4.into()))
    }
}

pub fn random_configuration(rng: &mut impl Rng, emb: &Embedding) -> Configuration {
    Configuration { human: random_position(rng, emb), puppy: random_position(rng, emb) }
}

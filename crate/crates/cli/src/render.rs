//! Deterministic SVG figures of a trace.

use std::fmt::Write;

use num_traits::ToPrimitive;
use puppy_core::dynamics::trace::{EventKind, Trace};
use puppy_core::embedding::{EdgeId, Embedding, Position};
use puppy_core::geom::{Point, Rational};
use puppy_core::region::AllowedRegion;

const CANVAS: f64 = 560.0;
const MARGIN: f64 = 30.0;

const STYLE: &str = "\
.edge{stroke:#000;stroke-width:2;stroke-linecap:round}
.vertex{fill:#000}
.human{fill:none;stroke:#1f5fbf;stroke-width:1.5}
.puppy{fill:none;stroke:#c0392b;stroke-width:1.5;stroke-dasharray:4 3}
.hmark{fill:#1f5fbf}
.pmark{fill:#c0392b}
text{font-family:monospace;font-size:10px}";

struct Frame {
    lo: Point,
    scale: f64,
    height: f64,
}

impl Frame {
    fn new(emb: &Embedding) -> Frame {
        let (lo, hi) = emb.bounding_box();
        let w = (&hi.x - &lo.x).to_f64().unwrap_or(0.0);
        let h = (&hi.y - &lo.y).to_f64().unwrap_or(0.0);
        let span = w.max(h);
        let scale = if span > 0.0 { CANVAS / span } else { 1.0 };
        Frame { lo, scale, height: h * scale }
    }

    fn xy(&self, p: &Point) -> (String, String) {
        let x = (&p.x - &self.lo.x).to_f64().unwrap_or(0.0) * self.scale + MARGIN;
        let y = self.height - (&p.y - &self.lo.y).to_f64().unwrap_or(0.0) * self.scale + MARGIN;
        (format!("{x:.2}"), format!("{y:.2}"))
    }
}

fn at(emb: &Embedding, e: EdgeId, t: &Rational) -> Point {
    let (a, b) = emb.endpoints(e);
    Point::new(&a.x + (&b.x - &a.x) * t, &a.y + (&b.y - &a.y) * t)
}

/// Parameter pieces of `e` allowed in `before` but not in `after`.
fn removed(e: EdgeId, before: &AllowedRegion, after: &AllowedRegion) -> Vec<(Rational, Rational)> {
    let Some(p) = before.interval(e) else { return Vec::new() };
    match after.interval(e) {
        None => vec![(p.lo.clone(), p.hi.clone())],
        Some(n) => [(p.lo.clone(), n.lo.clone()), (n.hi.clone(), p.hi.clone())]
            .into_iter()
            .filter(|(a, b)| a < b)
            .collect(),
    }
}

/// Lighter for parts dropped earlier.
fn gray(epoch: usize, epochs: usize) -> String {
    let level = 0xd8 - (0x60 * epoch / epochs.max(1)).min(0x60);
    format!("#{level:02x}{level:02x}{level:02x}")
}

fn polyline(out: &mut String, frame: &Frame, class: &str, pts: &[Point]) {
    let mut coords: Vec<(String, String)> = Vec::new();
    for p in pts {
        let c = frame.xy(p);
        if coords.last() != Some(&c) {
            coords.push(c);
        }
    }
    if coords.len() < 2 {
        return;
    }
    let joined: Vec<String> = coords.iter().map(|(x, y)| format!("{x},{y}")).collect();
    writeln!(out, "<polyline class=\"{class}\" points=\"{}\"/>", joined.join(" ")).unwrap();
}

fn segment(out: &mut String, frame: &Frame, a: &Point, b: &Point, attrs: &str) {
    let ((x1, y1), (x2, y2)) = (frame.xy(a), frame.xy(b));
    writeln!(out, "<line {attrs} x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\"/>").unwrap();
}

pub fn render_svg(trace: &Trace) -> Result<String, puppy_core::dynamics::trace::TraceError> {
    let emb = trace.embedding()?;
    let frame = Frame::new(&emb);
    let locate = |p: &Position| emb.point_of(p);

    let mut regions = vec![AllowedRegion::full(&emb), trace.header.region.clone()];
    regions.extend(trace.events.iter().filter_map(|ev| match &ev.kind {
        EventKind::Prune(rec) => Some(rec.region.clone()),
        _ => None,
    }));
    let last = regions.last().unwrap().clone();

    let width = CANVAS + 2.0 * MARGIN;
    let height = frame.height + 2.0 * MARGIN;
    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">"
    )
    .unwrap();
    writeln!(out, "<style>\n{STYLE}\n</style>").unwrap();
    writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>").unwrap();

    let epochs = regions.len() - 1;
    writeln!(out, "<g id=\"forbidden\">").unwrap();
    for (k, pair) in regions.windows(2).enumerate() {
        let color = gray(k, epochs);
        for e in emb.edge_ids() {
            for (a, b) in removed(e, &pair[0], &pair[1]) {
                let attrs = format!("stroke=\"{color}\" stroke-width=\"2\" data-epoch=\"{k}\"");
                segment(&mut out, &frame, &at(&emb, e, &a), &at(&emb, e, &b), &attrs);
            }
        }
    }
    writeln!(out, "</g>\n<g id=\"drawing\">").unwrap();
    for e in last.allowed_edges() {
        let iv = last.interval(e).unwrap();
        segment(&mut out, &frame, &at(&emb, e, &iv.lo), &at(&emb, e, &iv.hi), "class=\"edge\"");
    }
    for v in emb.vertex_ids() {
        let (x, y) = frame.xy(emb.point(v));
        writeln!(out, "<circle class=\"vertex\" cx=\"{x}\" cy=\"{y}\" r=\"2\"/>").unwrap();
    }
    writeln!(out, "</g>").unwrap();

    let mut human = vec![locate(&trace.header.initial.human)];
    let mut puppy = vec![locate(&trace.header.initial.puppy)];
    for ev in &trace.events {
        if let EventKind::DescentCascade { legs } = &ev.kind {
            for leg in legs {
                puppy.push(locate(&leg.from));
                puppy.push(locate(&leg.to));
            }
        }
        human.push(locate(&ev.human));
        puppy.push(locate(&ev.puppy));
    }
    writeln!(out, "<g id=\"paths\">").unwrap();
    polyline(&mut out, &frame, "human", &human);
    polyline(&mut out, &frame, "puppy", &puppy);
    for (pts, class, label) in [(&human, "hmark", "h"), (&puppy, "pmark", "p")] {
        let (x0, y0) = frame.xy(&pts[0]);
        let (x1, y1) = frame.xy(pts.last().unwrap());
        if class == "hmark" {
            writeln!(out, "<circle class=\"{class}\" cx=\"{x0}\" cy=\"{y0}\" r=\"5\"/>").unwrap();
            writeln!(out, "<circle class=\"{class}\" cx=\"{x1}\" cy=\"{y1}\" r=\"3\" fill-opacity=\"0.6\"/>").unwrap();
        } else {
            writeln!(out, "<rect class=\"{class}\" x=\"{x0}\" y=\"{y0}\" width=\"8\" height=\"8\" transform=\"translate(-4,-4)\"/>").unwrap();
            writeln!(out, "<rect class=\"{class}\" x=\"{x1}\" y=\"{y1}\" width=\"6\" height=\"6\" transform=\"translate(-3,-3)\" fill-opacity=\"0.6\"/>").unwrap();
        }
        writeln!(out, "<text x=\"{x0}\" y=\"{y0}\" dx=\"6\" dy=\"-6\">{label}</text>").unwrap();
    }
    writeln!(out, "</g>\n</svg>").unwrap();
    Ok(out)
}

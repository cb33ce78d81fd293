//! Timestamped event log of a run, and its line-oriented file form.
//!
//! A trace file is JSONL: one header object, one object per event, and a final
//! outcome object. The header embeds the drawing, so a trace can be checked and
//! rendered on its own.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::embedding::{Configuration, Embedding, EmbeddingSpec, Position};
use crate::geom::{serde_rational, Rational};
use crate::region::{AllowedRegion, Restriction};

use super::descent::Leg;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneRecord {
    pub restriction: Restriction,
    #[serde(with = "serde_rational")]
    pub measure_before: Rational,
    #[serde(with = "serde_rational")]
    pub measure_after: Rational,
    /// Height of the top line the new epoch is bounded by.
    #[serde(with = "serde_rational")]
    pub line: Rational,
    pub region: AllowedRegion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    SlideStart,
    SlideEnd,
    ReachVertex,
    DescentCascade { legs: Vec<Leg> },
    Capture,
    Waypoint,
    StabilityBreak,
    Prune(PruneRecord),
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::SlideStart => "slide_start",
            EventKind::SlideEnd => "slide_end",
            EventKind::ReachVertex => "reach_vertex",
            EventKind::DescentCascade { .. } => "descent_cascade",
            EventKind::Capture => "capture",
            EventKind::Waypoint => "waypoint",
            EventKind::StabilityBreak => "stability_break",
            EventKind::Prune(_) => "prune",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    #[serde(with = "serde_rational")]
    pub time: Rational,
    #[serde(flatten)]
    pub kind: EventKind,
    pub human: Position,
    pub puppy: Position,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Captured {
        #[serde(with = "serde_rational")]
        time: Rational,
    },
    Running,
    CapExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub embedding_hash: String,
    pub policy: String,
    pub seed: Option<u64>,
    /// Which simulator produced the trace: `event` or `fixed_step`.
    pub simulator: String,
    pub initial: Configuration,
    /// Allowed region at the start of the run (the whole drawing for plain simulations).
    pub region: AllowedRegion,
    pub embedding: EmbeddingSpec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub header: TraceHeader,
    pub events: Vec<Event>,
    pub outcome: Outcome,
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("malformed trace: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Line {
    Header(TraceHeader),
    Event(Event),
    End(Outcome),
}

pub fn embedding_hash(spec: &EmbeddingSpec) -> String {
    let canonical = serde_json::to_vec(spec).expect("embedding spec serializes");
    let digest = Sha256::digest(&canonical);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl Trace {
    pub fn new(emb: &Embedding, policy: &str, seed: Option<u64>, simulator: &str, initial: Configuration) -> Trace {
        Trace {
            header: TraceHeader {
                embedding_hash: embedding_hash(emb.spec()),
                policy: policy.to_string(),
                seed,
                simulator: simulator.to_string(),
                initial,
                region: AllowedRegion::full(emb),
                embedding: emb.spec().clone(),
            },
            events: Vec::new(),
            outcome: Outcome::Running,
        }
    }

    pub fn is_captured(&self) -> bool {
        matches!(self.outcome, Outcome::Captured { .. })
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut line = |l: &Line| -> std::io::Result<()> {
            serde_json::to_writer(&mut w, l)?;
            w.write_all(b"\n")
        };
        line(&Line::Header(self.header.clone()))?;
        for e in &self.events {
            line(&Line::Event(e.clone()))?;
        }
        line(&Line::End(self.outcome.clone()))
    }

    pub fn to_jsonl_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Trace, TraceError> {
        let mut header = None;
        let mut events = Vec::new();
        let mut outcome = None;
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            if outcome.is_some() {
                return Err(TraceError::Malformed(format!("line {}: content after outcome", i + 1)));
            }
            let parsed: Line = serde_json::from_str(&line)
                .map_err(|e| TraceError::Malformed(format!("line {}: {e}", i + 1)))?;
            match parsed {
                Line::Header(h) if header.is_none() && i == 0 => header = Some(h),
                Line::Header(_) => {
                    return Err(TraceError::Malformed(format!("line {}: unexpected header", i + 1)))
                }
                Line::Event(_) | Line::End(_) if header.is_none() => {
                    return Err(TraceError::Malformed("missing header".into()))
                }
                Line::Event(e) => events.push(e),
                Line::End(o) => outcome = Some(o),
            }
        }
        let header = header.ok_or_else(|| TraceError::Malformed("empty trace".into()))?;
        let outcome = outcome.ok_or_else(|| TraceError::Malformed("missing outcome line".into()))?;
        let trace = Trace { header, events, outcome };
        trace.validate()?;
        Ok(trace)
    }

    /// Rebuilds the drawing and checks every recorded position against it.
    pub fn embedding(&self) -> Result<Embedding, TraceError> {
        Embedding::build(&self.header.embedding).map_err(|e| TraceError::Malformed(e.to_string()))
    }

    fn validate(&self) -> Result<(), TraceError> {
        let emb = self.embedding()?;
        if embedding_hash(&self.header.embedding) != self.header.embedding_hash {
            return Err(TraceError::Malformed("embedding hash mismatch".into()));
        }
        let check = |p: &Position| emb.check_position(p).map_err(|e| TraceError::Malformed(e.to_string()));
        check(&self.header.initial.human)?;
        check(&self.header.initial.puppy)?;
        if self.header.region.intervals.len() != emb.edge_count() {
            return Err(TraceError::Malformed("region size does not match drawing".into()));
        }
        let mut last: Option<&Rational> = None;
        for e in &self.events {
            check(&e.human)?;
            check(&e.puppy)?;
            if last.is_some_and(|t| e.time < *t) {
                return Err(TraceError::Malformed("event times decrease".into()));
            }
            last = Some(&e.time);
            if let EventKind::Prune(p) = &e.kind {
                if p.region.intervals.len() != emb.edge_count() {
                    return Err(TraceError::Malformed("region size does not match drawing".into()));
                }
            }
            if let EventKind::DescentCascade { legs } = &e.kind {
                for l in legs {
                    check(&l.from)?;
                    check(&l.to)?;
                }
            }
            if matches!(e.kind, EventKind::Capture) && emb.point_of(&e.human) != emb.point_of(&e.puppy) {
                return Err(TraceError::Malformed("capture event with separated positions".into()));
            }
        }
        Ok(())
    }
}

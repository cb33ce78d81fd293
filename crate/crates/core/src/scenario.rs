//! Scenario files: a drawing, two start positions, a puppy policy and what the
//! human does. Positions and moves refer to vertices and edges by name.

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::dynamics::policy::PolicySpec;
use crate::dynamics::sim::{simulate_path, SimError};
use crate::dynamics::trace::Trace;
use crate::embedding::{Configuration, Embedding, EmbeddingError, EmbeddingSpec, Position};
use crate::geom::{serde_rational, Rational};
use crate::graph::ElementaryMove;
use crate::strategy::{run_strategy, StrategyCaps, StrategyError, StrategyReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NamedPosition {
    Vertex {
        vertex: String,
    },
    Edge {
        edge: String,
        #[serde(with = "serde_rational")]
        t: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedMove {
    pub edge: String,
    #[serde(with = "serde_rational")]
    pub from: Rational,
    #[serde(with = "serde_rational")]
    pub to: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Strategy,
    Replay { moves: Vec<NamedMove> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapsSpec {
    pub max_moves: Option<usize>,
    pub max_prunings: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub embedding: EmbeddingSpec,
    pub human: NamedPosition,
    pub puppy: NamedPosition,
    #[serde(default = "default_policy")]
    pub policy: PolicySpec,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<CapsSpec>,
}

fn default_policy() -> PolicySpec {
    PolicySpec::First
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot parse scenario: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

impl ScenarioError {
    /// Input problems as opposed to failures while running.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            ScenarioError::Parse(_)
                | ScenarioError::Embedding(_)
                | ScenarioError::Sim(SimError::DiscontinuousPath(_) | SimError::ImpossibleChase | SimError::Embedding(_))
                | ScenarioError::Strategy(StrategyError::Disconnected)
        )
    }
}

fn in_unit(t: &Rational) -> bool {
    !t.is_negative() && *t <= Rational::one()
}

pub fn name_position(emb: &Embedding, pos: &Position) -> NamedPosition {
    match pos {
        Position::AtVertex(v) => NamedPosition::Vertex { vertex: emb.vertex_name(*v).to_string() },
        Position::OnEdge(e, t) => NamedPosition::Edge { edge: emb.edge_name(*e).to_string(), t: t.clone() },
    }
}

pub fn resolve_position(emb: &Embedding, pos: &NamedPosition) -> Result<Position, EmbeddingError> {
    let p = match pos {
        NamedPosition::Vertex { vertex } => Position::AtVertex(emb.vertex_by_name(vertex).ok_or_else(|| EmbeddingError::UnknownId(vertex.clone()))?),
        NamedPosition::Edge { edge, t } => {
            let e = emb.edge_by_name(edge).ok_or_else(|| EmbeddingError::UnknownId(edge.clone()))?;
            if !in_unit(t) {
                return Err(EmbeddingError::ParameterOutOfRange(edge.clone()));
            }
            emb.position_on_edge(e, t.clone())
        }
    };
    emb.check_position(&p)?;
    Ok(p)
}

/// What running a scenario produced.
pub struct Execution {
    pub trace: Trace,
    pub report: Option<StrategyReport>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario, ScenarioError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes") + "\n"
    }

    pub fn new(emb: &Embedding, initial: &Configuration, policy: PolicySpec) -> Scenario {
        Scenario {
            name: None,
            embedding: emb.spec().clone(),
            human: name_position(emb, &initial.human),
            puppy: name_position(emb, &initial.puppy),
            policy,
            mode: Mode::Strategy,
            caps: None,
        }
    }

    pub fn embedding(&self) -> Result<Embedding, EmbeddingError> {
        Embedding::build(&self.embedding)
    }

    pub fn initial(&self, emb: &Embedding) -> Result<Configuration, EmbeddingError> {
        Ok(Configuration { human: resolve_position(emb, &self.human)?, puppy: resolve_position(emb, &self.puppy)? })
    }

    pub fn moves(&self, emb: &Embedding) -> Result<Vec<ElementaryMove>, EmbeddingError> {
        let Mode::Replay { moves } = &self.mode else { return Ok(Vec::new()) };
        moves
            .iter()
            .map(|m| {
                let edge = emb.edge_by_name(&m.edge).ok_or_else(|| EmbeddingError::UnknownId(m.edge.clone()))?;
                if [&m.from, &m.to].iter().any(|t| !in_unit(t)) {
                    return Err(EmbeddingError::ParameterOutOfRange(m.edge.clone()));
                }
                Ok(ElementaryMove { edge, from: m.from.clone(), to: m.to.clone() })
            })
            .collect()
    }

    pub fn caps(&self, emb: &Embedding) -> StrategyCaps {
        let mut caps = StrategyCaps::for_embedding(emb);
        if let Some(c) = &self.caps {
            caps.max_moves = c.max_moves.unwrap_or(caps.max_moves);
            caps.max_prunings = c.max_prunings.unwrap_or(caps.max_prunings);
        }
        caps
    }

    /// Checks the drawing, the references and the positions.
    pub fn validate(&self) -> Result<Embedding, ScenarioError> {
        let emb = self.embedding()?;
        self.initial(&emb)?;
        self.moves(&emb)?;
        Ok(emb)
    }

    pub fn execute(&self) -> Result<Execution, ScenarioError> {
        let emb = self.validate()?;
        let initial = self.initial(&emb)?;
        let mut policy = self.policy.build();
        match &self.mode {
            Mode::Strategy => {
                let report = run_strategy(&emb, &initial, policy.as_mut(), &self.caps(&emb))?;
                Ok(Execution { trace: report.trace.clone(), report: Some(report) })
            }
            Mode::Replay { .. } => {
                let trace = simulate_path(&emb, &initial, &self.moves(&emb)?, policy.as_mut())?;
                Ok(Execution { trace, report: None })
            }
        }
    }
}

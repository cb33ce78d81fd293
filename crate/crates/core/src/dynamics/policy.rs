//! Tie-breaking rules for the puppy when several directions decrease its distance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::{Configuration, Direction, Embedding};

use super::descent::{edge_local_min, stabilize};

/// Picks one of the strictly decreasing directions.
///
/// Implementations must return an index into `options` and be reproducible:
/// the same construction parameters and call sequence give the same choices.
pub trait PuppyPolicy {
    fn id(&self) -> &'static str;
    fn seed(&self) -> Option<u64> {
        None
    }
    fn choose(&mut self, emb: &Embedding, config: &Configuration, options: &[Direction]) -> usize;
}

/// Steepest descent: the direction with the largest dot product against the
/// human offset; equal rates go to the lowest edge id.
#[derive(Debug, Clone, Default)]
pub struct FirstPolicy;

impl PuppyPolicy for FirstPolicy {
    fn id(&self) -> &'static str {
        "first"
    }

    fn choose(&mut self, emb: &Embedding, config: &Configuration, options: &[Direction]) -> usize {
        let h = emb.point_of(&config.human);
        let p = emb.point_of(&config.puppy);
        let mut best = 0;
        let mut best_rate = h.dot_from(&p, options[0].dir);
        for (i, d) in options.iter().enumerate().skip(1) {
            let rate = h.dot_from(&p, d.dir);
            if rate > best_rate {
                best = i;
                best_rate = rate;
            }
        }
        best
    }
}

/// Uniform choice driven by a seeded ChaCha stream.
#[derive(Debug, Clone)]
pub struct SeededRandomPolicy {
    seed: u64,
    rng: ChaCha8Rng,
}

impl SeededRandomPolicy {
    pub fn new(seed: u64) -> Self {
        SeededRandomPolicy { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl PuppyPolicy for SeededRandomPolicy {
    fn id(&self) -> &'static str {
        "random"
    }

    fn seed(&self) -> Option<u64> {
        Some(self.seed)
    }

    fn choose(&mut self, _: &Embedding, _: &Configuration, options: &[Direction]) -> usize {
        if options.len() == 1 {
            0
        } else {
            self.rng.gen_range(0..options.len())
        }
    }
}

/// One-step lookahead: run each candidate's full cascade (continued with
/// [`FirstPolicy`]) and take the one ending farthest from the human.
#[derive(Debug, Clone, Default)]
pub struct GreedyAdversarialPolicy;

impl PuppyPolicy for GreedyAdversarialPolicy {
    fn id(&self) -> &'static str {
        "adversarial"
    }

    fn choose(&mut self, emb: &Embedding, config: &Configuration, options: &[Direction]) -> usize {
        if options.len() == 1 {
            return 0;
        }
        let h = emb.point_of(&config.human);
        let mut best = 0;
        let mut best_dist = None;
        for (i, d) in options.iter().enumerate() {
            let first = edge_local_min(emb, &config.puppy, d, &h);
            let next = Configuration { human: config.human.clone(), puppy: first };
            let end = stabilize(emb, &next, &mut FirstPolicy).puppy;
            let dist = emb.point_of(&end).dist_sq(&h);
            if best_dist.as_ref().is_none_or(|b| dist > *b) {
                best = i;
                best_dist = Some(dist);
            }
        }
        best
    }
}

/// Serializable policy selector used by scenario files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicySpec {
    First,
    Random(u64),
    Adversarial,
}

impl PolicySpec {
    pub fn build(&self) -> Box<dyn PuppyPolicy + Send> {
        match self {
            PolicySpec::First => Box::new(FirstPolicy),
            PolicySpec::Random(seed) => Box::new(SeededRandomPolicy::new(*seed)),
            PolicySpec::Adversarial => Box::new(GreedyAdversarialPolicy),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PolicySpec::First => "first",
            PolicySpec::Random(_) => "random",
            PolicySpec::Adversarial => "adversarial",
        }
    }

    /// Parses `first`, `adversarial`, `random` (seed 0) or `random:N`.
    pub fn parse(s: &str) -> Option<PolicySpec> {
        match s {
            "first" => Some(PolicySpec::First),
            "adversarial" | "greedy-adversarial" => Some(PolicySpec::Adversarial),
            "random" | "seeded-random" => Some(PolicySpec::Random(0)),
            _ => s.strip_prefix("random:").and_then(|n| n.parse().ok()).map(PolicySpec::Random),
        }
    }
}

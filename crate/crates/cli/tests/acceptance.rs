//! The nine acceptance criteria, one PASS/FAIL line each.
//!
//! Criterion 8 is a recorded known failure: the run exits zero if it is the
//! only criterion that fails and nonzero otherwise.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use puppy_cli::commands::{generate_scenario, GenerateOptions};
use puppy_core::dynamics::descent::is_stable;
use puppy_core::dynamics::policy::PolicySpec;
use puppy_core::dynamics::sim::{fixed_step_simulate, simulate_path};
use puppy_core::dynamics::trace::{EventKind, Outcome, Trace};
use puppy_core::embedding::{Configuration, EdgeId, Embedding, Position, VertexId};
use puppy_core::fixtures;
use puppy_core::generate::random_configuration;
use puppy_core::geom::{int, Rational};
use puppy_core::graph::bridges;
use puppy_core::region::{AllowedRegion, Restriction};
use puppy_core::scenario::Scenario;
use puppy_core::strategy::{decompose, run_strategy, top_edges, DecompositionContext, StrategyCaps};
use puppy_core::verify::{brute_bridges, check_trace, compare_runs, domination_oracle, feature_gap, stability_oracle, ViolationKind};

const DRAWINGS: u64 = 300;
const STARTS: usize = 3;
const KNOWN_FAILURES: &[usize] = &[8];

struct Verdict {
    id: usize,
    pass: bool,
    detail: String,
}

fn verdict(id: usize, pass: bool, detail: impl Into<String>) -> Verdict {
    let v = Verdict { id, pass, detail: detail.into() };
    println!("criterion {}: {} ({})", v.id, if v.pass { "PASS" } else { "FAIL" }, v.detail);
    v
}

fn policies(seed: u64, k: usize) -> [PolicySpec; 3] {
    [PolicySpec::First, PolicySpec::Random(seed.wrapping_mul(7919) + k as u64), PolicySpec::Adversarial]
}

fn drawing(seed: u64) -> Scenario {
    let opts = GenerateOptions { seed, edges: (10, 50), generic: seed % 2 == 1, grid: None, extra: 0.2 };
    generate_scenario(&opts).expect("generator succeeds")
}

struct RunResult {
    edges: usize,
    outcome: Outcome,
    prunings: usize,
    measures_ok: bool,
    lemma_breaches: usize,
    containment_breaches: usize,
    other_violations: usize,
    regions: Vec<AllowedRegion>,
    error: Option<String>,
}

fn campaign_run(emb: &Embedding, initial: &Configuration, policy: &PolicySpec) -> RunResult {
    let mut r = RunResult {
        edges: emb.edge_count(),
        outcome: Outcome::Running,
        prunings: 0,
        measures_ok: true,
        lemma_breaches: 0,
        containment_breaches: 0,
        other_violations: 0,
        regions: vec![AllowedRegion::full(emb)],
        error: None,
    };
    let report = match run_strategy(emb, initial, policy.build().as_mut(), &StrategyCaps::for_embedding(emb)) {
        Ok(rep) => rep,
        Err(e) => {
            r.error = Some(e.to_string());
            return r;
        }
    };
    r.outcome = report.outcome.clone();
    r.prunings = report.prunings;
    r.measures_ok = report.log.iter().all(|l| l.measure_after < l.measure_before);
    for ev in &report.trace.events {
        if let EventKind::Prune(rec) = &ev.kind {
            r.measures_ok &= rec.measure_after < rec.measure_before;
            r.regions.push(rec.region.clone());
        }
    }
    match check_trace(&report.trace, &report.log) {
        Ok(vs) => {
            for v in vs {
                match v.kind {
                    ViolationKind::LemmaLowerBreach => r.lemma_breaches += 1,
                    ViolationKind::ContainmentBreach => r.containment_breaches += 1,
                    _ => r.other_violations += 1,
                }
            }
        }
        Err(e) => r.error = Some(e.to_string()),
    }
    r
}

/// Clips a region to its top line the way the controller does before
/// decomposing it.
fn clipped(emb: &Embedding, region: &AllowedRegion) -> Option<AllowedRegion> {
    let (m, _) = top_edges(emb, region)?;
    if region.max_y(emb).is_some_and(|y| y > m) {
        region.restrict(emb, &Restriction::AboveHeight(m)).ok()
    } else {
        Some(region.clone())
    }
}

#[derive(Default)]
struct Structural {
    regions: usize,
    decompositions: usize,
    bridge_mismatches: usize,
    domination_pairs: usize,
    domination_mismatches: usize,
    decomposition_errors: Vec<String>,
    invariant_breaks: Vec<String>,
}

impl Structural {
    fn merge(mut self, o: Structural) -> Structural {
        self.regions += o.regions;
        self.decompositions += o.decompositions;
        self.bridge_mismatches += o.bridge_mismatches;
        self.domination_pairs += o.domination_pairs;
        self.domination_mismatches += o.domination_mismatches;
        self.decomposition_errors.extend(o.decomposition_errors);
        self.invariant_breaks.extend(o.invariant_breaks);
        self
    }
}

/// Independent re-check of the attachment spans and the path of outer components.
fn decomposition_invariants(emb: &Embedding, ctx: &DecompositionContext) -> Result<(), String> {
    let outer = &ctx.nondominated;
    for (i, &a) in outer.iter().enumerate() {
        for &b in &outer[i + 1..] {
            let ((al, ar), (bl, br)) = (ctx.components[a].span(), ctx.components[b].span());
            if !(ar < bl || br < al) {
                return Err(format!("attachment spans of {a} and {b} overlap"));
            }
        }
    }
    if ctx.gd_links.len() + 1 != outer.len().max(1) {
        return Err(format!("{} outer components but {} links", outer.len(), ctx.gd_links.len()));
    }
    for (w, &(l, r, e)) in outer.windows(2).zip(&ctx.gd_links) {
        if (w[0], w[1]) != (l, r) {
            return Err(format!("link {l}-{r} does not join neighbours {}-{}", w[0], w[1]));
        }
        let (p, q) = emb.endpoints(e);
        let (lo, hi) = if p.x < q.x { (&p.x, &q.x) } else { (&q.x, &p.x) };
        if lo != ctx.components[l].span().1 || hi != ctx.components[r].span().0 {
            return Err(format!("link edge {e} does not touch the spans it joins"));
        }
    }
    Ok(())
}

fn structural(emb: &Embedding, regions: &[AllowedRegion]) -> Structural {
    let mut s = Structural::default();
    for region in regions {
        s.regions += 1;
        match (bridges(emb, region), brute_bridges(emb, region)) {
            (Ok(b), brute) if b == brute => {}
            _ => s.bridge_mismatches += 1,
        }
        let Some(clip) = clipped(emb, region) else { continue };
        let ctx = match decompose(emb, &clip) {
            Ok(c) => c,
            Err(e) => {
                s.decomposition_errors.push(e.to_string());
                continue;
            }
        };
        s.decompositions += 1;
        if let Err(e) = decomposition_invariants(emb, &ctx) {
            s.invariant_breaks.push(e);
        }
        let n = ctx.components.len();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                s.domination_pairs += 1;
                let oracle = domination_oracle(emb, &clip, &ctx.m, &ctx.components[i], &ctx.components[j]);
                if oracle != ctx.dominates[i][j] {
                    s.domination_mismatches += 1;
                }
            }
        }
    }
    s
}

fn five_components_relation() -> Result<(), String> {
    let emb = fixtures::five_components();
    let ctx = decompose(&emb, &AllowedRegion::full(&emb)).map_err(|e| e.to_string())?;
    let of = |name: &str| ctx.labels.edge[emb.edge_by_name(name).unwrap().index()].unwrap();
    let (c1, c2, c3, c4, c5) = (of("c1a"), of("c2a"), of("c3"), of("c4"), of("c5"));
    let expected: BTreeSet<(usize, usize)> = [(c1, c2), (c1, c3), (c1, c4), (c2, c3), (c2, c4)].into();
    let n = ctx.components.len();
    let got: BTreeSet<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| ctx.dominates[i][j]).collect();
    if got != expected {
        return Err(format!("domination {got:?}, expected {expected:?}"));
    }
    if ctx.nondominated != vec![c1, c5] || ctx.gd_links.iter().map(|&(l, r, _)| (l, r)).collect::<Vec<_>>() != vec![(c1, c5)] {
        return Err("outer path is not C1-C5".into());
    }
    Ok(())
}

/// A vertex, or an edge point at a random fraction with denominator up to 16.
fn any_position(rng: &mut ChaCha8Rng, emb: &Embedding) -> Position {
    if rng.gen_bool(0.3) {
        Position::AtVertex(VertexId(rng.gen_range(0..emb.vertex_count()) as u32))
    } else {
        let q: i64 = rng.gen_range(2..=16);
        let p: i64 = rng.gen_range(1..q);
        emb.position_on_edge(EdgeId(rng.gen_range(0..emb.edge_count()) as u32), Rational::new(p.into(), q.into()))
    }
}

/// Returns (configurations, mismatches).
fn stability_sweep(emb: &Embedding, n: usize, seed: u64) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for _ in 0..n {
        let config = Configuration { human: any_position(&mut rng, emb), puppy: any_position(&mut rng, emb) };
        let eps = feature_gap(emb, &config).unwrap_or_else(|| int(1)) / int(8);
        if is_stable(emb, &config) != stability_oracle(emb, &config, &eps) {
            bad += 1;
        }
    }
    (n, bad)
}

fn main() {
    let started = Instant::now();
    let mut verdicts = Vec::new();

    let drawings: Vec<(u64, Embedding, Vec<Configuration>)> = (0..DRAWINGS)
        .into_par_iter()
        .map(|seed| {
            let s = drawing(seed);
            let emb = s.embedding().expect("generated drawing validates");
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xacce);
            let starts = (0..STARTS).map(|_| random_configuration(&mut rng, &emb)).collect();
            (seed, emb, starts)
        })
        .collect();
    let jobs: Vec<(usize, Configuration, PolicySpec)> = drawings
        .iter()
        .enumerate()
        .flat_map(|(d, (seed, _, starts))| {
            starts.iter().enumerate().flat_map(move |(k, c)| policies(*seed, k).map(|p| (d, c.clone(), p)))
        })
        .collect();
    let results: Vec<(usize, RunResult)> =
        jobs.par_iter().map(|(d, c, p)| (*d, campaign_run(&drawings[*d].1, c, p))).collect();
    let campaign_time = started.elapsed();

    // 1
    let captured = results.iter().filter(|(_, r)| matches!(r.outcome, Outcome::Captured { .. })).count();
    let capped = results.iter().filter(|(_, r)| r.outcome == Outcome::CapExceeded).count();
    let errors: Vec<&String> = results.iter().filter_map(|(_, r)| r.error.as_ref()).collect();
    let within_time = campaign_time.as_secs() < 600;
    verdicts.push(verdict(
        1,
        captured == results.len() && capped == 0 && errors.is_empty() && within_time,
        format!(
            "{captured}/{} captured, {capped} cap exceeded, {} errors, {:.1}s",
            results.len(),
            errors.len(),
            campaign_time.as_secs_f64()
        ),
    ));

    // 2
    let over = results.iter().filter(|(_, r)| r.prunings > r.edges).count();
    let non_decreasing = results.iter().filter(|(_, r)| !r.measures_ok).count();
    let max_ratio = results.iter().map(|(_, r)| r.prunings as f64 / r.edges as f64).fold(0.0, f64::max);
    verdicts.push(verdict(
        2,
        over == 0 && non_decreasing == 0 && errors.is_empty(),
        format!("{over} runs with prunings > edges, {non_decreasing} non-shrinking prunings, max prunings/edge {max_ratio:.2}"),
    ));

    // 3
    let lemma: usize = results.iter().map(|(_, r)| r.lemma_breaches).sum();
    let contain: usize = results.iter().map(|(_, r)| r.containment_breaches).sum();
    let other: usize = results.iter().map(|(_, r)| r.other_violations).sum();
    verdicts.push(verdict(
        3,
        lemma == 0 && contain == 0 && other == 0 && errors.is_empty(),
        format!("{lemma} LemmaLowerBreach, {contain} ContainmentBreach, {other} other violations"),
    ));

    // 4
    let mut sweeps = vec![
        stability_sweep(&fixtures::staple(), 10_000, 1),
        stability_sweep(&fixtures::five_components(), 10_000, 2),
        stability_sweep(&fixtures::two_rail(), 10_000, 3),
    ];
    sweeps.extend(drawings[..100].par_iter().map(|(seed, emb, _)| stability_sweep(emb, 100, 1000 + seed)).collect::<Vec<_>>());
    let (configs, mismatches) = sweeps.iter().fold((0, 0), |(a, b), (n, m)| (a + n, b + m));
    verdicts.push(verdict(4, mismatches == 0, format!("{mismatches} mismatches over {configs} configurations")));

    // 5 and 6
    let f2 = fixtures::five_components();
    let mut per_drawing: Vec<Vec<AllowedRegion>> = vec![Vec::new(); drawings.len()];
    for (d, r) in &results {
        for region in &r.regions {
            if !per_drawing[*d].contains(region) {
                per_drawing[*d].push(region.clone());
            }
        }
    }
    let st = per_drawing
        .par_iter()
        .enumerate()
        .map(|(d, regions)| structural(&drawings[d].1, regions))
        .reduce(Structural::default, Structural::merge)
        .merge(structural(&f2, &[AllowedRegion::full(&f2)]));
    let f2_relation = five_components_relation();
    verdicts.push(verdict(
        5,
        st.bridge_mismatches == 0 && st.domination_mismatches == 0 && f2_relation.is_ok(),
        format!(
            "{} bridge mismatches over {} regions, {} domination mismatches over {} pairs, five-component relation {}",
            st.bridge_mismatches,
            st.regions,
            st.domination_mismatches,
            st.domination_pairs,
            f2_relation.as_ref().map(|_| "as expected".to_string()).unwrap_or_else(|e| e.clone())
        ),
    ));
    verdicts.push(verdict(
        6,
        st.decomposition_errors.is_empty() && st.invariant_breaks.is_empty(),
        format!(
            "{} decompositions, {} errors, {} invariant breaks{}",
            st.decompositions,
            st.decomposition_errors.len(),
            st.invariant_breaks.len(),
            st.decomposition_errors.iter().chain(&st.invariant_breaks).next().map(|e| format!("; first: {e}")).unwrap_or_default()
        ),
    ));

    // 7
    let compared: Vec<Result<usize, String>> = drawings[..100]
        .par_iter()
        .map(|(_, emb, starts)| {
            let initial = &starts[0];
            let report = run_strategy(emb, initial, PolicySpec::First.build().as_mut(), &StrategyCaps::for_embedding(emb))
                .map_err(|e| e.to_string())?;
            let delta = emb.min_coordinate_gap().unwrap_or_else(|| int(1)) / int(4);
            let event = simulate_path(emb, initial, &report.path, PolicySpec::First.build().as_mut()).map_err(|e| e.to_string())?;
            let fixed = fixed_step_simulate(emb, initial, &report.path, PolicySpec::First.build().as_mut(), &delta)
                .map_err(|e| e.to_string())?;
            compare_runs(&event, &fixed, &delta).map(|v| v.len()).map_err(|e| e.to_string())
        })
        .collect();
    let mismatch: usize = compared.iter().filter_map(|r| r.as_ref().ok()).sum();
    let failed: Vec<&String> = compared.iter().filter_map(|r| r.as_ref().err()).collect();
    verdicts.push(verdict(
        7,
        mismatch == 0 && failed.is_empty(),
        format!(
            "{} scenarios at delta = gap/4, {mismatch} mismatches, {} errors{}",
            compared.len(),
            failed.len(),
            failed.first().map(|e| format!("; first: {e}")).unwrap_or_default()
        ),
    ));

    // 8
    let dl = fixtures::double_loop();
    let caps = StrategyCaps::for_embedding(&dl);
    let start = Configuration { human: fixtures::vertex(&dl, "q0"), puppy: fixtures::vertex(&dl, "q6") };
    let outcomes: Vec<String> = [PolicySpec::First, PolicySpec::Random(8), PolicySpec::Adversarial]
        .iter()
        .map(|p| match run_strategy(&dl, &start, p.build().as_mut(), &caps) {
            Ok(r) => match r.outcome {
                Outcome::CapExceeded => format!("{}: cap exceeded after {} moves", p.name(), r.moves),
                Outcome::Captured { time } => format!("{}: captured at t={time}", p.name()),
                Outcome::Running => format!("{}: stopped", p.name()),
            },
            Err(e) => format!("{}: error {e}", p.name()),
        })
        .collect();
    let all_capped = outcomes.iter().all(|o| o.contains("cap exceeded"));
    verdicts.push(verdict(8, all_capped, format!("move cap {}; {}", caps.max_moves, outcomes.join("; "))));

    // 9
    let mut rerun_diffs = 0;
    let mut reruns = 0;
    for (seed, emb, starts) in drawings.iter().take(30) {
        for p in policies(*seed, 0) {
            let s = Scenario::new(emb, &starts[0], p);
            let a: Trace = s.execute().expect("runs").trace;
            let b: Trace = s.execute().expect("runs").trace;
            let text = s.to_json();
            let c: Trace = Scenario::from_json(&text).unwrap().execute().expect("runs").trace;
            reruns += 1;
            if a.to_jsonl_string() != b.to_jsonl_string() || a.to_jsonl_string() != c.to_jsonl_string() {
                rerun_diffs += 1;
            }
        }
    }
    let regen = drawing(17).to_json() == drawing(17).to_json();
    verdicts.push(verdict(
        9,
        rerun_diffs == 0 && regen,
        format!("{rerun_diffs} of {reruns} re-runs differ, generator {}", if regen { "repeatable" } else { "not repeatable" }),
    ));

    let failed: Vec<usize> = verdicts.iter().filter(|v| !v.pass).map(|v| v.id).collect();
    let unexpected: Vec<usize> = failed.iter().copied().filter(|id| !KNOWN_FAILURES.contains(id)).collect();
    println!(
        "{} of {} criteria pass; failing: {:?} (known: {:?}); total {:.1}s",
        verdicts.len() - failed.len(),
        verdicts.len(),
        failed,
        KNOWN_FAILURES,
        started.elapsed().as_secs_f64()
    );
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}

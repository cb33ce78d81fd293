use proptest::prelude::*;

use puppy_core::dynamics::descent::{is_stable, stabilize};
use puppy_core::dynamics::policy::PolicySpec;
use puppy_core::dynamics::sim::simulate_path;
use puppy_core::embedding::{Configuration, EdgeId, Embedding, Position, VertexId};
use puppy_core::generate::{generate, is_generic, GeneratorParams};
use puppy_core::geom::Rational;
use puppy_core::graph::components;
use puppy_core::region::{AllowedRegion, Restriction};
use puppy_core::scenario::Scenario;
use puppy_core::strategy::{run_strategy, StrategyCaps};
use puppy_core::verify::{brute_bridges, check_trace};

fn drawing(seed: u64, generic: bool) -> Embedding {
    Embedding::build(&generate(&GeneratorParams::new(seed, (8, 30), generic)).unwrap()).unwrap()
}

fn position(emb: &Embedding, pick: (bool, usize, i64, i64)) -> Position {
    let (at_vertex, i, p, q) = pick;
    if at_vertex {
        Position::AtVertex(VertexId((i % emb.vertex_count()) as u32))
    } else {
        let t = Rational::new((p % q).max(1).into(), q.into());
        emb.position_on_edge(EdgeId((i % emb.edge_count()) as u32), t)
    }
}

fn pick() -> impl Strategy<Value = (bool, usize, i64, i64)> {
    (any::<bool>(), 0usize..1000, 1i64..50, 2i64..50)
}

fn policy() -> impl Strategy<Value = PolicySpec> {
    prop_oneof![Just(PolicySpec::First), any::<u64>().prop_map(PolicySpec::Random), Just(PolicySpec::Adversarial)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_symmetric(seed in 0u64..500, a in pick(), b in pick()) {
        let emb = drawing(seed, false);
        let (pa, pb) = (position(&emb, a), position(&emb, b));
        prop_assert_eq!(emb.dist_sq(&pa, &pb).unwrap(), emb.dist_sq(&pb, &pa).unwrap());
    }

    #[test]
    fn descent_ends_stable_and_strictly_improves(seed in 0u64..500, h in pick(), p in pick(), pol in policy()) {
        let emb = drawing(seed, seed % 2 == 1);
        let config = Configuration { human: position(&emb, h), puppy: position(&emb, p) };
        let s = stabilize(&emb, &config, pol.build().as_mut());
        let done = Configuration { human: config.human.clone(), puppy: s.puppy.clone() };
        prop_assert!(is_stable(&emb, &done));
        prop_assert!(s.legs.len() <= emb.vertex_count() + 1);
        let hp = emb.point_of(&config.human);
        for leg in &s.legs {
            prop_assert!(emb.point_of(&leg.to).dist_sq(&hp) < emb.point_of(&leg.from).dist_sq(&hp));
        }
        prop_assert_eq!(s.captured, s.puppy == config.human);
    }

    #[test]
    fn restrictions_only_shrink(seed in 0u64..500, cuts in proptest::collection::vec(0usize..1000, 1..5)) {
        let emb = drawing(seed, false);
        let mut region = AllowedRegion::full(&emb);
        for c in cuts {
            let e = EdgeId((c % emb.edge_count()) as u32);
            let cut = if c % 2 == 0 {
                Restriction::RemoveEdges([e].into())
            } else {
                let (a, b) = emb.endpoints(e);
                Restriction::AboveHeight(a.y.clone().max(b.y.clone()))
            };
            let Ok(next) = region.restrict(&emb, &cut) else { continue };
            prop_assert!(next.is_subset_of(&region));
            prop_assert!(next.measure(&emb) <= region.measure(&emb));
            region = next;
        }
    }

    #[test]
    fn bridges_match_brute_force_on_full_drawings(seed in 0u64..500) {
        let emb = drawing(seed, false);
        let full = AllowedRegion::full(&emb);
        prop_assert_eq!(components(&emb, &full, &Default::default()).count, 1);
        prop_assert_eq!(puppy_core::graph::bridges(&emb, &full).unwrap(), brute_bridges(&emb, &full));
    }

    #[test]
    fn generic_drawings_have_distinct_heights(seed in 0u64..500) {
        prop_assert!(is_generic(&drawing(seed, true)));
    }

    #[test]
    fn strategy_captures_cleanly(seed in 0u64..500, h in pick(), p in pick(), pol in policy()) {
        let emb = drawing(seed, seed % 2 == 0);
        let config = Configuration { human: position(&emb, h), puppy: position(&emb, p) };
        let report = run_strategy(&emb, &config, pol.build().as_mut(), &StrategyCaps::for_embedding(&emb)).unwrap();
        prop_assert!(report.trace.is_captured());
        prop_assert!(report.prunings <= emb.edge_count());
        prop_assert!(check_trace(&report.trace, &report.log).unwrap().is_empty());
        let again = simulate_path(&emb, &config, &report.path, pol.build().as_mut()).unwrap();
        prop_assert_eq!(again.outcome, report.trace.outcome);
    }

    #[test]
    fn scenarios_round_trip(seed in 0u64..500, h in pick(), p in pick(), pol in policy()) {
        let emb = drawing(seed, false);
        let config = Configuration { human: position(&emb, h), puppy: position(&emb, p) };
        let s = Scenario::new(&emb, &config, pol);
        let back = Scenario::from_json(&s.to_json()).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.initial(&back.embedding().unwrap()).unwrap(), config);
    }
}

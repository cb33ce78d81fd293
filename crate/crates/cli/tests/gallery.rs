use std::fs;
use std::path::Path;

use puppy_cli::commands::{load_scenario, run, RunOptions};
use puppy_cli::render::render_svg;
use puppy_cli::Exit;

const SCENARIOS: &[&str] =
    &["f1_staple", "f2_five_components", "f3_two_rail", "stable_configuration", "unstable_configuration", "double_loop"];

fn dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../gallery"))
}

#[test]
fn shipped_scenarios_run_clean() {
    for name in SCENARIOS {
        let path = dir().join(format!("{name}.json"));
        let report = run(&path, &RunOptions { check: true, ..Default::default() }).unwrap();
        assert_eq!(report.exit, Exit::Success, "{name}: {}", report.text);
    }
}

#[test]
fn double_loop_ships_with_the_override() {
    let s = load_scenario(&dir().join("double_loop.json"), false).unwrap();
    assert!(s.embedding.allow_crossings);
    assert_eq!(s.validate().unwrap().crossing_count(), 1);
}

#[test]
fn stable_pair_differs_only_in_stability() {
    use puppy_core::dynamics::descent::is_stable;
    let mut verdicts = Vec::new();
    for name in ["stable_configuration", "unstable_configuration"] {
        let s = load_scenario(&dir().join(format!("{name}.json")), false).unwrap();
        let emb = s.validate().unwrap();
        verdicts.push(is_stable(&emb, &s.initial(&emb).unwrap()));
    }
    assert_eq!(verdicts, [true, false]);
}

#[test]
fn figures_match_fresh_renders() {
    for name in SCENARIOS {
        let s = load_scenario(&dir().join(format!("{name}.json")), false).unwrap();
        let svg = render_svg(&s.execute().unwrap().trace).unwrap();
        let shipped = fs::read_to_string(dir().join(format!("{name}.svg"))).unwrap();
        assert_eq!(svg, shipped, "{name}.svg is stale");
    }
}

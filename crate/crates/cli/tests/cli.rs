use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn gallery(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../gallery").join(name)
}

fn puppy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_puppy")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn staple(edges: Value) -> Value {
    json!({
        "embedding": {
            "vertices": [
                {"id": "a", "x": "0", "y": "0"},
                {"id": "b", "x": "0", "y": "2"},
                {"id": "c", "x": "2", "y": "2"},
                {"id": "d", "x": "2", "y": "0"}
            ],
            "edges": edges
        },
        "human": {"vertex": "b"},
        "puppy": {"vertex": "d"}
    })
}

fn write_json(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_accepts_staple() {
    let o = puppy(&["validate", s(&gallery("f1_staple.json"))]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("4 vertices, 3 edges"));
}

#[test]
fn validate_rejects_diagonal_edge() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_json(dir.path(), "diag.json", &staple(json!([{"id": "e1", "u": "a", "v": "c"}])));
    let o = puppy(&["validate", s(&p)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("NonOrthogonalEdge"), "{}", stderr(&o));
}

#[test]
fn crossing_needs_the_flag() {
    let o = puppy(&["validate", s(&gallery("double_loop.json"))]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("1 crossings"));

    let dir = tempfile::tempdir().unwrap();
    let mut v: Value = serde_json::from_str(&fs::read_to_string(gallery("double_loop.json")).unwrap()).unwrap();
    v["embedding"]["allow_crossings"] = json!(false);
    let p = write_json(dir.path(), "cross.json", &v);
    let o = puppy(&["validate", s(&p)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("ImproperCrossing"), "{}", stderr(&o));
    assert_eq!(code(&puppy(&["validate", "--allow-crossings", s(&p)])), 0);
}

#[test]
fn missing_file_is_io_error() {
    assert_eq!(code(&puppy(&["validate", "/nonexistent/scenario.json"])), 5);
}

#[test]
fn run_staple_captures_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let (trace, svg) = (dir.path().join("t.jsonl"), dir.path().join("f.svg"));
    let o = puppy(&["run", s(&gallery("f1_staple.json")), "--check", "--trace", s(&trace), "--svg", s(&svg)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("no violations"));
    let last = fs::read_to_string(&trace).unwrap().lines().last().unwrap().to_string();
    assert!(last.contains("\"captured\""), "{last}");
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn replay_without_capture_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: Value = serde_json::from_str(&fs::read_to_string(gallery("f3_two_rail.json")).unwrap()).unwrap();
    v["mode"] = json!({"type": "replay", "moves": [{"edge": "top", "from": "0", "to": "1/2"}]});
    let p = write_json(dir.path(), "r.json", &v);
    assert_eq!(code(&puppy(&["run", s(&p)])), 3);
}

#[test]
fn discontinuous_replay_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = staple(json!([
        {"id": "e1", "u": "a", "v": "b"},
        {"id": "e2", "u": "b", "v": "c"},
        {"id": "e3", "u": "c", "v": "d"}
    ]));
    v["human"] = json!({"vertex": "a"});
    // The first move ends halfway up e1, the second starts at d.
    v["mode"] = json!({"type": "replay", "moves": [
        {"edge": "e1", "from": "0", "to": "1/2"},
        {"edge": "e3", "from": "1", "to": "0"}
    ]});
    let p = write_json(dir.path(), "gap.json", &v);
    let o = puppy(&["run", s(&p)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("DiscontinuousPath"), "{}", stderr(&o));
}

#[test]
fn cap_moves_flag_is_honoured() {
    let o = puppy(&["run", s(&gallery("f2_five_components.json")), "--cap-moves", "1"]);
    assert_eq!(code(&o), 3, "{}", stdout(&o));
    assert!(stdout(&o).contains("cap exceeded"));
}

#[test]
fn generate_is_deterministic_and_valid() {
    let a = puppy(&["generate", "--seed", "1", "--edges", "10..20"]);
    let b = puppy(&["generate", "--seed", "1", "--edges", "10..20"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.json");
    assert_eq!(code(&puppy(&["generate", "--seed", "1", "--edges", "10..20", "--out", s(&p)])), 0);
    assert_eq!(fs::read_to_string(&p).unwrap().trim_end(), stdout(&a).trim_end());
    assert_eq!(code(&puppy(&["validate", s(&p)])), 0);
}

#[test]
fn generic_mode_separates_horizontal_heights() {
    let o = puppy(&["generate", "--seed", "7", "--edges", "20..30", "--generic"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let verts = v["embedding"]["vertices"].as_array().unwrap();
    let at = |id: &Value| verts.iter().find(|w| &w["id"] == id).unwrap();
    let mut heights = Vec::new();
    for e in v["embedding"]["edges"].as_array().unwrap() {
        let (p, q) = (at(&e["u"]), at(&e["v"]));
        if p["y"] == q["y"] {
            heights.push(p["y"].as_str().unwrap().to_string());
        }
    }
    let n = heights.len();
    heights.sort();
    heights.dedup();
    assert!(n > 1);
    assert_eq!(heights.len(), n, "horizontal heights repeat");
}

#[test]
fn empty_batch_succeeds() {
    let o = puppy(&["batch", "--count", "0"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["runs"], 0);
}

#[test]
fn batch_reports_small_campaign() {
    let dir = tempfile::tempdir().unwrap();
    let o = puppy(&["batch", "--count", "4", "--seed", "11", "--edges", "10..20", "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["runs"], 36);
    assert_eq!(v["captured"], 36);
    assert_eq!(v["violations"], 0);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 36);
}

#[test]
fn batch_flags_crossing_drawing() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: Value = serde_json::from_str(&fs::read_to_string(gallery("double_loop.json")).unwrap()).unwrap();
    v["embedding"]["allow_crossings"] = json!(false);
    let p = write_json(dir.path(), "cross.json", &v);
    let o = puppy(&["batch", "--count", "1", "--starts", "1", "--policies", "first", "--include", s(&p)]);
    assert_ne!(code(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["validation_failures"], 1);
    assert!(r["problems"][0]["error"].as_str().unwrap().contains("ImproperCrossing"));
}

#[test]
fn render_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    assert_eq!(code(&puppy(&["run", s(&gallery("f2_five_components.json")), "--trace", s(&trace)])), 0);
    let a = puppy(&["render", s(&trace)]);
    let b = puppy(&["render", s(&trace)]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let svg = stdout(&a);
    assert!(svg.contains("id=\"forbidden\""));
    assert!(svg.contains("class=\"human\"") && svg.contains("class=\"puppy\""));
}

#[test]
fn render_header_only_trace_draws_the_drawing() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    assert_eq!(code(&puppy(&["run", s(&gallery("f1_staple.json")), "--trace", s(&trace)])), 0);
    let text = fs::read_to_string(&trace).unwrap();
    let header = text.lines().next().unwrap();
    let empty = dir.path().join("empty.jsonl");
    fs::write(&empty, format!("{header}\n{{\"type\":\"end\",\"outcome\":\"running\"}}\n")).unwrap();
    let o = puppy(&["render", s(&empty)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let svg = stdout(&o);
    assert_eq!(svg.matches("class=\"edge\"").count(), 3);
    assert!(!svg.contains("<polyline"));
}

#[test]
fn render_rejects_corrupt_trace() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.jsonl");
    fs::write(&p, "{\"type\":\"header\",\"oops\":1}\nnot json\n").unwrap();
    let o = puppy(&["render", s(&p)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("MalformedTrace"));
}

#[test]
fn compare_two_rail_agrees() {
    let o = puppy(&["compare", s(&gallery("f3_two_rail.json")), "--delta", "1/64"]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("agree"));
}

#[test]
fn compare_rejects_large_delta() {
    let o = puppy(&["compare", s(&gallery("f3_two_rail.json")), "--delta", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("PreconditionViolation"), "{}", stderr(&o));
}

#[test]
fn compare_catches_perturbed_trace() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: Value = serde_json::from_str(&fs::read_to_string(gallery("f3_two_rail.json")).unwrap()).unwrap();
    v["mode"] = json!({"type": "replay", "moves": [{"edge": "top", "from": "0", "to": "1/2"}]});
    let scenario = write_json(dir.path(), "r.json", &v);
    let trace = dir.path().join("t.jsonl");
    assert_eq!(code(&puppy(&["run", s(&scenario), "--trace", s(&trace)])), 3);
    assert_eq!(code(&puppy(&["compare", s(&scenario), "--delta", "1/64", "--trace", s(&trace)])), 0);

    // Move the recorded puppy from (3,0) to the bottom-right corner.
    let text = fs::read_to_string(&trace).unwrap();
    let bent: Vec<String> = text
        .lines()
        .map(|l| if l.contains("\"waypoint\"") { l.replace("\"puppy\":{\"on_edge\":[1,\"1/2\"]}", "\"puppy\":{\"at_vertex\":3}") } else { l.to_string() })
        .collect();
    assert_ne!(bent.join("\n") + "\n", text);
    let perturbed = dir.path().join("p.jsonl");
    fs::write(&perturbed, bent.join("\n") + "\n").unwrap();
    let o = puppy(&["compare", s(&scenario), "--delta", "1/64", "--trace", s(&perturbed)]);
    assert_eq!(code(&o), 4, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("OracleMismatch"));
}

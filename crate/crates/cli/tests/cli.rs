use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const PATH_GRAPH: &str = r#"{"vertices": 4, "edges": [[0, 1], [1, 2], [2, 3]], "starts": [0, 1], "goals": [2, 3]}"#;

fn formation(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_formation")).args(args).env_remove("FORMATION_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn schedule_json(path: &str) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn path_str(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

#[test]
fn plan_path_graph_sequential_and_compressed() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "path.json", PATH_GRAPH);
    let seq = path_str(&dir, "seq.json");
    let comp = path_str(&dir, "comp.json");

    let o = formation(&["plan", "--input", &input, "--output", &seq]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(schedule_json(&seq)["makespan"], 3);
    assert_eq!(schedule_json(&seq)["total_distance"], 4);

    let o = formation(&["plan", "--input", &input, "--compress", "--output", &comp]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(schedule_json(&comp)["makespan"], 2);

    for s in [&seq, &comp] {
        let o = formation(&["verify", "--input", &input, "--schedule", s]);
        assert!(o.status.success(), "{}", stdout(&o));
        assert!(stdout(&o).contains("feasible: true"));
        assert!(stdout(&o).contains("distance_optimal: true"));
    }
}

#[test]
fn verify_rejects_tampered_schedule() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "path.json", PATH_GRAPH);
    let out = path_str(&dir, "s.json");
    assert!(formation(&["plan", "--input", &input, "--output", &out]).status.success());

    // both agents standing on vertex 2 at the last step
    let mut s = schedule_json(&out);
    let last = s["agents"][1]["trajectory"].as_array().unwrap().len() - 1;
    s["agents"][1]["trajectory"][last] = 2.into();
    let tampered = write(&dir, "bad.json", &s.to_string());
    let o = formation(&["verify", "--input", &input, "--schedule", &tampered]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("false"));

    // a lie in the summary alone also fails
    let mut s = schedule_json(&out);
    s["makespan"] = 1.into();
    let lied = write(&dir, "lie.json", &s.to_string());
    let o = formation(&["verify", "--input", &input, "--schedule", &lied]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("inconsistent: declared makespan 1"));
}

#[test]
fn trace_prints_grid_cells() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "grid.json", r#"{"grid": {"cols": 3, "rows": 1}, "starts": [[0, 0]], "goals": [[2, 0]]}"#);
    let out = path_str(&dir, "s.json");
    assert!(formation(&["plan", "--input", &input, "--output", &out]).status.success());
    let o = formation(&["trace", "--schedule", &out, "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1: 0,0 1,0 2,0\n");
}

#[test]
fn malformed_input_reports_location() {
    let dir = TempDir::new().unwrap();
    let out = path_str(&dir, "s.json");

    let broken = write(&dir, "broken.json", "{\"vertices\": 4,\n \"edges\": [[0, 1]\n");
    let o = formation(&["plan", "--input", &broken, "--output", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));

    let unknown = write(&dir, "unknown.json", r#"{"vertices": 2, "edges": [[0, 1]], "starts": [0], "goals": [1], "speed": 3}"#);
    let o = formation(&["plan", "--input", &unknown, "--output", &out]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("speed"), "{}", stderr(&o));

    let hole = write(&dir, "hole.json", r#"{"grid": {"cols": 3, "rows": 1, "holes": [[1, 0]]}, "starts": [[0, 0]], "goals": [[2, 0]]}"#);
    let o = formation(&["plan", "--input", &hole, "--output", &out]);
    assert!(!o.status.success());

    let cell = write(&dir, "cell.json", r#"{"grid": {"cols": 3, "rows": 2, "holes": [[1, 0]]}, "starts": [[1, 0]], "goals": [[2, 0]]}"#);
    let o = formation(&["plan", "--input", &cell, "--output", &out]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("starts[0]"), "{}", stderr(&o));

    assert!(!Path::new(&out).exists());
}

#[test]
fn gen_is_deterministic_and_plannable() {
    let dir = TempDir::new().unwrap();
    let a = formation(&["gen", "--cols", "6", "--rows", "5", "--agents", "4", "--seed", "9", "--holes", "3"]);
    let b = formation(&["gen", "--cols", "6", "--rows", "5", "--agents", "4", "--seed", "9", "--holes", "3"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));

    let via_env = Command::new(env!("CARGO_BIN_EXE_formation"))
        .args(["gen", "--cols", "6", "--rows", "5", "--agents", "4", "--holes", "3"])
        .env("FORMATION_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(stdout(&via_env), stdout(&a));

    let input = write(&dir, "gen.json", &stdout(&a));
    let out = path_str(&dir, "s.json");
    assert!(formation(&["plan", "--input", &input, "--compress", "--output", &out]).status.success());
    assert!(formation(&["verify", "--input", &input, "--schedule", &out]).status.success());

    let o = formation(&["gen", "--cols", "2", "--rows", "1", "--agents", "2"]);
    assert!(!o.status.success());
}

#[test]
fn tight_instance_hits_bound() {
    let dir = TempDir::new().unwrap();
    let input = path_str(&dir, "tight.json");
    assert!(formation(&["tight", "--agents", "3", "--ell", "3", "--output", &input]).status.success());
    let out = path_str(&dir, "s.json");
    assert!(formation(&["plan", "--input", &input, "--output", &out]).status.success());
    assert_eq!(schedule_json(&out)["makespan"], 5);
    let o = formation(&["verify", "--input", &input, "--schedule", &out]);
    assert!(stdout(&o).contains("within_bound: true (makespan 5 <= bound 5)"));
}

#[test]
fn bench_emits_records_and_na_cells() {
    let o = formation(&["bench", "--grid", "4x4,6x6", "--agents", "2,10", "--runs", "2", "--seed", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "vertex_count,agent_count,seed,plan_time_seconds,makespan_sequential,makespan_compressed,total_distance"
    );
    // 4x4/2, 6x6/2 and 6x6/10 run twice each; 4x4/10 does not fit
    assert_eq!(lines.count(), 6);
    assert!(stderr(&o).contains("N/A"));
    assert!(stderr(&o).contains("n=2 16 -> 36 vertices"));

    let o = formation(&["bench", "--grid", "4by4", "--agents", "2"]);
    assert!(!o.status.success());
}

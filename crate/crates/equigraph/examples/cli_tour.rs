// Drive the command-line interface end to end, in process.
//
// The binary is a thin wrapper around `cli::run_command`, so everything it
// can do is scriptable from code: generate model files, verify them, reduce
// them to traces, export DOT, and run generate/reduce round-trips.  This
// example executes a full session against a temporary directory and shows
// the exit-code conventions: 0 success, 2 validation failure, 3 valid but
// not reducible, 4 usage or input trouble.

use equigraph::cli::run_command;
use std::fs;
use std::path::Path;

fn run(args: &[&str]) -> (i32, String) {
    let mut argv = vec!["equigraph".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let mut out = Vec::new();
    let code = run_command(&argv, &mut out);
    (code, String::from_utf8(out).expect("utf-8 output"))
}

fn show(args: &[&str], expect: i32) -> String {
    let (code, out) = run(args);
    println!("$ equigraph {}", args.join(" "));
    for line in out.lines() {
        println!("  {line}");
    }
    println!("  (exit {code})");
    assert_eq!(code, expect, "unexpected exit code for {args:?}");
    out
}

fn path_str(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let cp3 = path_str(dir.path(), "cp3.json");
    let cp3_data = path_str(dir.path(), "cp3-data.json");
    let trace = path_str(dir.path(), "cp3-trace.json");
    let dot = path_str(dir.path(), "cp3.dot");

    // Generate a model description file and look at it.
    show(&["gen", "cpn", "1", "2", "3", "--out", &cp3], 0);
    println!("--- {cp3}:");
    for line in fs::read_to_string(&cp3).expect("written file").lines().take(6) {
        println!("  {line}");
    }
    println!("  ...");

    // Verify runs the structural checks and the data screens.
    show(&["verify", &cp3], 0);

    // The same model as bare fixed point data, and its data-level reduction;
    // the trace lands in a JSON file whose input-hash ties it to the exact
    // input bytes.
    show(&["gen", "cpn", "1", "2", "3", "--level", "data", "--out", &cp3_data], 0);
    show(&["reduce", "--dim", "6", "--level", "data", &cp3_data, "--out", &trace], 0);
    let trace_text = fs::read_to_string(&trace).expect("trace file");
    let parsed: serde_json::Value = serde_json::from_str(&trace_text).expect("valid JSON");
    println!(
        "--- trace: {} steps, input-hash {}...",
        parsed["steps"].as_array().expect("steps").len(),
        &parsed["input-hash"].as_str().expect("hash")[..12]
    );

    // DOT export for rendering.
    show(&["dot", &cp3, "--out", &dot], 0);
    println!("--- {dot}:");
    for line in fs::read_to_string(&dot).expect("dot file").lines() {
        println!("  {line}");
    }

    // Seeded generate/reduce round-trips; one line per cycle.
    show(&["roundtrip", "--count", "4", "--seed", "5", "--jobs", "2"], 0);

    // Exit 2: the file parses but the data fail validation.  A single
    // fixed point cannot balance the localization sum.
    let bad = path_str(dir.path(), "unbalanced.json");
    fs::write(
        &bad,
        r#"{"k":1,"n":3,"points":[{"sign":1,"weights":[[1],[1],[1]]}]}"#,
    )
    .expect("write");
    show(&["verify", &bad], 2);

    // Exit 3: a graph that passes every validator but matches no contraction
    // pattern — valid input, irreducible.
    let square = path_str(dir.path(), "square.json");
    fs::write(
        &square,
        r#"{
  "k": 1, "n": 2,
  "vertices": [
    {"id": "a", "sign": 1}, {"id": "b", "sign": 1},
    {"id": "c", "sign": -1}, {"id": "d", "sign": -1}
  ],
  "edges": [
    {"u": "a", "v": "b", "label": [3]},
    {"u": "b", "v": "d", "label": [1]},
    {"u": "c", "v": "d", "label": [3]},
    {"u": "a", "v": "c", "label": [1]}
  ]
}"#,
    )
    .expect("write");
    show(&["verify", &square], 0);
    show(&["reduce", "--dim", "4", &square], 3);

    // Exit 4: unreadable input.
    let broken = path_str(dir.path(), "broken.json");
    fs::write(&broken, "{ not json").expect("write");
    show(&["verify", &broken], 4);
}

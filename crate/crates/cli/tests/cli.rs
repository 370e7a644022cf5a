use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_steklov"))
        .args(args)
        .env_remove("STEKLOV_VERTEX_BUDGET")
        .output()
        .unwrap()
}

fn report(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&output.stdout),
            String::from_utf8_lossy(&output.stderr)
        )
    })
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn half_line_window_has_sigma_one_fifth() {
    let graph = data("halfline5.json");
    let out = run(&["spectrum", "--graph", &graph, "--window", "0..4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema"], "steklov-report/1");
    let sigma = floats(&r["results"]["sigma"]);
    assert_eq!(sigma.len(), 1);
    assert!((sigma[0] - 0.2).abs() < 1e-12);
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(r["passed"], true);
}

#[test]
fn blowup_at_one_is_the_dirichlet_spectrum() {
    let graph = data("star.json");
    let out = run(&["spectrum", "--graph", &graph, "--blowup", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let sigma = floats(&r["results"]["sigma"]);
    assert!((sigma[0] - 1.0 / 3.0).abs() < 1e-12 && (sigma[1] - 1.0).abs() < 1e-12);
    let lambda = floats(&r["results"]["lambdaD"]);
    let rows = r["results"]["blowup"].as_array().unwrap();
    assert_eq!(rows.len(), lambda.len());
    for (row, l) in rows.iter().zip(&lambda) {
        assert!((row["lambda"].as_f64().unwrap() - l).abs() < 1e-12);
    }
}

#[test]
fn cheeger_on_the_star() {
    let graph = data("star.json");
    let out = run(&["cheeger", "--graph", &graph, "--method", "enum"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert!((r["results"]["h"]["value"].as_f64().unwrap() - 0.2).abs() < 1e-15);
    assert!((r["results"]["h_J"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(r["results"]["h_J"]["witness_labels"][0][2], "v");
    let out = run(&["cheeger", "--graph", &graph, "--order", "2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn malformed_graph_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"vertices\": [\n    {\"id\": 0,, }\n  ]\n}\n").unwrap();
    let out = run(&["spectrum", "--graph", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn missing_file_exits_with_two() {
    let out = run(&["spectrum", "--graph", "/nonexistent/graph.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_overrun_exits_with_three() {
    let out = run(&[
        "exhaust",
        "--family",
        r#"{"family":"regular_tree","degree":3}"#,
        "--quantity",
        "sigma",
        "--budget",
        "100",
        "--tol",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let r = report(&out);
    assert_eq!(r["results"]["table"]["status"], "budget-exceeded");
}

#[test]
fn verify_fixtures_pass() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("dump");
    let dump = dump.to_str().unwrap();
    let out = run(&["verify", "--count", "0", "--dump-dir", dump]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["verify", "--fixtures", "only", "--dump-dir", dump]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["passed"], true);
    let out = run(&["verify", "--seed", "7", "--count", "20", "--fixtures", "skip", "--dump-dir", dump]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn output_is_stable_apart_from_timing() {
    let graph = data("star.json");
    let args = ["spectrum", "--graph", &graph, "--schedule", "1:1024:4"];
    let strip = |o: Output| {
        let mut v = report(&o);
        v["wall_time_s"] = Value::Null;
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(strip(run(&args)), strip(run(&args)));
}

#[test]
fn finite_file_family_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("table.csv");
    let family = format!(r#"{{"family":"finite_file","path":"{}"}}"#, data("halfline5.json"));
    let out = run(&[
        "exhaust",
        "--family",
        &family,
        "--quantity",
        "sigma",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["inputs"].as_array().unwrap().len(), 1);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("radius,size"));
    assert_eq!(lines.count(), r["results"]["table"]["rows"].as_array().unwrap().len());
}

#[test]
fn recurrence_subcommand_matches_exhaust() {
    let family = r#"{"family":"half_line"}"#;
    let a = report(&run(&["recurrence", "--family", family, "--tol", "0.01", "--depth", "128"]));
    let b = report(&run(&[
        "exhaust",
        "--family",
        family,
        "--quantity",
        "recurrence",
        "--tol",
        "0.01",
        "--depth",
        "128",
    ]));
    assert_eq!(a["results"]["verdict"], "recurrent");
    assert_eq!(a["results"], b["results"]);
}

#[test]
fn unknown_role_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    std::fs::write(&path, r#"{"vertices":[{"id":0,"role":"inside"}],"edges":[]}"#).unwrap();
    let out = run(&["spectrum", "--graph", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

use std::path::Path;
use std::process::{Command, Output};

use nsd_workbench::bench::{read_csv, CSV_HEADER};

fn nsd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_path_on_three_vertices() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "p3.txt", "0 1\n1 2\n");
    let out = nsd(&["solve", &g, "--mode", "edge"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("chi=2 "));
}

#[test]
fn solve_output_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "c5.g6", "Dhc\n");
    let out = nsd(&["solve", &g, "--mode", "total"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let colouring: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
    let c = write(dir.path(), "c5.col", &colouring);
    let v = nsd(&["verify", &g, &c]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
    assert!(stdout(&v).contains("pass"));
}

#[test]
fn verify_rejects_a_bad_colouring() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "p3.txt", "0 1\n1 2\n");
    let c = write(
        dir.path(),
        "bad.col",
        "nsd edge n=3 m=2 maxcolour=1\ne 0 1 1\ne 1 2 1\n",
    );
    let v = nsd(&["verify", &g, &c]);
    assert_eq!(v.status.code(), Some(1));
}

#[test]
fn pipeline_refuses_isolated_edges_and_small_degree() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "two.txt", "0 1\n2 3\n3 4\n");
    assert_eq!(
        nsd(&["run-pipeline", &g, "--mode", "edge"]).status.code(),
        Some(2)
    );
    assert_eq!(
        nsd(&["run-pipeline", &g, "--mode", "total"]).status.code(),
        Some(2)
    );
    let fell_back = nsd(&["run-pipeline", &g, "--mode", "total", "--fallback"]);
    assert_eq!(fell_back.status.code(), Some(0));
}

#[test]
fn pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let gen = nsd(&[
        "generate",
        "random-regular",
        "--n",
        "300",
        "--d",
        "64",
        "--seed",
        "4",
    ]);
    assert_eq!(gen.status.code(), Some(0));
    let g = write(dir.path(), "rr.g6", &stdout(&gen));
    let trace = dir.path().join("trace.txt");
    let out = nsd(&[
        "run-pipeline",
        &g,
        "--mode",
        "total",
        "--seed",
        "9",
        "--profile",
        "desk",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let c = write(dir.path(), "rr.col", &stdout(&out));
    assert_eq!(nsd(&["verify", &g, &c]).status.code(), Some(0));
    let trace = std::fs::read_to_string(trace).unwrap();
    assert!(trace.contains("run.profile=desk"));
    assert!(trace.contains("run.mode=total"));
}

#[test]
fn paper_profile_is_reported_inapplicable_or_failed() {
    let dir = tempfile::tempdir().unwrap();
    let gen = nsd(&[
        "generate",
        "random-regular",
        "--n",
        "200",
        "--d",
        "64",
        "--seed",
        "1",
    ]);
    let g = write(dir.path(), "rr.g6", &stdout(&gen));
    let code = nsd(&["run-pipeline", &g, "--profile", "paper"])
        .status
        .code();
    assert_eq!(code, Some(3));
}

#[test]
fn profile_files_and_min_delta() {
    let dir = tempfile::tempdir().unwrap();
    let gen = nsd(&[
        "generate",
        "random-regular",
        "--n",
        "200",
        "--d",
        "48",
        "--seed",
        "2",
    ]);
    let g = write(dir.path(), "rr.g6", &stdout(&gen));
    assert_eq!(nsd(&["run-pipeline", &g]).status.code(), Some(2));
    assert_eq!(
        nsd(&["run-pipeline", &g, "--min-delta", "32"])
            .status
            .code(),
        Some(0)
    );
    let p = write(dir.path(), "mine.profile", "base=desk\nmin_delta=16\n");
    assert_eq!(
        nsd(&["run-pipeline", &g, "--profile", &p]).status.code(),
        Some(0)
    );
    let bad = write(dir.path(), "bad.profile", "frobnicate=1\n");
    assert_eq!(
        nsd(&["run-pipeline", &g, "--profile", &bad]).status.code(),
        Some(4)
    );
}

#[test]
fn usage_errors() {
    assert_eq!(nsd(&[]).status.code(), Some(4));
    assert_eq!(nsd(&["colour-everything"]).status.code(), Some(4));
    assert_eq!(
        nsd(&["solve", "/nonexistent/graph.g6"]).status.code(),
        Some(4)
    );
    assert_eq!(
        nsd(&["generate", "cycle", "--n", "2"]).status.code(),
        Some(4)
    );
    assert_eq!(nsd(&["--help"]).status.code(), Some(0));
}

#[test]
fn generate_is_reproducible() {
    let a = stdout(&nsd(&[
        "generate", "gnp", "--n", "20", "--p", "0.3", "--seed", "7",
    ]));
    let b = stdout(&nsd(&[
        "generate", "gnp", "--n", "20", "--p", "0.3", "--seed", "7",
    ]));
    assert_eq!(a, b);
    let c5 = stdout(&nsd(&["generate", "cycle", "--n", "5"]));
    assert_eq!(c5.trim(), "Dhc");
    let edges = stdout(&nsd(&[
        "generate", "complete", "--n", "3", "--format", "edges",
    ]));
    assert!(edges.starts_with("n=3"));
}

#[test]
fn bench_writes_table_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "k4.g6", "C~\n");
    let spec = write(
        dir.path(),
        "spec.toml",
        r#"
[[instance]]
id = "k3"
family = "complete"
n = 3
methods = ["exact"]

[[instance]]
id = "c5"
family = "cycle"
n = 5
modes = ["edge", "total"]
methods = ["exact", "greedy-fallback"]

[[instance]]
id = "k4"
file = "k4.g6"
methods = ["exact", "pipeline"]
"#,
    );
    let csv = dir.path().join("out.csv");
    let out = nsd(&[
        "bench",
        &spec,
        "--csv",
        csv.to_str().unwrap(),
        "--jobs",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let table = stdout(&out);
    assert_eq!(table.lines().count(), 1 + 1 + 4 + 2);
    assert!(table.contains("exceeds Δ+2"));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("k4 edge pipeline"));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    let rows = read_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[0].colours, Some(3));
    assert!(rows
        .iter()
        .filter(|r| r.verified)
        .all(|r| r.colours.is_some()));
}

#[test]
fn empty_bench_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "empty.toml", "");
    let out = nsd(&["bench", &spec]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 1);
}

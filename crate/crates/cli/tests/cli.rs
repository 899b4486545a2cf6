use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use gsql_cli::bench::{bench_khop, bench_pagerank, bench_wcc, TOPK_TOYS};
use gsql_cli::{cmd_run, repl, CliError, Output, Session};
use gsql_core::fixtures::G1_EDGES;
use tempfile::TempDir;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn tsv(edges: &[(i64, i64)]) -> String {
    edges.iter().map(|(a, b)| format!("{a}\t{b}\n")).collect()
}

/// A session holding graph `G` loaded from `edges`.
fn bench_session(edges: &[(i64, i64)]) -> (Session, TempDir) {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "edges.tsv", &tsv(edges));
    let mut s = Session::default();
    s.ensure_bench_schema("G").unwrap();
    s.load_edges("G", &path, "Node", "Link").unwrap();
    (s, dir)
}

fn exec(s: &mut Session, line: &str, json: bool) -> Result<String, CliError> {
    let mut buf = Vec::new();
    let words: Vec<String> = line.split_whitespace().map(String::from).collect();
    cmd_run(s, &words, &mut Output { out: &mut buf, json })?;
    Ok(String::from_utf8(buf).unwrap())
}

#[test]
fn khop_counts_on_g1() {
    let (mut s, _d) = bench_session(&G1_EDGES);
    let seeds = vec!["1".to_string()];
    let counts: Vec<i64> = (1..=3).map(|k| bench_khop(&mut s, "G", &seeds, k).unwrap()[0].count).collect();
    assert_eq!(counts, [1, 3, 3]);
    assert_eq!(bench_khop(&mut s, "G", &seeds, 0).unwrap()[0].count, 1);
    let err = bench_khop(&mut s, "G", &["99".to_string()], 1).unwrap_err();
    assert!(err.to_string().contains("unknown seed"), "{err}");
}

#[test]
fn wcc_components() {
    let (mut s, _d) = bench_session(&[(1, 2), (2, 3), (3, 1), (4, 5), (5, 6), (6, 4)]);
    let r = bench_wcc(&mut s, "G").unwrap();
    assert_eq!(r.components, 2);
    let labels: Vec<i64> = r.labels.iter().map(|(_, c)| c.as_i64().unwrap()).collect();
    assert_eq!(labels, [1, 1, 1, 4, 4, 4]);

    let (mut s, _d) = bench_session(&G1_EDGES);
    let r = bench_wcc(&mut s, "G").unwrap();
    assert_eq!((r.components, r.labels.len()), (1, 12));

    let (mut s, _d) = bench_session(&[]);
    assert_eq!(bench_wcc(&mut s, "G").unwrap().components, 0);
}

#[test]
fn pagerank_examples() {
    let (mut s, _d) = bench_session(&[(1, 2)]);
    let r = bench_pagerank(&mut s, "G", 1e-9, 20, 0.85).unwrap();
    assert!((r.scores[0].1 - 0.15).abs() < 1e-12);
    assert!((r.scores[1].1 - 0.2775).abs() < 1e-12);
    // Scores are fixed after two rounds; the third observes no change.
    assert_eq!(r.iterations, 3);

    let r = bench_pagerank(&mut s, "G", 1e-9, 0, 0.85).unwrap();
    assert_eq!(r.iterations, 0);
    assert!(r.scores.iter().all(|(_, x)| *x == 1.0));

    let (mut s, _d) = bench_session(&[(1, 2), (2, 3), (3, 1)]);
    let r = bench_pagerank(&mut s, "G", 0.001, 10, 0.85).unwrap();
    assert_eq!(r.iterations, 1);
    assert!(r.scores.iter().all(|(_, x)| (*x - 1.0).abs() < 1e-12));
}

#[test]
fn bench_reports_identical_across_thread_counts() {
    let edges: Vec<(i64, i64)> = (0..300).map(|i| ((i * 7) % 61, (i * 13 + 5) % 61)).collect();
    let (mut s, _d) = bench_session(&edges);
    let mut runs = Vec::new();
    for threads in [1, 8] {
        s.threads = threads;
        let seeds: Vec<String> = ["0", "5", "12"].map(String::from).to_vec();
        let khop: Vec<i64> = bench_khop(&mut s, "G", &seeds, 2).unwrap().iter().map(|r| r.count).collect();
        let wcc = bench_wcc(&mut s, "G").unwrap().labels;
        let pr = bench_pagerank(&mut s, "G", 1e-6, 15, 0.85).unwrap();
        runs.push((khop, wcc, pr.scores, pr.iterations));
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn session_commands_and_rendering() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let ddl = write(d, "s.ddl", gsql_core::fixtures::SCHEMA);
    let edges = write(d, "e.tsv", &tsv(&G1_EDGES));
    let q = write(d, "q.gsql", "CREATE QUERY Out (vertex<V> s) FOR GRAPH G { SELECT t INTO Next FROM V:s -(E>)- V:t; }");
    let mut s = Session::default();
    assert!(exec(&mut s, &format!("ddl {}", ddl.display()), false).unwrap().starts_with("catalog: 1 vertex types"));
    exec(&mut s, &format!("load-edges G {} V E", edges.display()), false).unwrap();
    assert_eq!(exec(&mut s, &format!("install {}", q.display()), false).unwrap(), "installed Out\n");
    assert_eq!(exec(&mut s, "call Out 2", false).unwrap(), "Next (3 rows)\nt\n-\n3\n6\n9\n");
    assert_eq!(exec(&mut s, "call Out 2", true).unwrap(), "{\"tables\":{\"Next\":[{\"t\":3},{\"t\":6},{\"t\":9}]}}\n");

    let arity = exec(&mut s, "call Out", false).unwrap_err();
    assert_eq!(arity.exit_code(), 1);
    assert!(exec(&mut s, "call Out 99", false).is_err());
    assert!(exec(&mut s, "call Nope", false).is_err());
    assert!(exec(&mut s, "frobnicate", false).is_err());
}

#[test]
fn installed_queries_stay_valid() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let good = write(d, "good.csv", "k,x\n1,10\n2,20\n");
    let bad = write(d, "bad.csv", "k,y\n1,10\n");
    let q = write(d, "q.gsql", "CREATE QUERY Sum () { SumAccum<int> @@s; SELECT r.x INTO T FROM R AS r ACCUM @@s += r.x; RETURN @@s; }");
    let mut s = Session::default();
    exec(&mut s, &format!("load-table {} R", good.display()), false).unwrap();
    exec(&mut s, &format!("install {}", q.display()), false).unwrap();
    // Replacing R with a table lacking `x` would break `Sum`; it is refused.
    assert!(exec(&mut s, &format!("load-table {} R", bad.display()), false).is_err());
    assert_eq!(s.tables()["R"].columns, ["k", "x"]);
    assert!(exec(&mut s, "call Sum", false).unwrap().ends_with("RETURN 30\n"));
}

#[test]
fn unknown_vertex_argument_is_rejected() {
    let mut s = Session::default();
    s.apply_ddl(include_str!("../../core/tests/corpus/schema.ddl")).unwrap();
    s.install(TOPK_TOYS).unwrap();
    let err = s.call("TopKToys", &["missing".into(), "3".into()]).unwrap_err();
    assert!(err.to_string().contains("missing"), "{err}");
}

#[test]
fn binary_chains_commands_and_reports_exit_codes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let edges = write(d, "e.tsv", &tsv(&[(1, 2), (2, 3), (3, 1)]));
    let bin = env!("CARGO_BIN_EXE_gsql");
    let out = Command::new(bin)
        .args(["--threads", "2", "bench", "pagerank", "--graph", "G", "--edges"])
        .arg(&edges)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("node\tscore\n1\t1\n2\t1\n3\t1\n# iterations=1"), "{text}");

    let missing = Command::new(bin).args(["ddl", "missing.gsql"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("missing.gsql"));

    let ddl = write(d, "s.ddl", gsql_core::fixtures::SCHEMA);
    let chained = Command::new(bin).arg("ddl").arg(&ddl).args([";", "load-table", "nope.csv", "T"]).output().unwrap();
    assert_eq!(chained.status.code(), Some(1));

    let mut child = Command::new(bin).arg("repl").stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    let script = format!("# comment\nddl {}\nbogus\nload-edges G {} V E\nquit\n", ddl.display(), edges.display());
    child.stdin.take().unwrap().write_all(script.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("G: 3 edges"));
}

#[test]
fn repl_continues_after_errors() {
    let mut s = Session::default();
    let mut buf = Vec::new();
    let mut err = Vec::new();
    let code = repl(&mut s, "ddl /no/such\n\nquit\nddl /never\n".as_bytes(), &mut Output { out: &mut buf, json: false }, &mut err);
    assert_eq!(code, 1);
    assert_eq!(String::from_utf8(err).unwrap().lines().count(), 1);
    assert_eq!(s.graph().vertex_count(), 0);
}

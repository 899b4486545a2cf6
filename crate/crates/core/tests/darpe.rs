use std::collections::BTreeMap;

use gsql_core::darpe::matcher::{bfs_counts, dump_layers};
use gsql_core::darpe::{compile_darpe, enumerate_legal_paths, match_darpe, match_path, Legality, PathSpec, VTest};
use gsql_core::fixtures::{self, g1, g2, v};
use gsql_core::frontend::ast::{Adorn, Atom, Bounds, Darpe, StmtKind};
use gsql_core::frontend::printer::print_darpe;
use gsql_core::frontend::{parse_darpe, parse_query};
use gsql_core::{Graph, Value, VertexId};
use proptest::prelude::*;

fn auto(g: &Graph, text: &str) -> gsql_core::darpe::DarpeAutomaton {
    compile_darpe(&parse_darpe(text).unwrap(), g.catalog(), None).unwrap()
}

fn count(g: &Graph, text: &str, s: i64, t: i64, legality: Legality) -> usize {
    enumerate_legal_paths(g, &parse_darpe(text).unwrap(), None, v(s), v(t), legality).unwrap().len()
}

fn spec(g: &Graph, pattern: &str) -> PathSpec {
    let q = parse_query(&format!("SELECT x FROM G AS {pattern}")).unwrap();
    let StmtKind::Block(b) = &q.body[0].kind else { panic!("block expected") };
    let Atom::Graph { pattern, .. } = &b.from[0] else { panic!("graph atom expected") };
    PathSpec::compile(&pattern[0], g.catalog(), None, |_| VTest::Any).unwrap()
}

#[test]
fn g1_path_semantics() {
    let g = g1();
    let m = match_darpe(&g, &auto(&g, "E>*"), &[v(1)], &VTest::set([v(5)]));
    assert_eq!(m.len(), 1);
    assert_eq!((m[0].multiplicity, m[0].length), (2, 4));
    assert_eq!(count(&g, "E>*", 1, 5, Legality::AllShortest), 2);
    assert_eq!(count(&g, "E>*", 1, 5, Legality::NoRepeatVertex), 3);
    assert_eq!(count(&g, "E>*", 1, 5, Legality::NoRepeatEdge), 4);
}

#[test]
fn g2_path_semantics() {
    let g = g2();
    let d = "E>*.F>.E>*";
    let m = match_darpe(&g, &auto(&g, d), &[v(1)], &VTest::set([v(4)]));
    assert_eq!(m.len(), 1);
    assert_eq!((m[0].multiplicity, m[0].length), (1, 7));
    assert_eq!(count(&g, d, 1, 4, Legality::AllShortest), 1);
    assert_eq!(count(&g, d, 1, 4, Legality::NoRepeatVertex), 0);
    assert_eq!(count(&g, d, 1, 4, Legality::NoRepeatEdge), 0);
}

#[test]
fn kleene_star_matches_the_empty_path() {
    let g = g1();
    let m = match_darpe(&g, &auto(&g, "E>*"), &[v(1)], &VTest::set([v(1)]));
    assert_eq!((m[0].multiplicity, m[0].length), (1, 0));
}

#[test]
fn undirected_edge_binds_both_orientations() {
    let g = fixtures::graph(2, [(1, "U", 2)]);
    let t = match_path(&g, &spec(&g, ":p -(U:c)- :q"));
    assert_eq!(t.vars, ["p", "c", "q"]);
    assert_eq!(t.len(), 2);
    assert_eq!(t.total(), 2);
}

#[test]
fn directed_self_loop_is_two_hops() {
    let g = fixtures::graph(1, [(1, "E", 1)]);
    let m = match_darpe(&g, &auto(&g, "_"), &[v(1)], &VTest::Any);
    assert_eq!((m[0].multiplicity, m[0].length), (2, 1));
    assert_eq!(count(&g, "_", 1, 1, Legality::AllShortest), 2);
    let g = fixtures::graph(1, [(1, "U", 1)]);
    let m = match_darpe(&g, &auto(&g, "_"), &[v(1)], &VTest::Any);
    assert_eq!((m[0].multiplicity, m[0].length), (1, 1));
}

#[test]
fn unconstrained_source_includes_g1_pair() {
    let g = g1();
    let t = match_path(&g, &spec(&g, ":s -(E>*)- :t"));
    let row = t.rows().find(|(r, _)| r == &[Value::Vertex(v(1)), Value::Vertex(v(5))]).expect("(1,5) bound");
    assert_eq!(row.1, 2);
}

#[test]
fn layer_dump_lists_frontiers() {
    let g = g1();
    let dump = dump_layers(&g, &auto(&g, "E>*"), v(1));
    assert!(dump.starts_with("layer 0: (1, q0) x1"), "{dump}");
    assert!(dump.contains("layer 4:"), "{dump}");
}

#[test]
fn matching_is_independent_of_thread_count() {
    let g = g1();
    let a = auto(&g, "(E>|<E)*");
    let all: Vec<VertexId> = g.vertex_ids().collect();
    let run = |n| {
        rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(|| match_darpe(&g, &a, &all, &VTest::Any))
    };
    assert_eq!(run(1), run(8));
}

// ---- randomized agreement with the enumeration oracle ----

fn leaf() -> impl Strategy<Value = Darpe> {
    let sym = |n: &str, adorn| Darpe::Sym { name: n.into(), adorn };
    prop_oneof![
        Just(sym("E", Adorn::Forward)),
        Just(sym("E", Adorn::Backward)),
        Just(sym("U", Adorn::Undirected)),
        Just(Darpe::Wild { adorn: None }),
        Just(Darpe::Wild { adorn: Some(Adorn::Forward) }),
    ]
}

fn bounds() -> impl Strategy<Value = Option<Bounds>> {
    prop_oneof![
        Just(None),
        (0u32..=3).prop_map(|n| Some(Bounds::Exact(n))),
        (0u32..=3, 0u32..=3).prop_map(|(a, b)| Some(Bounds::Range(Some(a.min(b)), Some(a.max(b))))),
        (0u32..=3).prop_map(|n| Some(Bounds::Range(None, Some(n)))),
        (0u32..=3).prop_map(|n| Some(Bounds::Range(Some(n), None))),
    ]
}

/// ASTs of depth at most three.
fn darpe() -> impl Strategy<Value = Darpe> {
    leaf().prop_recursive(2, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Darpe::Concat),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Darpe::Alt),
            (inner, bounds()).prop_map(|(i, bounds)| Darpe::Star { inner: Box::new(i), bounds }),
        ]
    })
}

/// Graphs on `1..=n` with directed `E` and undirected `U` edges.
fn graph(max_v: i64, max_e: usize) -> impl Strategy<Value = Graph> {
    (1..=max_v).prop_flat_map(move |n| {
        prop::collection::vec((1..=n, any::<bool>(), 1..=n), 0..=max_e)
            .prop_map(move |es| fixtures::graph(n, es.into_iter().map(|(a, d, b)| (a, if d { "E" } else { "U" }, b))))
    })
}

type PairTable = BTreeMap<(VertexId, VertexId), (u32, u64)>;

fn matcher_table(g: &Graph, d: &Darpe) -> PairTable {
    let a = compile_darpe(d, g.catalog(), None).unwrap();
    let all: Vec<VertexId> = g.vertex_ids().collect();
    match_darpe(g, &a, &all, &VTest::Any).into_iter().map(|m| ((m.source, m.target), (m.length, m.multiplicity))).collect()
}

fn oracle_table(g: &Graph, d: &Darpe) -> PairTable {
    let mut out = BTreeMap::new();
    for s in g.vertex_ids() {
        for t in g.vertex_ids() {
            let paths = enumerate_legal_paths(g, d, None, s, t, Legality::AllShortest).unwrap();
            if let Some(p) = paths.first() {
                assert!(paths.iter().all(|q| q.len() == p.len()));
                out.insert((s, t), (p.len() as u32, paths.len() as u64));
            }
        }
    }
    out
}

/// The oracle materializes every path, so instances with more than this
/// many matches (by the matcher's count) are discarded.
const ORACLE_BUDGET: u64 = 50_000;

fn tractable(t: &PairTable) -> bool {
    t.values().map(|&(_, m)| m).fold(0u64, u64::saturating_add) <= ORACLE_BUDGET
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matcher_agrees_with_enumeration(g in graph(10, 16), d in darpe()) {
        let got = matcher_table(&g, &d);
        prop_assume!(tractable(&got));
        prop_assert_eq!(got, oracle_table(&g, &d), "{}", print_darpe(&d));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Shortest lengths equal the minimum over all walks up to the product bound.
    #[test]
    fn lengths_are_true_minima(g in graph(3, 3), d in darpe()) {
        let a = compile_darpe(&d, g.catalog(), None).unwrap();
        let cap = (g.vertex_count() * a.num_states().max(1)) as u32;
        for s in g.vertex_ids() {
            let got: BTreeMap<VertexId, u32> = bfs_counts(&g, &a, s).into_iter().map(|h| (h.target, h.len)).collect();
            for t in g.vertex_ids() {
                let walks = enumerate_legal_paths(&g, &d, None, s, t, Legality::Unrestricted(cap)).unwrap();
                let min = walks.iter().map(|p| p.len() as u32).min();
                prop_assert_eq!(got.get(&t).copied(), min, "{} {:?}->{:?}", print_darpe(&d), s, t);
            }
        }
    }

    /// Matches of `A|B` count each shortest path once even when its word is in both languages.
    #[test]
    fn alternation_counts_paths_once(g in graph(6, 8), a in darpe(), b in darpe()) {
        let both = Darpe::Alt(vec![a.clone(), b.clone()]);
        let got = matcher_table(&g, &both);
        prop_assume!(tractable(&got));
        prop_assert_eq!(got, oracle_table(&g, &both));
    }

    /// Two-hop patterns count segmentations of minimal concatenated length.
    #[test]
    fn segmentations_agree_with_enumeration(g in graph(6, 9), d1 in darpe(), d2 in darpe()) {
        let pattern = format!(":s -({})- :m -({})- :t", print_darpe(&d1), print_darpe(&d2));
        let got: BTreeMap<Vec<Value>, u64> =
            match_path(&g, &spec(&g, &pattern)).rows().map(|(r, m)| (r.to_vec(), m)).collect();
        let whole = Darpe::Concat(vec![d1.clone(), d2.clone()]);
        prop_assume!([&d1, &d2, &whole].iter().all(|d| tractable(&matcher_table(&g, d))));
        let (p1, p2, pw) = (oracle_table(&g, &d1), oracle_table(&g, &d2), oracle_table(&g, &whole));
        let mut want = BTreeMap::new();
        for (&(s, m), &(l1, c1)) in &p1 {
            for (&(m2, t), &(l2, c2)) in &p2 {
                if m2 == m && pw.get(&(s, t)).map(|w| w.0) == Some(l1 + l2) {
                    want.insert(vec![Value::Vertex(s), Value::Vertex(m), Value::Vertex(t)], c1 * c2);
                }
            }
        }
        prop_assert_eq!(got, want, "{}", pattern);
    }
}

use std::collections::HashMap;
use std::path::PathBuf;

use gsql_core::frontend::ast::{Atom, Darpe, StmtKind};
use gsql_core::frontend::checker::{check_query, CheckEnv, CheckError};
use gsql_core::frontend::printer::{print_darpe, print_query};
use gsql_core::frontend::{parse_expr, parse_query};
use gsql_core::{Catalog, Type};

fn corpus(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn catalog() -> Catalog {
    Catalog::from_ddl(&corpus("schema.ddl")).expect("schema loads")
}

fn env(cat: &Catalog) -> CheckEnv<'_> {
    let mut env = CheckEnv::new(cat);
    let employee = ["email", "name", "company"].iter().map(|c| (c.to_string(), Type::Str));
    let employee = employee.chain([("salary".to_string(), Type::Int)]).collect();
    env.tables = HashMap::from([("Employee".to_string(), employee)]);
    env
}

const CORPUS: [&str; 6] = [
    "seamless.gsql",
    "cross_graph.gsql",
    "multi_agg.gsql",
    "multi_output.gsql",
    "recommender.gsql",
    "pagerank.gsql",
];

#[test]
fn corpus_parses_checks_and_round_trips() {
    let cat = catalog();
    let env = env(&cat);
    for name in CORPUS {
        let text = corpus(name);
        let mut q = parse_query(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let printed = print_query(&q);
        let reparsed = parse_query(&printed).unwrap_or_else(|e| panic!("{name} reprint: {e}\n{printed}"));
        assert_eq!(q, reparsed, "{name} round trip:\n{printed}");
        assert_eq!(print_query(&reparsed), printed, "{name} printing is a fixpoint");
        check_query(&mut q, &env).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn pagerank_prime_read_is_float() {
    let cat = catalog();
    let mut q = parse_query(&corpus("pagerank.gsql")).unwrap();
    check_query(&mut q, &env(&cat)).unwrap();
    let json = serde_json::to_string(&q).unwrap();
    // The primed read is annotated with the accumulator's read type.
    let at = json.find(r#""name":"score","primed":true"#).expect("primed read present");
    let ty = json[at..].find(r#""ty":"#).map(|i| &json[at + i..at + i + 12]).unwrap();
    assert_eq!(ty, r#""ty":"Float""#);
}

#[test]
fn darpe_structure_and_precedence() {
    let q = parse_query("SELECT s FROM G AS :s -(E>.(F>|<G)*.<H.J)- :t").unwrap();
    let StmtKind::Block(b) = &q.body[0].kind else { panic!("block expected") };
    let Atom::Graph { pattern, .. } = &b.from[0] else { panic!("graph atom expected") };
    let darpe = pattern[0].hops[0].0.darpe.clone();
    assert_eq!(print_darpe(&darpe), "E>.(F>|<G)*.<H.J");
    match darpe {
        Darpe::Concat(xs) => {
            assert_eq!(xs.len(), 4);
            assert!(matches!(&xs[1], Darpe::Star { inner, bounds: None } if matches!(**inner, Darpe::Alt(ref a) if a.len() == 2)));
        }
        other => panic!("expected concat, got {other:?}"),
    }
}

fn check(text: &str) -> Result<(), CheckError> {
    let cat = catalog();
    let mut q = parse_query(text).expect("parses");
    check_query(&mut q, &env(&cat))
}

#[test]
fn rejects_edge_variable_on_kleene_hop() {
    let err = check("SELECT q FROM Web AS Page:p -(LinkTo>*: e)- Page:q").unwrap_err();
    assert!(matches!(err, CheckError::EdgeVarOnMultiHop { ref var, .. } if var == "e"), "{err}");
}

#[test]
fn accepts_edge_variable_on_disjunctive_single_hop() {
    check("SELECT c FROM SalesGraph AS Customer:c -(Bought>|Likes>: e)- Product:p").unwrap();
}

#[test]
fn rejects_unknown_accumulator() {
    let err = check("SELECT p FROM Web AS Page:p -(LinkTo>)- Page:q ACCUM q.@foo += 1").unwrap_err();
    assert!(matches!(err, CheckError::Unknown { ref name, .. } if name == "@foo"), "{err}");
}

#[test]
fn rejects_unsupported_accumulators() {
    for decl in ["ArrayAccum<SumAccum<int>> @@a[3];", "BitwiseOrAccum @@a;", "GroupByAccum<int k, SumAccum<int> s> @@a;"] {
        let text = format!("CREATE QUERY Q() {{ {decl} }}");
        let err = check(&text).unwrap_err();
        assert!(matches!(err, CheckError::UnsupportedAccumulator { .. }), "{decl}: {err}");
    }
}

#[test]
fn rejects_prime_outside_loop() {
    let text = "CREATE QUERY Q() { SumAccum<int> @@a; SELECT p FROM Web AS Page:p ACCUM @@a += @@a'; }";
    assert!(matches!(check(text).unwrap_err(), CheckError::PrimeOutsideLoop { .. }));
}

#[test]
fn rejects_adornment_contradicting_directedness() {
    assert!(check("SELECT p FROM LinkedIn AS Person:p -(Connected>)- Person:q").is_err());
    assert!(check("SELECT p FROM Web AS Page:p -(LinkTo)- Page:q").is_err());
}

#[test]
fn rejects_type_outside_named_graph() {
    let err = check("SELECT p FROM LinkedIn AS Page:p").unwrap_err();
    assert!(matches!(err, CheckError::Unknown { what: "vertex type or vertex set", .. }), "{err}");
}

#[test]
fn post_accum_sees_only_selected_variables() {
    let text = "CREATE QUERY Q() { SumAccum<int> @a; \
                SELECT p FROM Web AS Page:p -(LinkTo>)- Page:q POST_ACCUM q.@a += 1; }";
    let err = check(text).unwrap_err();
    assert!(matches!(err, CheckError::Invalid { .. }), "{err}");
}

#[test]
fn type_mismatch_on_accumulator_input() {
    let text = "CREATE QUERY Q() { SumAccum<int> @@a; @@a += 'x'; }";
    assert!(matches!(check(text).unwrap_err(), CheckError::TypeMismatch { .. }));
}

#[test]
fn error_messages_carry_line_and_column() {
    let err = check("SELECT p\nFROM Web AS Page:p\nWHERE p.nope = 1").unwrap_err();
    assert!(err.to_string().starts_with("3:"), "{err}");
}

#[test]
fn expression_precedence_round_trips() {
    for src in ["1 + 2 * 3", "(1 + 2) * 3", "NOT a AND b OR c", "a - (b - c)", "-(-x)", "x BETWEEN 1 AND 2 AND y"] {
        let e = parse_expr(src).unwrap();
        let printed = gsql_core::frontend::printer::print_expr(&e);
        let again = parse_expr(&printed).unwrap();
        assert_eq!(printed, gsql_core::frontend::printer::print_expr(&again), "{src}");
    }
}

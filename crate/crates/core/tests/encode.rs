mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use common::{check_counter, check_encode_case, check_registers, encode_case};
use dlfit::database::Name;
use dlfit::encode::{encode, EncodeGraph, EncodeOptions};
use dlfit::reduce::{booleanize_features, threshold_name};
use dlfit::solve::{solve, Budget, SolveStatus};
use dlfit::value::Value;
use dlfit::{node_count, parse_facts, Concept, Database};

fn opts(k: usize, g: u32, qualified: bool) -> EncodeOptions {
    EncodeOptions {
        k,
        g,
        qualified,
        fitting: true,
    }
}

fn run(db: &Database, pos: &[&str], neg: &[&str], o: EncodeOptions) -> Option<Concept> {
    let ids = |xs: &[&str]| xs.iter().map(|x| db.ind(x).unwrap()).collect::<Vec<_>>();
    let enc = encode(Arc::new(EncodeGraph::from_database(db)), &ids(pos), &ids(neg), o).unwrap();
    let res = solve(&enc.cnf, &Budget::unlimited()).unwrap();
    match res.status {
        SolveStatus::Sat => Some(enc.decode(res.model.as_ref().unwrap()).unwrap()),
        _ => None,
    }
}

#[test]
fn single_positive() {
    let db = parse_facts("A(a)").unwrap();
    let c = run(&db, &["a"], &[], opts(1, 1, true)).unwrap();
    assert!(c == Concept::top() || c == Concept::name("A"), "{c}");
}

#[test]
fn name_separates() {
    let db = parse_facts("A(a)\nB(b)").unwrap();
    assert_eq!(run(&db, &["a"], &["b"], opts(1, 1, true)).unwrap(), Concept::name("A"));
}

#[test]
fn heights_booleanized() {
    let db = parse_facts(
        "child(a,a1)\nchild(a,a2)\nchild(b,b1)\nchild(b,b2)\nheight(a1,121)\nheight(a2,145)\nheight(b1,152)\nheight(b2,163)",
    )
    .unwrap();
    let mut t = BTreeMap::new();
    t.insert(Name::from("height"), vec![Value::from_int(140)]);
    let (j, _) = booleanize_features(&db, &t).unwrap();
    assert!(run(&j, &["a"], &["b"], opts(1, 1, true)).is_none());
    let c = run(&j, &["a"], &["b"], opts(2, 1, true)).unwrap();
    assert_eq!(node_count(&c), 2);
    let expected = Concept::at_most(
        1,
        dlfit::Role::new("child"),
        Concept::name(&threshold_name("height", Value::from_int(140))),
    );
    let ext = dlfit::eval_concept(&c, &j);
    assert!(ext.contains(j.ind("a").unwrap() as usize) && !ext.contains(j.ind("b").unwrap() as usize));
    assert_eq!(dlfit::eval_concept(&expected, &j).contains(j.ind("a").unwrap() as usize), true);
}

#[test]
fn encoder_matches_enumeration() {
    let mut sat = 0;
    for seed in 0..200 {
        let case = encode_case(seed);
        match check_encode_case(&case) {
            Ok(s) => sat += usize::from(s),
            Err(e) => panic!("seed {seed}: {e}"),
        }
    }
    // Both verdicts occur.
    assert!(sat > 20 && sat < 190, "{sat} satisfiable");
}

#[test]
fn counters_are_exact() {
    for n in 0..=6 {
        for bound in 0..=n + 1 {
            check_counter(n, bound, true).unwrap();
            check_counter(n, bound, false).unwrap();
        }
        for cap in 1..=n {
            check_registers(n, cap).unwrap();
        }
    }
}

#[test]
fn deterministic_output() {
    let case = encode_case(7);
    let make = || {
        encode(
            Arc::new(EncodeGraph::from_database(&case.db)),
            &case.positives,
            &case.negatives,
            opts(4, 2, true),
        )
        .unwrap()
        .cnf
        .to_dimacs()
    };
    assert_eq!(make(), make());
}

#[test]
fn clause_count_ceiling() {
    for seed in 0..40 {
        let case = encode_case(seed);
        let enc = encode(
            Arc::new(EncodeGraph::from_database(&case.db)),
            &case.positives,
            &case.negatives,
            opts(case.k, case.g, true),
        )
        .unwrap();
        let sigma = case.db.concept_names().count() + case.db.role_names().count();
        let bound = 64 * case.k.pow(2) * case.db.len() * sigma.max(1) * (case.g as usize).pow(2);
        assert!(enc.cnf.num_clauses() <= bound, "seed {seed}: {} > {bound}", enc.cnf.num_clauses());
    }
}

#[test]
fn dimacs_header_matches() {
    let case = encode_case(3);
    let enc = encode(
        Arc::new(EncodeGraph::from_database(&case.db)),
        &case.positives,
        &case.negatives,
        opts(3, 2, true),
    )
    .unwrap();
    let text = enc.cnf.to_dimacs();
    let header = text.lines().find(|l| l.starts_with("p cnf")).unwrap();
    assert_eq!(header, format!("p cnf {} {}", enc.cnf.num_vars(), enc.cnf.num_clauses()));
    let sidecar = enc.sidecar();
    assert!(sidecar.to_string().contains("\"family\""));
}

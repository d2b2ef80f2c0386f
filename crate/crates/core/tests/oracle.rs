//! The SAT pipeline against independent exhaustive enumeration.

mod support;

use std::collections::BTreeSet;

use bestmat::designs::{order_three_example, Quadruple};
use bestmat::equivalence::Orbit;
use bestmat::search::{run_search, SearchConfig};
use bestmat::seqcore::OrderParams;
use support::*;

fn pipeline_classes(n: usize, d: usize) -> BTreeSet<Quadruple> {
    let p = OrderParams::from_n(n, Some(d)).unwrap();
    let out = run_search(&p, &SearchConfig::default()).unwrap();
    assert!(out.is_complete());
    for r in &out.reports {
        assert_eq!(r.rejected, 0);
    }
    out.solutions.into_iter().collect()
}

#[test]
fn brute_force_order_three() {
    let all = brute_force_solutions(3);
    let want = class_set(&all);
    assert_eq!(want.len(), 1);
    assert_eq!(pipeline_classes(3, 3), want);
    assert_eq!(pipeline_classes(3, 1), want);
}

#[test]
fn brute_force_order_seven() {
    let all = brute_force_solutions(7);
    let want = class_set(&all);
    assert_eq!(want.len(), 2);
    assert_eq!(pipeline_classes(7, 7), want);
    assert_eq!(pipeline_classes(7, 1), want);
}

#[test]
fn order_three_solution_is_the_known_example() {
    let got = pipeline_classes(3, 3);
    let want = order_three_example().canonical_form();
    assert_eq!(got.into_iter().collect::<Vec<_>>(), vec![want]);
}

#[test]
fn generated_cnf_matches_the_fifteen_clauses() {
    check_fifteen_clauses().unwrap();
}

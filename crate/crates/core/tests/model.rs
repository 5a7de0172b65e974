use shiq::engine::{Blocking, CompletionForest};
use shiq::model::{check_model, check_tableau, extract_model, unravel_bounded, ExtractError};
use shiq::parse::{parse_concept, parse_kb};
use shiq::{reduce_abox_consistency, solve, Concept, ReducedProblem, Role, SolveOptions};

fn consistent_forest(src: &str) -> (ReducedProblem, CompletionForest) {
    let kb = parse_kb(src).unwrap();
    let p = reduce_abox_consistency(&kb);
    let report = solve(&p, &SolveOptions::default()).unwrap();
    let f = report.outcome.forest().expect("consistent").clone();
    (p, f)
}

fn c(s: &str) -> Concept {
    parse_concept(s).unwrap()
}

#[test]
fn extracted_model_of_existential() {
    let src = "(instance a (and A (some R B)))";
    let (p, f) = consistent_forest(src);
    let i = extract_model(&f, &p).unwrap();
    assert_eq!(i.domain_size, 2);
    assert!(check_model(&i, &p).is_model());
    assert!(check_model(&i, &parse_kb(src).unwrap()).is_model());
}

#[test]
fn merged_individuals_share_an_element() {
    let src = "(instance x (at-most 1 S C)) (related x a S) (related x b S) (instance a C) (instance b C)";
    let (p, f) = consistent_forest(src);
    let i = extract_model(&f, &p).unwrap();
    assert_eq!(i.individuals["a"], i.individuals["b"]);
    assert_ne!(i.individuals["a"], i.individuals["x"]);
    assert!(check_model(&i, &parse_kb(src).unwrap()).is_model());
}

#[test]
fn sub_role_pairs_are_included() {
    let src = "(subrole R S) (transitive T) (subrole S T) (instance a (some R (some R A)))";
    let (p, f) = consistent_forest(src);
    let i = extract_model(&f, &p).unwrap();
    let pairs = |r: &str| i.role_pairs(&Role::named(r)).unwrap();
    assert!(pairs("R").is_subset(&pairs("S")));
    assert!(pairs("S").is_subset(&pairs("T")));
    assert_eq!(pairs("R").len(), 2);
    assert_eq!(pairs("T").len(), 3, "closure adds the two-step pair");
    assert!(check_model(&i, &p).is_model());
}

#[test]
fn cyclic_role_hierarchy_extracts() {
    let src = "(subrole R S) (subrole S R) (instance a (some R A)) (instance a (all S B))";
    let (p, f) = consistent_forest(src);
    let i = extract_model(&f, &p).unwrap();
    assert_eq!(i.role_pairs(&Role::named("R")).unwrap(), i.role_pairs(&Role::named("S")).unwrap());
    assert!(check_model(&i, &parse_kb(src).unwrap()).is_model());
}

const CYCLE: &str = "(implies (or A (not A)) (some R A))\n(instance a A)";

#[test]
fn blocked_forest_refuses_extraction() {
    let (p, f) = consistent_forest(CYCLE);
    assert!(f
        .blocking_table()
        .iter()
        .any(|b| matches!(b, Blocking::Direct(_))));
    assert!(matches!(extract_model(&f, &p), Err(ExtractError::Blocked { .. })));
}

#[test]
fn unravelling_a_blocked_forest() {
    let (p, f) = consistent_forest(CYCLE);
    for k in [0, 1, 6, 8] {
        let t = unravel_bounded(&f, k);
        assert_eq!(check_tableau(&t, &p), Ok(()), "k = {k}");
        assert!(!t.frontier.is_empty());
        // A chain: one element per path length.
        assert_eq!(t.len(), k + 1);
    }
    let t = unravel_bounded(&f, 0);
    assert_eq!(t.individuals.len(), 1);
    assert!(t.edges.is_empty());
}

#[test]
fn unravelling_without_blocking_matches_extraction() {
    let (p, f) = consistent_forest("(instance a (some R (some R A))) (related a b S) (instance b B)");
    let t = unravel_bounded(&f, 10);
    let i = extract_model(&f, &p).unwrap();
    assert!(t.frontier.is_empty());
    assert_eq!(t.len(), i.domain_size);
    assert_eq!(t.edges[&Role::named("R")].len(), i.role_pairs(&Role::named("R")).unwrap().len());
    assert_eq!(check_tableau(&t, &p), Ok(()));
}

#[test]
fn tableau_violations_are_numbered() {
    let (p, f) = consistent_forest("(instance a (all S C)) (related a b S) (instance a A)");
    let t = unravel_bounded(&f, 4);
    assert_eq!(check_tableau(&t, &p), Ok(()));

    let b = t.individuals["b"];
    let mut broken = t.clone();
    broken.labels[b].remove(&c("C"));
    assert_eq!(check_tableau(&broken, &p).unwrap_err().condition, 4);

    let (p, f) = consistent_forest("(instance a A) (instance b B) (distinct a b)");
    let mut t = unravel_bounded(&f, 2);
    let a = t.individuals["a"];
    t.individuals.insert("b".into(), a);
    t.labels[a].insert(c("B"));
    let v = check_tableau(&t, &p).unwrap_err();
    assert_eq!(v.condition, 14);
    assert!(v.to_string().starts_with("P14"));
}

#[test]
fn single_node_run_is_a_tableau() {
    let (p, f) = consistent_forest("(instance a A)");
    let t = unravel_bounded(&f, 3);
    assert_eq!(t.len(), 1);
    assert_eq!(check_tableau(&t, &p), Ok(()));
}

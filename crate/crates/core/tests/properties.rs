use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shiq::corpus::{random_concept, random_interpretation, random_kb, RandomConfig};
use shiq::engine::{
    applicable_rule, apply_alternative, apply_deterministic, CompletionForest, NodeId, RuleKind,
    SearchLimits, Tables,
};
use shiq::model::eval_concept;
use shiq::parse::{parse_kb, print_kb};
use shiq::syntax::{closure, neg_nnf, nnf, UNIVERSAL_ROLE};
use shiq::{reduce_abox_consistency, Concept, Role, RoleBox};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const NAMES: [&str; 4] = ["P", "Q", "R", "S"];

fn role_strategy() -> impl Strategy<Value = Role> {
    (0..NAMES.len(), any::<bool>()).prop_map(|(i, inv)| {
        if inv {
            Role::inverse_of(NAMES[i])
        } else {
            Role::named(NAMES[i])
        }
    })
}

fn rbox_strategy() -> impl Strategy<Value = RoleBox> {
    (
        prop::collection::vec((role_strategy(), role_strategy()), 0..6),
        prop::collection::btree_set(0..NAMES.len(), 0..3),
    )
        .prop_map(|(inclusions, transitive)| {
            RoleBox::new(NAMES, inclusions, transitive.into_iter().map(|i| NAMES[i]))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn nnf_is_idempotent(seed in any::<u64>(), depth in 0usize..5) {
        let c = random_concept(&mut rng(seed), &RandomConfig::default(), depth);
        let n = nnf(&c);
        prop_assert!(n.is_nnf());
        prop_assert_eq!(nnf(&n), n);
    }

    #[test]
    fn nnf_preserves_extensions(seed in any::<u64>(), depth in 0usize..5) {
        let cfg = RandomConfig::default();
        let mut r = rng(seed);
        let c = random_concept(&mut r, &cfg, depth);
        let i = random_interpretation(&mut r, &cfg, 3);
        prop_assert_eq!(eval_concept(&i, &c).unwrap(), eval_concept(&i, &nnf(&c)).unwrap());
    }

    #[test]
    fn negation_is_complement(seed in any::<u64>(), depth in 0usize..4) {
        let cfg = RandomConfig::default();
        let mut r = rng(seed);
        let c = nnf(&random_concept(&mut r, &cfg, depth));
        let i = random_interpretation(&mut r, &cfg, 3);
        let ext = eval_concept(&i, &c).unwrap();
        let complement: BTreeSet<usize> = i.domain().filter(|x| !ext.contains(x)).collect();
        prop_assert_eq!(eval_concept(&i, &neg_nnf(&c)).unwrap(), complement);
    }

    #[test]
    fn role_hierarchy_is_an_inversion_closed_preorder(rbox in rbox_strategy()) {
        let roles = rbox.roles();
        for r in &roles {
            prop_assert!(rbox.subsumes_role(r, r).unwrap());
            for s in &roles {
                let rs = rbox.subsumes_role(r, s).unwrap();
                prop_assert_eq!(rs, rbox.subsumes_role(&r.inv(), &s.inv()).unwrap());
                if !rs {
                    continue;
                }
                for t in &roles {
                    if rbox.subsumes_role(s, t).unwrap() {
                        prop_assert!(rbox.subsumes_role(r, t).unwrap());
                    }
                }
            }
        }
        for (sub, sup) in rbox.declared_inclusions() {
            prop_assert!(rbox.subsumes_role(sub, sup).unwrap());
        }
    }

    #[test]
    fn closure_is_closed(seed in any::<u64>()) {
        let kb = random_kb(&mut rng(seed), &RandomConfig::default());
        let clos = closure(&kb);
        let rbox = kb.rbox();
        for c in &clos {
            prop_assert!(clos.contains(&neg_nnf(c)), "negation of {} missing", c);
            for sub in c.subconcepts() {
                prop_assert!(clos.contains(sub), "subconcept {} of {} missing", sub, c);
            }
            if let Concept::Forall(s, d) = c {
                for r in rbox.roles() {
                    if rbox.is_transitive(&r).unwrap() && rbox.subsumes_role(&r, s).unwrap() {
                        let extra = Concept::forall(r, (**d).clone());
                        prop_assert!(clos.contains(&extra), "{} missing", extra);
                    }
                }
            }
        }
    }

    #[test]
    fn printed_kbs_parse_back(seed in any::<u64>()) {
        let kb = random_kb(&mut rng(seed), &RandomConfig::default());
        let text = print_kb(&kb);
        prop_assert_eq!(parse_kb(&text).unwrap(), kb);
    }

    #[test]
    fn reduction_is_polynomial_and_fresh(seed in any::<u64>()) {
        let kb = random_kb(&mut rng(seed), &RandomConfig::default());
        let p = reduce_abox_consistency(&kb);
        let tbox_size: usize = kb.tbox().iter().map(|g| g.sub.size() + g.sup.size()).sum();
        let roles = kb.rbox().signature().len();
        prop_assert!(p.size() <= 4 * kb.size() * (tbox_size + 1) + 2 * roles);
        prop_assert!(!kb.rbox().contains(UNIVERSAL_ROLE));
        prop_assert!(p.rbox().is_transitive(&p.universal_role()).unwrap());
        for name in kb.rbox().signature() {
            prop_assert!(p.rbox().subsumes_role(&Role::named(name.clone()), &p.universal_role()).unwrap());
            prop_assert!(p.rbox().subsumes_role(&Role::inverse_of(name.clone()), &p.universal_role()).unwrap());
        }
    }
}

/// Undirected adjacency among roots.
fn root_links(f: &CompletionForest) -> BTreeSet<(NodeId, NodeId)> {
    f.edges()
        .filter(|(x, y, _)| f.is_root(*x) && f.is_root(*y))
        .map(|(x, y, _)| (x.min(y), x.max(y)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// Drives the rules step by step along randomly chosen branches and
    /// checks the forest after every application.
    #[test]
    fn rules_preserve_forest_shape(seed in any::<u64>()) {
        let mut r = rng(seed);
        let kb = random_kb(&mut r, &RandomConfig::default());
        let p = reduce_abox_consistency(&kb);
        let tables = Arc::new(Tables::new(&p).unwrap());
        let limits = SearchLimits::new(&tables, usize::MAX);
        let clos = p.closure();
        let mut f = CompletionForest::init(tables.clone(), &p);
        for _ in 0..3000 {
            if f.detect_clash().is_some() {
                break;
            }
            let Some(inst) = applicable_rule(&f) else { break };
            let before = f.clone();
            if inst.is_branching() {
                let alts = inst.alternatives(&f);
                let alt = alts[r.gen_range(0..alts.len())];
                apply_alternative(&mut f, alt);
            } else {
                apply_deterministic(&mut f, &inst);
            }
            let kind = inst.kind();
            let merging = matches!(kind, RuleKind::Merge | RuleKind::MergeRoot);

            for x in f.node_ids() {
                for c in f.label(x) {
                    prop_assert!(clos.contains(tables.concept(c)));
                }
                match f.parent(x) {
                    None => prop_assert!(f.is_root(x)),
                    Some(px) => {
                        prop_assert!(!f.is_root(x));
                        prop_assert!(f.edge_label(px, x).is_some());
                        prop_assert_eq!(f.in_edges(x).collect::<Vec<_>>(), vec![px]);
                        prop_assert!(f.depth(x) as u64 <= limits.max_path_length);
                    }
                }
                prop_assert!(f.generated(x) <= limits.max_out_degree);
            }
            for (_, _, label) in f.edges() {
                prop_assert!(label.iter().all(|&role| role < tables.role_count()));
            }
            for &(a, b) in f.inequalities() {
                prop_assert_ne!(a, b);
            }
            if kind != RuleKind::MergeRoot {
                prop_assert_eq!(root_links(&before), root_links(&f));
            }
            for x in before.node_ids() {
                let (old, new) = (before.label_set(x), f.label_set(x));
                if !old.is_subset(new) {
                    prop_assert_eq!(kind, RuleKind::MergeRoot);
                    prop_assert_eq!(f.label(x).count(), 0);
                }
            }
            for (x, y, old) in before.edges() {
                match f.edge_label(x, y) {
                    Some(new) if old.iter().all(|r| new.contains(r)) => {}
                    Some(new) => prop_assert!(merging && new.is_empty()),
                    None => prop_assert_eq!(kind, RuleKind::MergeRoot),
                }
            }
        }
    }
}

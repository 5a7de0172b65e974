use std::collections::BTreeSet;

use super::concept::{neg_nnf, nnf, Concept};
use super::kb::KnowledgeBase;
use super::role::RoleBox;

/// Smallest set containing every given concept (after NNF) that is closed
/// under sub-concepts and `~`, and that holds `∀R.C` for every `∀S.C` in it
/// and every transitive `R ⊑* S`. The last condition keeps the `∀₊`-rule
/// inside the closure.
pub fn closure_of<'a>(
    concepts: impl IntoIterator<Item = &'a Concept>,
    rbox: &RoleBox,
) -> BTreeSet<Concept> {
    let transitive_roles: Vec<_> = rbox
        .roles()
        .into_iter()
        .filter(|r| rbox.transitive_names().contains(r.name()))
        .collect();

    let mut out = BTreeSet::new();
    let mut work: Vec<Concept> = concepts.into_iter().map(nnf).collect();
    while let Some(c) = work.pop() {
        if out.contains(&c) {
            continue;
        }
        work.extend(c.children().into_iter().cloned());
        work.push(neg_nnf(&c));
        if let Concept::Forall(s, filler) = &c {
            for r in &transitive_roles {
                if rbox.subsumes_role(r, s).unwrap_or(false) {
                    work.push(Concept::forall(r.clone(), (**filler).clone()));
                }
            }
        }
        out.insert(c);
    }
    out
}

/// Closure of a knowledge base: every ABox concept plus `¬C ⊔ D` for each
/// inclusion `C ⊑ D`.
pub fn closure(kb: &KnowledgeBase) -> BTreeSet<Concept> {
    let gcis: Vec<Concept> = kb
        .tbox()
        .iter()
        .map(|g| Concept::or(Concept::not(g.sub.clone()), g.sup.clone()))
        .collect();
    let concepts = kb
        .abox()
        .iter()
        .filter_map(|a| a.concept())
        .chain(gcis.iter());
    closure_of(concepts, kb.rbox())
}

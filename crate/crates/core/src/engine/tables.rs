//! Dense indices for the closure and the role signature of one problem.

use std::collections::HashMap;

use crate::reduction::ReducedProblem;
use crate::syntax::{neg_nnf, Concept, RoleBox, SignatureError};

/// Index into the interned closure. Ids follow the structural order of
/// [`Concept`], so iterating a label by id is iterating it in concept order.
pub type ConceptId = usize;
/// Index into the role signature; `r ^ 1` is the inverse of `r`.
pub type RoleId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    Atom,
    NegAtom,
    And(ConceptId, ConceptId),
    Or(ConceptId, ConceptId),
    Exists(RoleId, ConceptId),
    Forall(RoleId, ConceptId),
    AtLeast(u32, RoleId, ConceptId),
    AtMost(u32, RoleId, ConceptId),
}

/// Interned closure and role hierarchy shared by every forest of a run.
#[derive(Debug)]
pub struct Tables {
    concepts: Vec<Concept>,
    ids: HashMap<Concept, ConceptId>,
    pub(crate) kinds: Vec<Kind>,
    pub(crate) neg: Vec<ConceptId>,
    /// For each `∀S.C`: `(R, id of ∀R.C)` for every transitive `R ⊑* S`.
    pub(crate) forall_plus: Vec<Vec<(RoleId, ConceptId)>>,
    rbox: RoleBox,
    transitive: Vec<bool>,
    max_at_least: u32,
}

impl Tables {
    pub fn new(problem: &ReducedProblem) -> Result<Self, SignatureError> {
        let rbox = problem.rbox().clone();
        let closure = problem.closure();
        let concepts: Vec<Concept> = closure.into_iter().collect();
        let ids: HashMap<Concept, ConceptId> = concepts
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();

        let id = |c: &Concept| ids[c];
        let mut kinds = Vec::with_capacity(concepts.len());
        for c in &concepts {
            let kind = match c {
                Concept::Atom(_) => Kind::Atom,
                Concept::NegAtom(_) => Kind::NegAtom,
                Concept::And(a, b) => Kind::And(id(a), id(b)),
                Concept::Or(a, b) => Kind::Or(id(a), id(b)),
                Concept::Exists(r, a) => Kind::Exists(rbox.role_index(r)?, id(a)),
                Concept::Forall(r, a) => Kind::Forall(rbox.role_index(r)?, id(a)),
                Concept::AtLeast(n, r, a) => Kind::AtLeast(*n, rbox.role_index(r)?, id(a)),
                Concept::AtMost(n, r, a) => Kind::AtMost(*n, rbox.role_index(r)?, id(a)),
                Concept::Not(_) => unreachable!("closure is in NNF"),
            };
            kinds.push(kind);
        }
        let neg = concepts.iter().map(|c| id(&neg_nnf(c))).collect();

        let transitive: Vec<bool> = (0..rbox.role_count())
            .map(|r| rbox.transitive_names().contains(rbox.role_at(r).name()))
            .collect();
        let forall_plus = concepts
            .iter()
            .zip(&kinds)
            .map(|(c, k)| match (c, k) {
                (Concept::Forall(_, filler), Kind::Forall(s, _)) => (0..rbox.role_count())
                    .filter(|&r| transitive[r] && rbox.subsumes_index(r, *s))
                    .map(|r| (r, id(&Concept::forall(rbox.role_at(r), (**filler).clone()))))
                    .collect(),
                _ => Vec::new(),
            })
            .collect();
        let max_at_least = kinds
            .iter()
            .filter_map(|k| match k {
                Kind::AtLeast(n, _, _) => Some(*n),
                _ => None,
            })
            .max()
            .unwrap_or(0);

        Ok(Tables {
            concepts,
            ids,
            kinds,
            neg,
            forall_plus,
            rbox,
            transitive,
            max_at_least,
        })
    }

    /// `m`, the closure size.
    pub fn closure_size(&self) -> usize {
        self.concepts.len()
    }

    /// `n`, the number of roles including inverses.
    pub fn role_count(&self) -> usize {
        self.rbox.role_count()
    }

    /// `n_max`, the largest number in an at-least restriction of the closure.
    pub fn max_at_least(&self) -> u32 {
        self.max_at_least
    }

    pub fn concept(&self, id: ConceptId) -> &Concept {
        &self.concepts[id]
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn id_of(&self, c: &Concept) -> Option<ConceptId> {
        self.ids.get(c).copied()
    }

    /// `~C` by id.
    pub fn negation(&self, id: ConceptId) -> ConceptId {
        self.neg[id]
    }

    pub fn rbox(&self) -> &RoleBox {
        &self.rbox
    }

    pub fn role_id(&self, r: &crate::syntax::Role) -> Result<RoleId, SignatureError> {
        self.rbox.role_index(r)
    }

    pub fn is_transitive(&self, r: RoleId) -> bool {
        self.transitive[r]
    }

    /// `r ⊑* s`.
    pub fn sub_role(&self, r: RoleId, s: RoleId) -> bool {
        self.rbox.subsumes_index(r, s)
    }
}

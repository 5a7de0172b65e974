//! Internalization of terminologies and reduction of every query to ABox
//! consistency with respect to a role hierarchy alone.

use std::collections::BTreeSet;

use crate::syntax::{
    closure_of, nnf, validate_concept, Assertion, Concept, Gci, KbError, KnowledgeBase, Name,
    Role, RoleBox, QUERY_INDIVIDUAL, UNIVERSAL_ROLE,
};

/// Which query a [`ReducedProblem`] answers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    ConceptSat(Concept),
    Subsumption { sub: Concept, sup: Concept },
    AboxConsistency,
    /// Built directly by a caller.
    Manual,
}

/// An ABox in NNF over a role box containing a transitive universal role,
/// with an empty terminology.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedProblem {
    abox: Vec<Assertion>,
    rbox: RoleBox,
    universal: Name,
    provenance: Provenance,
    individuals: Vec<Name>,
}

impl ReducedProblem {
    /// Wraps an ABox. Concepts are put into NNF; the role box should already
    /// contain every role the ABox uses.
    pub fn new(
        abox: impl IntoIterator<Item = Assertion>,
        rbox: RoleBox,
        universal: impl Into<Name>,
        provenance: Provenance,
    ) -> Self {
        let mut abox_nnf: Vec<Assertion> = Vec::new();
        for a in abox {
            let a = a.to_nnf();
            if !abox_nnf.contains(&a) {
                abox_nnf.push(a);
            }
        }
        let mut individuals: Vec<Name> = Vec::new();
        for a in &abox_nnf {
            for ind in a.individuals() {
                if !individuals.contains(ind) {
                    individuals.push(ind.clone());
                }
            }
        }
        ReducedProblem {
            abox: abox_nnf,
            rbox,
            universal: universal.into(),
            provenance,
            individuals,
        }
    }

    pub fn abox(&self) -> &[Assertion] {
        &self.abox
    }

    pub fn rbox(&self) -> &RoleBox {
        &self.rbox
    }

    pub fn universal_role(&self) -> Role {
        Role::named(self.universal.clone())
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn individuals(&self) -> &[Name] {
        &self.individuals
    }

    /// Concepts of all instance assertions.
    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.abox.iter().filter_map(Assertion::concept)
    }

    pub fn atoms(&self) -> BTreeSet<Name> {
        self.concepts().flat_map(Concept::atoms).collect()
    }

    pub fn closure(&self) -> BTreeSet<Concept> {
        closure_of(self.concepts(), &self.rbox)
    }

    /// Sum of concept sizes plus one per assertion and inclusion.
    pub fn size(&self) -> usize {
        self.abox.len()
            + self.rbox.declared_inclusions().len()
            + self.concepts().map(Concept::size).sum::<usize>()
    }
}

/// `C_T`: the conjunction of `¬Cᵢ ⊔ Dᵢ` over all inclusions, in NNF; the
/// trivially-true `¬⊥★` for an empty terminology.
pub fn internalized_concept(tbox: &[Gci]) -> Concept {
    Concept::conjunction(
        tbox.iter()
            .map(|g| nnf(&Concept::or(Concept::not(g.sub.clone()), g.sup.clone()))),
    )
    .unwrap_or_else(Concept::top)
}

/// `R_U`: the role box plus `R ⊑ U`, `Inv(R) ⊑ U` for every role name of the
/// signature, with `U` transitive.
fn universal_rbox(rbox: &RoleBox) -> RoleBox {
    let names: Vec<Name> = rbox.signature().to_vec();
    let u = Role::named(UNIVERSAL_ROLE);
    let inclusions = names
        .iter()
        .flat_map(|n| {
            [
                (Role::named(n.clone()), u.clone()),
                (Role::inverse_of(n.clone()), u.clone()),
            ]
        })
        .collect::<Vec<_>>();
    rbox.extended(names, inclusions, [UNIVERSAL_ROLE])
}

fn query_roles<'a>(concepts: impl IntoIterator<Item = &'a Concept>) -> BTreeSet<Name> {
    concepts
        .into_iter()
        .flat_map(|c| c.roles())
        .map(|r| r.name().clone())
        .collect()
}

fn internalized_instance(c_t: &Concept) -> Concept {
    Concept::and(
        c_t.clone(),
        Concept::forall(Role::named(UNIVERSAL_ROLE), c_t.clone()),
    )
}

fn reduce_query(
    query: Concept,
    kb: &KnowledgeBase,
    provenance: Provenance,
) -> Result<ReducedProblem, KbError> {
    let query_rbox = kb
        .rbox()
        .extended(query_roles([&query]), Vec::new(), Vec::<Name>::new());
    let rbox = universal_rbox(&query_rbox);
    validate_concept(&query, &rbox)?;
    let c_t = internalized_concept(kb.tbox());
    let concept = nnf(&Concept::and(
        Concept::and(query, c_t.clone()),
        Concept::forall(Role::named(UNIVERSAL_ROLE), c_t),
    ));
    Ok(ReducedProblem::new(
        [Assertion::instance(QUERY_INDIVIDUAL, concept)],
        rbox,
        UNIVERSAL_ROLE,
        provenance,
    ))
}

/// Satisfiability of `c` w.r.t. the knowledge base's terminology and role
/// hierarchy, as consistency of `{a₀ : C ⊓ C_T ⊓ ∀U.C_T}`. The ABox of `kb`
/// is not consulted.
pub fn reduce_concept_sat(c: &Concept, kb: &KnowledgeBase) -> Result<ReducedProblem, KbError> {
    reduce_query(c.clone(), kb, Provenance::ConceptSat(c.clone()))
}

/// `d` subsumes `c` iff the returned problem is inconsistent.
pub fn reduce_subsumption(
    c: &Concept,
    d: &Concept,
    kb: &KnowledgeBase,
) -> Result<ReducedProblem, KbError> {
    let provenance = Provenance::Subsumption {
        sub: c.clone(),
        sup: d.clone(),
    };
    reduce_query(
        Concept::and(c.clone(), Concept::not(d.clone())),
        kb,
        provenance,
    )
}

/// The ABox plus `a : C_T ⊓ ∀U.C_T` for every individual. An ABox without
/// individuals gets one fresh individual carrying the internalized concept.
pub fn reduce_abox_consistency(kb: &KnowledgeBase) -> ReducedProblem {
    let c_t = internalized_concept(kb.tbox());
    let mut abox = kb.abox().to_vec();
    let carrier = internalized_instance(&c_t);
    if kb.individuals().is_empty() {
        abox.push(Assertion::instance(QUERY_INDIVIDUAL, carrier));
    } else {
        abox.extend(
            kb.individuals()
                .iter()
                .map(|a| Assertion::instance(a.clone(), carrier.clone())),
        );
    }
    ReducedProblem::new(
        abox,
        universal_rbox(kb.rbox()),
        UNIVERSAL_ROLE,
        Provenance::AboxConsistency,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> Concept {
        Concept::atom(n)
    }

    fn kb(tbox: Vec<Gci>, abox: Vec<Assertion>) -> KnowledgeBase {
        KnowledgeBase::new(tbox, RoleBox::default(), abox).unwrap()
    }

    #[test]
    fn internalized_concept_examples() {
        assert_eq!(
            internalized_concept(&[Gci::new(a("A"), a("B"))]),
            Concept::or(Concept::neg_atom("A"), a("B"))
        );
        assert_eq!(internalized_concept(&[]), Concept::top());
        assert_eq!(
            internalized_concept(&[Gci::new(a("A"), a("B")), Gci::new(a("B"), a("C"))]),
            Concept::and(
                Concept::or(Concept::neg_atom("A"), a("B")),
                Concept::or(Concept::neg_atom("B"), a("C"))
            )
        );
    }

    #[test]
    fn concept_sat_with_empty_kb() {
        let p = reduce_concept_sat(&a("A"), &kb(vec![], vec![])).unwrap();
        let u = Role::named(UNIVERSAL_ROLE);
        let expected = Concept::and(
            Concept::and(a("A"), Concept::top()),
            Concept::forall(u.clone(), Concept::top()),
        );
        assert_eq!(p.abox(), &[Assertion::instance(QUERY_INDIVIDUAL, expected)]);
        assert!(p.rbox().is_transitive(&u).unwrap());
    }

    #[test]
    fn concept_sat_carries_internalized_tbox() {
        let p = reduce_concept_sat(&a("A"), &kb(vec![Gci::new(a("A"), a("B"))], vec![])).unwrap();
        let c_t = Concept::or(Concept::neg_atom("A"), a("B"));
        let Assertion::Instance(_, c) = &p.abox()[0] else {
            panic!("expected instance assertion")
        };
        let subs = c.subconcepts();
        assert!(subs.contains(&&c_t));
        assert!(subs.contains(&&Concept::forall(p.universal_role(), c_t.clone())));
    }

    #[test]
    fn every_role_is_below_universal() {
        let r = Role::named("R");
        let base = KnowledgeBase::new(
            vec![Gci::new(a("A"), Concept::exists(r.clone(), a("B")))],
            RoleBox::new(["S"], vec![], Vec::<Name>::new()),
            vec![],
        )
        .unwrap();
        let q = Concept::exists(Role::named("Q"), a("A"));
        let p = reduce_concept_sat(&q, &base).unwrap();
        let u = p.universal_role();
        for n in ["R", "S", "Q"] {
            assert!(p.rbox().subsumes_role(&Role::named(n), &u).unwrap());
            assert!(p.rbox().subsumes_role(&Role::inverse_of(n), &u).unwrap());
        }
    }

    #[test]
    fn abox_reduction_adds_internalized_concept_per_individual() {
        let base = kb(
            vec![Gci::new(a("A"), a("B"))],
            vec![
                Assertion::instance("a", a("A")),
                Assertion::related("a", "b", Role::named("R")),
            ],
        );
        let p = reduce_abox_consistency(&base);
        let c_t = Concept::or(Concept::neg_atom("A"), a("B"));
        let carrier = Concept::and(c_t.clone(), Concept::forall(p.universal_role(), c_t));
        assert_eq!(&p.abox()[..2], base.abox());
        assert!(p.abox().contains(&Assertion::instance("a", carrier.clone())));
        assert!(p.abox().contains(&Assertion::instance("b", carrier)));
    }

    #[test]
    fn empty_abox_gets_fresh_individual() {
        let p = reduce_abox_consistency(&kb(vec![Gci::new(a("A"), a("B"))], vec![]));
        assert_eq!(p.individuals().len(), 1);
        assert_eq!(&*p.individuals()[0], QUERY_INDIVIDUAL);
    }

    #[test]
    fn number_restriction_in_query_over_universal_role_is_rejected() {
        let q = Concept::at_most(1, Role::named(UNIVERSAL_ROLE), a("A"));
        assert!(matches!(
            reduce_concept_sat(&q, &kb(vec![], vec![])),
            Err(KbError::NonSimpleRole { .. })
        ));
    }
}

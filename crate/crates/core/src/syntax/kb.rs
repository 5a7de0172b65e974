use std::collections::BTreeSet;

use super::concept::{nnf, Concept};
use super::role::{Role, RoleBox};
use super::{KbError, Name};

/// General concept inclusion `sub ⊑ sup`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gci {
    pub sub: Concept,
    pub sup: Concept,
}

impl Gci {
    pub fn new(sub: Concept, sup: Concept) -> Self {
        Gci { sub, sup }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assertion {
    /// `a : C`
    Instance(Name, Concept),
    /// `(a, b) : R`
    Related(Name, Name, Role),
    /// `a ≠ b`, symmetric.
    Distinct(Name, Name),
}

impl Assertion {
    pub fn instance(a: impl Into<Name>, c: Concept) -> Self {
        Assertion::Instance(a.into(), c)
    }

    pub fn related(a: impl Into<Name>, b: impl Into<Name>, r: Role) -> Self {
        Assertion::Related(a.into(), b.into(), r)
    }

    pub fn distinct(a: impl Into<Name>, b: impl Into<Name>) -> Self {
        Assertion::Distinct(a.into(), b.into())
    }

    pub fn individuals(&self) -> Vec<&Name> {
        match self {
            Assertion::Instance(a, _) => vec![a],
            Assertion::Related(a, b, _) | Assertion::Distinct(a, b) => vec![a, b],
        }
    }

    pub fn concept(&self) -> Option<&Concept> {
        match self {
            Assertion::Instance(_, c) => Some(c),
            _ => None,
        }
    }

    /// Same assertion with its concept (if any) put into NNF.
    pub fn to_nnf(&self) -> Assertion {
        match self {
            Assertion::Instance(a, c) => Assertion::Instance(a.clone(), nnf(c)),
            other => other.clone(),
        }
    }
}

/// Terminology, role box and ABox, plus the table of individuals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnowledgeBase {
    tbox: Vec<Gci>,
    rbox: RoleBox,
    abox: Vec<Assertion>,
    individuals: Vec<Name>,
}

impl KnowledgeBase {
    /// Assembles and validates a knowledge base. Every role name occurring in
    /// a concept or assertion joins the role signature; duplicates in the
    /// terminology and ABox are dropped while keeping first-occurrence order.
    pub fn new(
        tbox: impl IntoIterator<Item = Gci>,
        rbox: RoleBox,
        abox: impl IntoIterator<Item = Assertion>,
    ) -> Result<Self, KbError> {
        let tbox = dedup(tbox);
        let abox = dedup(abox);

        let mut extra: BTreeSet<Name> = BTreeSet::new();
        for gci in &tbox {
            extra.extend(gci.sub.roles().into_iter().map(|r| r.name().clone()));
            extra.extend(gci.sup.roles().into_iter().map(|r| r.name().clone()));
        }
        for a in &abox {
            match a {
                Assertion::Instance(_, c) => {
                    extra.extend(c.roles().into_iter().map(|r| r.name().clone()))
                }
                Assertion::Related(_, _, r) => {
                    extra.insert(r.name().clone());
                }
                Assertion::Distinct(..) => {}
            }
        }
        let rbox = if extra.iter().all(|n| rbox.contains(n)) {
            rbox
        } else {
            rbox.extended(extra, Vec::new(), Vec::<Name>::new())
        };

        let mut individuals: Vec<Name> = Vec::new();
        for a in &abox {
            for ind in a.individuals() {
                if !individuals.contains(ind) {
                    individuals.push(ind.clone());
                }
            }
        }

        let kb = KnowledgeBase {
            tbox,
            rbox,
            abox,
            individuals,
        };
        for c in kb.concepts() {
            validate_concept(c, &kb.rbox)?;
        }
        Ok(kb)
    }

    pub fn tbox(&self) -> &[Gci] {
        &self.tbox
    }

    pub fn rbox(&self) -> &RoleBox {
        &self.rbox
    }

    pub fn abox(&self) -> &[Assertion] {
        &self.abox
    }

    /// Individuals in order of first occurrence.
    pub fn individuals(&self) -> &[Name] {
        &self.individuals
    }

    /// Every concept mentioned by the terminology and the ABox.
    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.tbox
            .iter()
            .flat_map(|g| [&g.sub, &g.sup])
            .chain(self.abox.iter().filter_map(Assertion::concept))
    }

    /// Concept names used anywhere, sorted.
    pub fn atoms(&self) -> BTreeSet<Name> {
        self.concepts().flat_map(Concept::atoms).collect()
    }

    /// Sum of concept sizes plus one per axiom; the measure used to bound
    /// reductions.
    pub fn size(&self) -> usize {
        let axioms = self.tbox.len() + self.abox.len() + self.rbox.declared_inclusions().len();
        axioms + self.concepts().map(Concept::size).sum::<usize>()
    }
}

fn dedup<T: Ord + Clone>(items: impl IntoIterator<Item = T>) -> Vec<T> {
    let mut seen = BTreeSet::new();
    items
        .into_iter()
        .filter(|x| seen.insert(x.clone()))
        .collect()
}

/// Number restrictions must sit on simple roles.
pub fn validate_concept(c: &Concept, rbox: &RoleBox) -> Result<(), KbError> {
    for restriction in c.number_restrictions() {
        let role = restriction.role().expect("number restriction has a role");
        if !rbox.is_simple(role) {
            return Err(KbError::NonSimpleRole {
                role: role.to_string(),
                concept: restriction.to_string(),
            });
        }
    }
    Ok(())
}

use std::collections::BTreeSet;
use std::fmt;

use super::role::Role;
use super::{Name, BOTTOM_MARKER};

/// A concept expression.
///
/// Conjunction and disjunction stay binary and are never flattened or
/// sorted, so label membership is plain structural equality. The derived
/// `Ord` is the structural order used for deterministic iteration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Concept {
    Atom(Name),
    NegAtom(Name),
    Not(Box<Concept>),
    And(Box<Concept>, Box<Concept>),
    Or(Box<Concept>, Box<Concept>),
    Exists(Role, Box<Concept>),
    Forall(Role, Box<Concept>),
    AtLeast(u32, Role, Box<Concept>),
    AtMost(u32, Role, Box<Concept>),
}

impl Concept {
    pub fn atom(name: impl Into<Name>) -> Self {
        Concept::Atom(name.into())
    }

    pub fn neg_atom(name: impl Into<Name>) -> Self {
        Concept::NegAtom(name.into())
    }

    /// `¬c`; the negation of an atom is the literal `¬A`, so that printing
    /// and parsing agree.
    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Concept) -> Self {
        match c {
            Concept::Atom(a) => Concept::NegAtom(a),
            c => Concept::Not(Box::new(c)),
        }
    }

    pub fn and(c: Concept, d: Concept) -> Self {
        Concept::And(Box::new(c), Box::new(d))
    }

    pub fn or(c: Concept, d: Concept) -> Self {
        Concept::Or(Box::new(c), Box::new(d))
    }

    pub fn exists(r: Role, c: Concept) -> Self {
        Concept::Exists(r, Box::new(c))
    }

    pub fn forall(r: Role, c: Concept) -> Self {
        Concept::Forall(r, Box::new(c))
    }

    pub fn at_least(n: u32, r: Role, c: Concept) -> Self {
        Concept::AtLeast(n, r, Box::new(c))
    }

    pub fn at_most(n: u32, r: Role, c: Concept) -> Self {
        Concept::AtMost(n, r, Box::new(c))
    }

    /// `¬⊥★`, the trivially-true concept.
    pub fn top() -> Self {
        Concept::neg_atom(BOTTOM_MARKER)
    }

    /// `⊥★ ⊓ ¬⊥★`, the canonical contradiction.
    pub fn contradiction() -> Self {
        Concept::and(Concept::atom(BOTTOM_MARKER), Concept::neg_atom(BOTTOM_MARKER))
    }

    /// Conjunction of a sequence, folded to the left; `None` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Concept>) -> Option<Concept> {
        items.into_iter().reduce(Concept::and)
    }

    /// Direct sub-concepts.
    pub fn children(&self) -> Vec<&Concept> {
        match self {
            Concept::Atom(_) | Concept::NegAtom(_) => vec![],
            Concept::Not(c)
            | Concept::Exists(_, c)
            | Concept::Forall(_, c)
            | Concept::AtLeast(_, _, c)
            | Concept::AtMost(_, _, c) => vec![c],
            Concept::And(c, d) | Concept::Or(c, d) => vec![c, d],
        }
    }

    /// The role of a quantifier or number restriction.
    pub fn role(&self) -> Option<&Role> {
        match self {
            Concept::Exists(r, _)
            | Concept::Forall(r, _)
            | Concept::AtLeast(_, r, _)
            | Concept::AtMost(_, r, _) => Some(r),
            _ => None,
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Concept::size).sum::<usize>()
    }

    /// Nesting depth of the AST; atoms have depth 0.
    pub fn depth(&self) -> usize {
        self.children()
            .into_iter()
            .map(|c| 1 + c.depth())
            .max()
            .unwrap_or(0)
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            Concept::Not(_) => false,
            _ => self.children().into_iter().all(Concept::is_nnf),
        }
    }

    /// Every sub-concept including `self`, pre-order.
    pub fn subconcepts(&self) -> Vec<&Concept> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let next = out[i].children();
            out.extend(next);
            i += 1;
        }
        out
    }

    pub fn atoms(&self) -> BTreeSet<Name> {
        self.subconcepts()
            .into_iter()
            .filter_map(|c| match c {
                Concept::Atom(a) | Concept::NegAtom(a) => Some(a.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn roles(&self) -> BTreeSet<Role> {
        self.subconcepts()
            .into_iter()
            .filter_map(|c| c.role().cloned())
            .collect()
    }

    /// Number restrictions occurring anywhere inside the concept.
    pub fn number_restrictions(&self) -> impl Iterator<Item = &Concept> {
        self.subconcepts()
            .into_iter()
            .filter(|c| matches!(c, Concept::AtLeast(..) | Concept::AtMost(..)))
    }
}

/// Negation normal form: negation only in front of concept names.
///
/// `¬(≥0 R.C)` has no at-most counterpart and becomes [`Concept::contradiction`].
pub fn nnf(c: &Concept) -> Concept {
    match c {
        Concept::Atom(_) | Concept::NegAtom(_) => c.clone(),
        Concept::And(a, b) => Concept::and(nnf(a), nnf(b)),
        Concept::Or(a, b) => Concept::or(nnf(a), nnf(b)),
        Concept::Exists(r, a) => Concept::exists(r.clone(), nnf(a)),
        Concept::Forall(r, a) => Concept::forall(r.clone(), nnf(a)),
        Concept::AtLeast(n, r, a) => Concept::at_least(*n, r.clone(), nnf(a)),
        Concept::AtMost(n, r, a) => Concept::at_most(*n, r.clone(), nnf(a)),
        Concept::Not(inner) => negated(inner),
    }
}

fn negated(c: &Concept) -> Concept {
    match c {
        Concept::Atom(a) => Concept::NegAtom(a.clone()),
        Concept::NegAtom(a) => Concept::Atom(a.clone()),
        Concept::Not(inner) => nnf(inner),
        Concept::And(a, b) => Concept::or(negated(a), negated(b)),
        Concept::Or(a, b) => Concept::and(negated(a), negated(b)),
        Concept::Exists(r, a) => Concept::forall(r.clone(), negated(a)),
        Concept::Forall(r, a) => Concept::exists(r.clone(), negated(a)),
        Concept::AtMost(n, r, a) => Concept::at_least(n + 1, r.clone(), nnf(a)),
        Concept::AtLeast(0, _, _) => Concept::contradiction(),
        Concept::AtLeast(n, r, a) => Concept::at_most(n - 1, r.clone(), nnf(a)),
    }
}

/// `~C`: the NNF of `¬C`.
pub fn neg_nnf(c: &Concept) -> Concept {
    negated(c)
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Atom(a) => write!(f, "{a}"),
            Concept::NegAtom(a) => write!(f, "(not {a})"),
            Concept::Not(c) => write!(f, "(not {c})"),
            Concept::And(c, d) => write!(f, "(and {c} {d})"),
            Concept::Or(c, d) => write!(f, "(or {c} {d})"),
            Concept::Exists(r, c) => write!(f, "(some {r} {c})"),
            Concept::Forall(r, c) => write!(f, "(all {r} {c})"),
            Concept::AtLeast(n, r, c) => write!(f, "(at-least {n} {r} {c})"),
            Concept::AtMost(n, r, c) => write!(f, "(at-most {n} {r} {c})"),
        }
    }
}

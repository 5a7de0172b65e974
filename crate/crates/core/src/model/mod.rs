//! Semantic oracles: finite interpretations, model checking, tableau
//! checking, model extraction from forests, bounded unravelling and a
//! SAT-backed small-model finder.

mod bruteforce;
mod extract;
mod tableau;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::reduction::ReducedProblem;
use crate::syntax::{
    nnf, Assertion, Concept, Gci, KnowledgeBase, Name, Role, RoleBox, SignatureError,
    BOTTOM_MARKER,
};

pub use bruteforce::find_model_bruteforce;
pub use extract::{extract_model, ExtractError};
pub use tableau::{check_tableau, unravel_bounded, TableauStructure, TableauViolation};

pub type Element = usize;

/// A finite interpretation over the domain `0..domain_size`.
///
/// Atoms and role names absent from the maps are unknown to the
/// interpretation; the reserved bottom marker is always empty.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interpretation {
    pub domain_size: usize,
    pub atoms: BTreeMap<Name, BTreeSet<Element>>,
    pub roles: BTreeMap<Name, BTreeSet<(Element, Element)>>,
    pub individuals: BTreeMap<Name, Element>,
}

impl Interpretation {
    pub fn new(domain_size: usize) -> Self {
        Interpretation {
            domain_size,
            ..Interpretation::default()
        }
    }

    pub fn domain(&self) -> impl Iterator<Item = Element> {
        0..self.domain_size
    }

    /// Declares `names` as atoms with an empty extension unless already set.
    pub fn declare_atoms<'a>(&mut self, names: impl IntoIterator<Item = &'a Name>) {
        for n in names {
            self.atoms.entry(n.clone()).or_default();
        }
    }

    pub fn declare_roles<'a>(&mut self, names: impl IntoIterator<Item = &'a Name>) {
        for n in names {
            self.roles.entry(n.clone()).or_default();
        }
    }

    /// Extension of a possibly inverse role.
    pub fn role_pairs(&self, r: &Role) -> Result<BTreeSet<(Element, Element)>, SignatureError> {
        let pairs = self
            .roles
            .get(r.name())
            .ok_or_else(|| SignatureError::UnknownRole(r.name().to_string()))?;
        Ok(if r.is_inverted() {
            pairs.iter().map(|&(x, y)| (y, x)).collect()
        } else {
            pairs.clone()
        })
    }

    fn successors(&self, r: &Role) -> Result<Vec<Vec<Element>>, SignatureError> {
        let mut succ = vec![Vec::new(); self.domain_size];
        for (x, y) in self.role_pairs(r)? {
            succ[x].push(y);
        }
        Ok(succ)
    }

    fn atom_ext(&self, a: &Name) -> Result<Vec<bool>, SignatureError> {
        let mut ext = vec![false; self.domain_size];
        match self.atoms.get(a) {
            Some(set) => set.iter().for_each(|&e| ext[e] = true),
            None if &**a == BOTTOM_MARKER => {}
            None => return Err(SignatureError::UnknownAtom(a.to_string())),
        }
        Ok(ext)
    }

    fn eval(&self, c: &Concept) -> Result<Vec<bool>, SignatureError> {
        let count = |r: &Role, c: &Concept| -> Result<Vec<usize>, SignatureError> {
            let inner = self.eval(c)?;
            Ok(self
                .successors(r)?
                .iter()
                .map(|ys| ys.iter().filter(|&&y| inner[y]).count())
                .collect())
        };
        Ok(match c {
            Concept::Atom(a) => self.atom_ext(a)?,
            Concept::NegAtom(a) => self.atom_ext(a)?.into_iter().map(|b| !b).collect(),
            Concept::Not(inner) => self.eval(inner)?.into_iter().map(|b| !b).collect(),
            Concept::And(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                a.iter().zip(&b).map(|(x, y)| *x && *y).collect()
            }
            Concept::Or(a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                a.iter().zip(&b).map(|(x, y)| *x || *y).collect()
            }
            Concept::Exists(r, inner) => count(r, inner)?.into_iter().map(|k| k > 0).collect(),
            Concept::AtLeast(n, r, inner) => count(r, inner)?
                .into_iter()
                .map(|k| k >= *n as usize)
                .collect(),
            Concept::AtMost(n, r, inner) => count(r, inner)?
                .into_iter()
                .map(|k| k <= *n as usize)
                .collect(),
            Concept::Forall(r, inner) => {
                let ext = self.eval(inner)?;
                self.successors(r)?
                    .iter()
                    .map(|ys| ys.iter().all(|&y| ext[y]))
                    .collect()
            }
        })
    }

    /// Serializes to the line format read by [`Interpretation::from_text`].
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(text: &str) -> Result<Self, FormatError> {
        let mut out: Option<Interpretation> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |msg: &str| FormatError {
                line: line_no,
                message: msg.to_string(),
            };
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut words = line.split_whitespace();
            let head = words.next().expect("non-empty line");
            if head == "domain" {
                if out.is_some() {
                    return Err(err("duplicate domain line"));
                }
                let n = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| err("expected domain size"))?;
                out = Some(Interpretation::new(n));
                continue;
            }
            let i = out.as_mut().ok_or_else(|| err("domain line must come first"))?;
            let name: Name = words.next().ok_or_else(|| err("expected a name"))?.into();
            let element = |w: &str| -> Result<Element, FormatError> {
                let e: Element = w.parse().map_err(|_| err("expected an element"))?;
                if e >= i.domain_size {
                    return Err(err("element outside the domain"));
                }
                Ok(e)
            };
            match head {
                "atom" => {
                    let set = words.map(element).collect::<Result<_, _>>()?;
                    i.atoms.insert(name, set);
                }
                "role" => {
                    let mut set = BTreeSet::new();
                    for w in words {
                        let (a, b) = w.split_once(',').ok_or_else(|| err("expected x,y"))?;
                        set.insert((element(a)?, element(b)?));
                    }
                    i.roles.insert(name, set);
                }
                "individual" => {
                    let e = element(words.next().ok_or_else(|| err("expected an element"))?)?;
                    i.individuals.insert(name, e);
                }
                _ => return Err(err("unknown record")),
            }
        }
        out.ok_or(FormatError {
            line: 0,
            message: "missing domain line".into(),
        })
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "domain {}", self.domain_size)?;
        for (a, ext) in &self.atoms {
            write!(f, "atom {a}")?;
            for e in ext {
                write!(f, " {e}")?;
            }
            writeln!(f)?;
        }
        for (r, pairs) in &self.roles {
            write!(f, "role {r}")?;
            for (x, y) in pairs {
                write!(f, " {x},{y}")?;
            }
            writeln!(f)?;
        }
        for (a, e) in &self.individuals {
            writeln!(f, "individual {a} {e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

/// Extension of `c` in `i`.
pub fn eval_concept(i: &Interpretation, c: &Concept) -> Result<BTreeSet<Element>, SignatureError> {
    Ok(i.eval(c)?
        .into_iter()
        .enumerate()
        .filter_map(|(e, b)| b.then_some(e))
        .collect())
}

/// What a model is checked against.
#[derive(Clone, Copy, Debug)]
pub enum Target<'a> {
    Problem(&'a ReducedProblem),
    Kb(&'a KnowledgeBase),
}

impl<'a> From<&'a ReducedProblem> for Target<'a> {
    fn from(p: &'a ReducedProblem) -> Self {
        Target::Problem(p)
    }
}

impl<'a> From<&'a KnowledgeBase> for Target<'a> {
    fn from(kb: &'a KnowledgeBase) -> Self {
        Target::Kb(kb)
    }
}

impl<'a> Target<'a> {
    pub fn rbox(&self) -> &'a RoleBox {
        match self {
            Target::Problem(p) => p.rbox(),
            Target::Kb(kb) => kb.rbox(),
        }
    }

    pub fn tbox(&self) -> &'a [Gci] {
        match self {
            Target::Problem(_) => &[],
            Target::Kb(kb) => kb.tbox(),
        }
    }

    pub fn abox(&self) -> &'a [Assertion] {
        match self {
            Target::Problem(p) => p.abox(),
            Target::Kb(kb) => kb.abox(),
        }
    }

    pub fn individuals(&self) -> &'a [Name] {
        match self {
            Target::Problem(p) => p.individuals(),
            Target::Kb(kb) => kb.individuals(),
        }
    }

    /// Concept names used by the terminology and the ABox.
    pub fn atoms(&self) -> BTreeSet<Name> {
        match self {
            Target::Problem(p) => p.atoms(),
            Target::Kb(kb) => kb.atoms(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyDomain,
    Signature(SignatureError),
    NotTransitive {
        role: Name,
        pair: (Element, Element),
        via: Element,
    },
    Inclusion {
        sub: Role,
        sup: Role,
        pair: (Element, Element),
    },
    Gci {
        index: usize,
        element: Element,
    },
    Instance {
        individual: Name,
        concept: Concept,
    },
    Relation {
        a: Name,
        b: Name,
        role: Role,
    },
    Distinct {
        a: Name,
        b: Name,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyDomain => write!(f, "empty domain"),
            Violation::Signature(e) => write!(f, "{e}"),
            Violation::NotTransitive { role, pair, via } => write!(
                f,
                "transitive role {role} has ({},{via}) and ({via},{}) but not ({},{})",
                pair.0, pair.1, pair.0, pair.1
            ),
            Violation::Inclusion { sub, sup, pair } => {
                write!(f, "({},{}) in {sub} but not in {sup}", pair.0, pair.1)
            }
            Violation::Gci { index, element } => {
                write!(f, "element {element} violates inclusion #{index}")
            }
            Violation::Instance {
                individual,
                concept,
            } => write!(f, "{individual} is not an instance of {concept}"),
            Violation::Relation { a, b, role } => write!(f, "({a},{b}) not in {role}"),
            Violation::Distinct { a, b } => write!(f, "{a} and {b} denote the same element"),
        }
    }
}

/// Result of [`check_model`]; empty means the interpretation is a model.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModelReport {
    pub violations: Vec<Violation>,
}

impl ModelReport {
    pub fn is_model(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ModelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "model");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks the role box, every inclusion of the terminology and every
/// assertion of the ABox.
pub fn check_model<'a>(i: &Interpretation, target: impl Into<Target<'a>>) -> ModelReport {
    let target = target.into();
    let mut report = ModelReport::default();
    let v = &mut report.violations;
    if i.domain_size == 0 {
        v.push(Violation::EmptyDomain);
    }
    let rbox = target.rbox();

    for name in rbox.transitive_names() {
        let Some(pairs) = i.roles.get(name) else {
            v.push(Violation::Signature(SignatureError::UnknownRole(
                name.to_string(),
            )));
            continue;
        };
        'outer: for &(x, y) in pairs {
            for &(y2, z) in pairs.range((y, 0)..=(y, usize::MAX)) {
                debug_assert_eq!(y2, y);
                if !pairs.contains(&(x, z)) {
                    v.push(Violation::NotTransitive {
                        role: name.clone(),
                        pair: (x, z),
                        via: y,
                    });
                    break 'outer;
                }
            }
        }
    }

    for (sub, sup) in rbox.declared_inclusions() {
        match (i.role_pairs(sub), i.role_pairs(sup)) {
            (Ok(a), Ok(b)) => {
                if let Some(&pair) = a.difference(&b).next() {
                    v.push(Violation::Inclusion {
                        sub: sub.clone(),
                        sup: sup.clone(),
                        pair,
                    });
                }
            }
            (Err(e), _) | (_, Err(e)) => v.push(Violation::Signature(e)),
        }
    }

    for (index, gci) in target.tbox().iter().enumerate() {
        let c = nnf(&Concept::or(Concept::not(gci.sub.clone()), gci.sup.clone()));
        match i.eval(&c) {
            Ok(ext) => {
                if let Some(element) = ext.iter().position(|b| !b) {
                    v.push(Violation::Gci { index, element });
                }
            }
            Err(e) => v.push(Violation::Signature(e)),
        }
    }

    let lookup = |a: &Name| {
        i.individuals
            .get(a)
            .copied()
            .ok_or_else(|| SignatureError::UnknownIndividual(a.to_string()))
    };
    for assertion in target.abox() {
        let result = match assertion {
            Assertion::Instance(a, c) => lookup(a).and_then(|x| {
                Ok((!i.eval(c)?[x]).then(|| Violation::Instance {
                    individual: a.clone(),
                    concept: c.clone(),
                }))
            }),
            Assertion::Related(a, b, r) => lookup(a).and_then(|x| {
                let y = lookup(b)?;
                Ok((!i.role_pairs(r)?.contains(&(x, y))).then(|| Violation::Relation {
                    a: a.clone(),
                    b: b.clone(),
                    role: r.clone(),
                }))
            }),
            Assertion::Distinct(a, b) => lookup(a).and_then(|x| {
                Ok((x == lookup(b)?).then(|| Violation::Distinct {
                    a: a.clone(),
                    b: b.clone(),
                }))
            }),
        };
        match result {
            Ok(Some(violation)) => v.push(violation),
            Ok(None) => {}
            Err(e) => v.push(Violation::Signature(e)),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_elements() -> Interpretation {
        let mut i = Interpretation::new(2);
        i.atoms.insert("A".into(), [1].into());
        i.roles.insert("R".into(), [(0, 1)].into());
        i
    }

    fn r() -> Role {
        Role::named("R")
    }

    #[test]
    fn exists_extension() {
        let i = two_elements();
        let c = Concept::exists(r(), Concept::atom("A"));
        assert_eq!(eval_concept(&i, &c).unwrap(), [0].into());
    }

    #[test]
    fn at_most_zero_extension() {
        let i = two_elements();
        let c = Concept::at_most(0, r(), Concept::atom("A"));
        assert_eq!(eval_concept(&i, &c).unwrap(), [1].into());
    }

    #[test]
    fn excluded_middle_is_whole_domain() {
        let i = two_elements();
        let a = Concept::atom("A");
        let c = Concept::or(a.clone(), Concept::not(a));
        assert_eq!(eval_concept(&i, &c).unwrap(), [0, 1].into());
    }

    #[test]
    fn inverse_role_flips_pairs() {
        let i = two_elements();
        let c = Concept::exists(Role::inverse_of("R"), Concept::top());
        assert_eq!(eval_concept(&i, &c).unwrap(), [1].into());
    }

    #[test]
    fn unknown_symbols_are_signature_errors() {
        let i = two_elements();
        assert_eq!(
            eval_concept(&i, &Concept::atom("B")),
            Err(SignatureError::UnknownAtom("B".into()))
        );
        assert_eq!(
            eval_concept(&i, &Concept::exists(Role::named("S"), Concept::top())),
            Err(SignatureError::UnknownRole("S".into()))
        );
    }

    fn kb(rbox: RoleBox, abox: Vec<Assertion>) -> KnowledgeBase {
        KnowledgeBase::new(vec![], rbox, abox).unwrap()
    }

    #[test]
    fn one_element_model() {
        let mut i = Interpretation::new(1);
        i.atoms.insert("A".into(), [0].into());
        i.individuals.insert("a".into(), 0);
        let k = kb(
            RoleBox::default(),
            vec![Assertion::instance("a", Concept::atom("A"))],
        );
        assert!(check_model(&i, &k).is_model());
    }

    #[test]
    fn identified_distinct_individuals_are_reported() {
        let mut i = Interpretation::new(1);
        i.individuals.insert("a".into(), 0);
        i.individuals.insert("b".into(), 0);
        let k = kb(RoleBox::default(), vec![Assertion::distinct("a", "b")]);
        let report = check_model(&i, &k);
        assert_eq!(
            report.violations,
            vec![Violation::Distinct {
                a: "a".into(),
                b: "b".into()
            }]
        );
    }

    #[test]
    fn non_transitive_valuation_is_reported() {
        let mut i = Interpretation::new(3);
        i.roles.insert("R".into(), [(0, 1), (1, 2)].into());
        let k = kb(RoleBox::new(["R"], vec![], ["R"]), vec![]);
        let report = check_model(&i, &k);
        assert!(matches!(
            report.violations[..],
            [Violation::NotTransitive { pair: (0, 2), .. }]
        ));
    }

    #[test]
    fn gci_and_inclusion_violations() {
        let mut i = two_elements();
        i.roles.insert("S".into(), BTreeSet::new());
        let k = KnowledgeBase::new(
            vec![Gci::new(Concept::top(), Concept::atom("A"))],
            RoleBox::new(["R", "S"], vec![(r(), Role::named("S"))], Vec::<Name>::new()),
            vec![],
        )
        .unwrap();
        let report = check_model(&i, &k);
        assert_eq!(report.violations.len(), 2);
    }

    #[test]
    fn text_round_trip() {
        let mut i = two_elements();
        i.individuals.insert("a".into(), 0);
        let text = i.to_text();
        assert_eq!(
            text,
            "domain 2\natom A 1\nrole R 0,1\nindividual a 0\n"
        );
        assert_eq!(Interpretation::from_text(&text).unwrap(), i);
    }

    #[test]
    fn text_errors_carry_line_numbers() {
        let err = Interpretation::from_text("domain 2\natom A 5\n").unwrap_err();
        assert_eq!(err.line, 2);
    }
}

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::engine::{Blocking, CompletionForest, NodeId};
use crate::reduction::ReducedProblem;
use crate::syntax::{neg_nnf, Assertion, Concept, Name, Role};

/// A finite candidate tableau: labelled elements `0..len`, role edges and
/// the individual mapping.
///
/// Elements in `frontier` stand for truncated paths; their existential
/// witnesses may lie beyond the truncation and are not demanded.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TableauStructure {
    pub labels: Vec<BTreeSet<Concept>>,
    /// Edges per role; a missing role has no edges.
    pub edges: BTreeMap<Role, BTreeSet<(usize, usize)>>,
    pub individuals: BTreeMap<Name, usize>,
    pub frontier: BTreeSet<usize>,
}

impl TableauStructure {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn pairs(&self, r: &Role) -> &BTreeSet<(usize, usize)> {
        static EMPTY: BTreeSet<(usize, usize)> = BTreeSet::new();
        self.edges.get(r).unwrap_or(&EMPTY)
    }

    fn successors<'a>(&'a self, s: usize, r: &Role) -> impl Iterator<Item = usize> + 'a {
        self.pairs(r)
            .range((s, 0)..=(s, usize::MAX))
            .map(|&(_, t)| t)
    }
}

/// A violated tableau condition. `condition` is the number of the
/// condition, or 0 for a structural defect such as a label outside the
/// closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableauViolation {
    pub condition: u8,
    pub element: Option<usize>,
    pub detail: String,
}

impl fmt::Display for TableauViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.condition == 0 {
            write!(f, "structure")?;
        } else {
            write!(f, "P{}", self.condition)?;
        }
        if let Some(e) = self.element {
            write!(f, " at s{e}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

/// Checks all fourteen tableau conditions and returns the violation with
/// the lowest condition number.
pub fn check_tableau(t: &TableauStructure, problem: &ReducedProblem) -> Result<(), TableauViolation> {
    let mut found: Option<TableauViolation> = None;
    let mut report = |condition: u8, element: Option<usize>, detail: String| {
        if found.as_ref().is_none_or(|v| condition < v.condition) {
            found = Some(TableauViolation {
                condition,
                element,
                detail,
            });
        }
    };
    let rbox = problem.rbox();
    let roles = rbox.roles();
    let closure = problem.closure();

    if t.is_empty() {
        report(0, None, "no elements".into());
    }
    for r in t.edges.keys() {
        if !rbox.contains(r.name()) {
            report(0, None, format!("role {r} outside the signature"));
        }
    }
    for (s, label) in t.labels.iter().enumerate() {
        let has = |t_: usize, c: &Concept| t.labels[t_].contains(c);
        for c in label {
            if !closure.contains(c) {
                report(0, Some(s), format!("{c} is not in the closure"));
                continue;
            }
            if label.contains(&neg_nnf(c)) {
                report(1, Some(s), format!("both {c} and its negation"));
            }
            match c {
                Concept::And(a, b) => {
                    if !label.contains(&**a) || !label.contains(&**b) {
                        report(2, Some(s), format!("{c} without both conjuncts"));
                    }
                }
                Concept::Or(a, b) => {
                    if !label.contains(&**a) && !label.contains(&**b) {
                        report(3, Some(s), format!("{c} without a disjunct"));
                    }
                }
                Concept::Forall(sr, d) => {
                    if let Some(u) = t.successors(s, sr).find(|&u| !has(u, d)) {
                        report(4, Some(s), format!("{c} but s{u} lacks {d}"));
                    }
                    for r in &roles {
                        if rbox.is_transitive(r).unwrap_or(false)
                            && rbox.subsumes_role(r, sr).unwrap_or(false)
                        {
                            let need = Concept::forall(r.clone(), (**d).clone());
                            if let Some(u) = t.successors(s, r).find(|&u| !has(u, &need)) {
                                report(6, Some(s), format!("{c} but s{u} lacks {need}"));
                            }
                        }
                    }
                }
                Concept::Exists(sr, d) => {
                    if !t.frontier.contains(&s) && !t.successors(s, sr).any(|u| has(u, d)) {
                        report(5, Some(s), format!("{c} has no witness"));
                    }
                }
                Concept::AtMost(n, sr, d) | Concept::AtLeast(n, sr, d) => {
                    let count = t.successors(s, sr).filter(|&u| has(u, d)).count();
                    let at_most = matches!(c, Concept::AtMost(..));
                    if at_most && count > *n as usize {
                        report(9, Some(s), format!("{c} with {count} successors"));
                    }
                    if !at_most && count < *n as usize && !t.frontier.contains(&s) {
                        report(10, Some(s), format!("{c} with {count} successors"));
                    }
                    let neg = neg_nnf(d);
                    if let Some(u) = t.successors(s, sr).find(|&u| !has(u, d) && !has(u, &neg)) {
                        report(11, Some(s), format!("{c} but s{u} holds neither {d} nor {neg}"));
                    }
                }
                _ => {}
            }
        }
    }

    for r in &roles {
        let inv = r.inv();
        for &(x, y) in t.pairs(r) {
            if !t.pairs(&inv).contains(&(y, x)) {
                report(7, Some(x), format!("(s{x},s{y}) in {r} but not reversed in {inv}"));
            }
        }
        for s in &roles {
            if rbox.subsumes_role(r, s).unwrap_or(false) {
                if let Some(&(x, y)) = t.pairs(r).difference(t.pairs(s)).next() {
                    report(8, Some(x), format!("(s{x},s{y}) in {r} but not in {s}"));
                }
            }
        }
    }

    for a in problem.individuals() {
        if !t.individuals.contains_key(a) {
            report(0, None, format!("individual {a} is not mapped"));
        }
    }
    let elem = |a: &Name| t.individuals.get(a).copied();
    for assertion in problem.abox() {
        match assertion {
            Assertion::Instance(a, c) => {
                if let Some(x) = elem(a) {
                    if !t.labels[x].contains(c) {
                        report(12, Some(x), format!("{a} : {c} not in the label"));
                    }
                }
            }
            Assertion::Related(a, b, r) => {
                if let (Some(x), Some(y)) = (elem(a), elem(b)) {
                    if !t.pairs(r).contains(&(x, y)) {
                        report(13, Some(x), format!("({a},{b}) : {r} has no edge"));
                    }
                }
            }
            Assertion::Distinct(a, b) => {
                if let (Some(x), Some(y)) = (elem(a), elem(b)) {
                    if x == y {
                        report(14, Some(x), format!("{a} and {b} share an element"));
                    }
                }
            }
        }
    }
    found.map_or(Ok(()), Err)
}

/// The path unravelling of a complete, clash-free forest, truncated at path
/// length `k`.
///
/// Elements are paths of `(node, twin)` pairs starting at a live root; a
/// blocked successor `y` with blocker `z` continues the path as `(z, y)`.
/// Paths of length `k` form the frontier.
pub fn unravel_bounded(f: &CompletionForest, k: usize) -> TableauStructure {
    let tables = f.tables();
    let rbox = tables.rbox();
    let blocking = f.blocking_table();
    let role_count = tables.role_count();

    let mut paths: Vec<Vec<(NodeId, NodeId)>> = Vec::new();
    let mut root_element: BTreeMap<NodeId, usize> = BTreeMap::new();
    for x in f.node_ids() {
        if f.is_root(x) && f.merged_into(x).is_none() {
            root_element.insert(x, paths.len());
            paths.push(vec![(x, x)]);
        }
    }

    let mut edges: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); role_count];
    let mut frontier = BTreeSet::new();
    let mut next = 0;
    while next < paths.len() {
        let p = next;
        next += 1;
        if paths[p].len() - 1 == k {
            frontier.insert(p);
            continue;
        }
        let tail = paths[p].last().expect("non-empty path").0;
        for (y, label) in f.out_edges(tail) {
            if label.is_empty() || f.is_root(y) {
                continue;
            }
            let pair = match blocking[y.index()] {
                Blocking::Unblocked => (y, y),
                Blocking::Direct(z) => (z, y),
                Blocking::Indirect => continue,
            };
            let q = paths.len();
            let mut path = paths[p].clone();
            path.push(pair);
            paths.push(path);
            for r in 0..role_count {
                if label.iter().any(|&l| tables.sub_role(l, r)) {
                    edges[r].insert((p, q));
                    edges[r ^ 1].insert((q, p));
                }
            }
        }
    }

    for (&x, &px) in &root_element {
        for r in 0..role_count {
            for y in f.neighbours(x, r) {
                if let Some(&py) = root_element.get(&y) {
                    edges[r].insert((px, py));
                }
            }
        }
    }

    let labels = paths
        .iter()
        .map(|p| {
            let tail = p.last().expect("non-empty path").0;
            f.label(tail).map(|c| tables.concept(c).clone()).collect()
        })
        .collect();
    let individuals = f
        .individuals
        .keys()
        .filter_map(|a| {
            let x = f.node_of(a)?;
            Some((a.clone(), *root_element.get(&x)?))
        })
        .collect();
    TableauStructure {
        labels,
        edges: edges
            .into_iter()
            .enumerate()
            .filter(|(_, e)| !e.is_empty())
            .map(|(r, e)| (rbox.role_at(r), e))
            .collect(),
        individuals,
        frontier,
    }
}

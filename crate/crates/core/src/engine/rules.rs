//! Expansion rules: guards, priority order and application.

use std::fmt;

use super::forest::{Blocking, CompletionForest, NodeId};
use super::tables::{ConceptId, Kind};

/// Expansion rules in priority order: merges first, generating rules last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleKind {
    MergeRoot,
    Merge,
    Conj,
    Forall,
    ForallPlus,
    Choose,
    Disj,
    AtLeast,
    Exists,
}

impl RuleKind {
    pub const ALL: [RuleKind; 9] = [
        RuleKind::MergeRoot,
        RuleKind::Merge,
        RuleKind::Conj,
        RuleKind::Forall,
        RuleKind::ForallPlus,
        RuleKind::Choose,
        RuleKind::Disj,
        RuleKind::AtLeast,
        RuleKind::Exists,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::MergeRoot => "le-root",
            RuleKind::Merge => "le",
            RuleKind::Conj => "and",
            RuleKind::Forall => "all",
            RuleKind::ForallPlus => "all-plus",
            RuleKind::Choose => "choose",
            RuleKind::Disj => "or",
            RuleKind::AtLeast => "ge",
            RuleKind::Exists => "exists",
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One applicable rule at a node, triggered by `concept ∈ L(node)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleInstance {
    MergeRoot {
        node: NodeId,
        concept: ConceptId,
        /// Eligible `(y, z)` pairs: `y` is merged into `z`.
        pairs: Vec<(NodeId, NodeId)>,
    },
    Merge {
        node: NodeId,
        concept: ConceptId,
        pairs: Vec<(NodeId, NodeId)>,
    },
    Conj {
        node: NodeId,
        concept: ConceptId,
    },
    Forall {
        node: NodeId,
        concept: ConceptId,
        target: NodeId,
    },
    ForallPlus {
        node: NodeId,
        concept: ConceptId,
        target: NodeId,
        /// The `∀R.C` added to the target.
        added: ConceptId,
    },
    Choose {
        node: NodeId,
        concept: ConceptId,
        target: NodeId,
    },
    Disj {
        node: NodeId,
        concept: ConceptId,
    },
    AtLeast {
        node: NodeId,
        concept: ConceptId,
    },
    Exists {
        node: NodeId,
        concept: ConceptId,
    },
}

/// One way of resolving a nondeterministic rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Alternative {
    Add { node: NodeId, concept: ConceptId },
    MergeTree { x: NodeId, y: NodeId, z: NodeId },
    MergeRoots { y: NodeId, z: NodeId },
}

impl RuleInstance {
    pub fn kind(&self) -> RuleKind {
        match self {
            RuleInstance::MergeRoot { .. } => RuleKind::MergeRoot,
            RuleInstance::Merge { .. } => RuleKind::Merge,
            RuleInstance::Conj { .. } => RuleKind::Conj,
            RuleInstance::Forall { .. } => RuleKind::Forall,
            RuleInstance::ForallPlus { .. } => RuleKind::ForallPlus,
            RuleInstance::Choose { .. } => RuleKind::Choose,
            RuleInstance::Disj { .. } => RuleKind::Disj,
            RuleInstance::AtLeast { .. } => RuleKind::AtLeast,
            RuleInstance::Exists { .. } => RuleKind::Exists,
        }
    }

    pub fn node(&self) -> NodeId {
        match *self {
            RuleInstance::MergeRoot { node, .. }
            | RuleInstance::Merge { node, .. }
            | RuleInstance::Conj { node, .. }
            | RuleInstance::Forall { node, .. }
            | RuleInstance::ForallPlus { node, .. }
            | RuleInstance::Choose { node, .. }
            | RuleInstance::Disj { node, .. }
            | RuleInstance::AtLeast { node, .. }
            | RuleInstance::Exists { node, .. } => node,
        }
    }

    pub fn concept(&self) -> ConceptId {
        match *self {
            RuleInstance::MergeRoot { concept, .. }
            | RuleInstance::Merge { concept, .. }
            | RuleInstance::Conj { concept, .. }
            | RuleInstance::Forall { concept, .. }
            | RuleInstance::ForallPlus { concept, .. }
            | RuleInstance::Choose { concept, .. }
            | RuleInstance::Disj { concept, .. }
            | RuleInstance::AtLeast { concept, .. }
            | RuleInstance::Exists { concept, .. } => concept,
        }
    }

    pub fn is_branching(&self) -> bool {
        matches!(
            self,
            RuleInstance::MergeRoot { .. }
                | RuleInstance::Merge { .. }
                | RuleInstance::Choose { .. }
                | RuleInstance::Disj { .. }
        )
    }

    /// Alternatives of a branching rule in their default order; empty for
    /// deterministic rules.
    pub fn alternatives(&self, f: &CompletionForest) -> Vec<Alternative> {
        let tables = f.tables();
        match *self {
            RuleInstance::Disj { node, concept } => {
                let Kind::Or(a, b) = tables.kinds[concept] else {
                    unreachable!("disjunction rule on non-disjunction")
                };
                vec![
                    Alternative::Add { node, concept: a },
                    Alternative::Add { node, concept: b },
                ]
            }
            RuleInstance::Choose {
                concept, target, ..
            } => {
                let filler = restriction_filler(f, concept);
                vec![
                    Alternative::Add {
                        node: target,
                        concept: filler,
                    },
                    Alternative::Add {
                        node: target,
                        concept: tables.negation(filler),
                    },
                ]
            }
            RuleInstance::Merge { node, ref pairs, .. } => pairs
                .iter()
                .map(|&(y, z)| Alternative::MergeTree { x: node, y, z })
                .collect(),
            RuleInstance::MergeRoot { ref pairs, .. } => pairs
                .iter()
                .map(|&(y, z)| Alternative::MergeRoots { y, z })
                .collect(),
            _ => Vec::new(),
        }
    }
}

fn restriction_filler(f: &CompletionForest, concept: ConceptId) -> ConceptId {
    match f.tables().kinds[concept] {
        Kind::AtLeast(_, _, c) | Kind::AtMost(_, _, c) => c,
        _ => unreachable!("choose rule on non-restriction"),
    }
}

/// Applies one resolved alternative.
pub fn apply_alternative(f: &mut CompletionForest, alt: Alternative) {
    match alt {
        Alternative::Add { node, concept } => f.add_concept(node, concept),
        Alternative::MergeTree { x, y, z } => f.merge_into_neighbour(x, y, z),
        Alternative::MergeRoots { y, z } => f.merge_roots(y, z),
    }
}

/// Applies a deterministic rule and returns the nodes it created.
pub fn apply_deterministic(f: &mut CompletionForest, inst: &RuleInstance) -> Vec<NodeId> {
    let tables = f.tables().clone();
    match *inst {
        RuleInstance::Conj { node, concept } => {
            let Kind::And(a, b) = tables.kinds[concept] else {
                unreachable!()
            };
            f.add_concept(node, a);
            f.add_concept(node, b);
            Vec::new()
        }
        RuleInstance::Forall {
            concept, target, ..
        } => {
            let Kind::Forall(_, c) = tables.kinds[concept] else {
                unreachable!()
            };
            f.add_concept(target, c);
            Vec::new()
        }
        RuleInstance::ForallPlus { target, added, .. } => {
            f.add_concept(target, added);
            Vec::new()
        }
        RuleInstance::Exists { node, concept } => {
            let Kind::Exists(s, c) = tables.kinds[concept] else {
                unreachable!()
            };
            vec![f.create_child(node, s, c)]
        }
        RuleInstance::AtLeast { node, concept } => {
            let Kind::AtLeast(n, s, c) = tables.kinds[concept] else {
                unreachable!()
            };
            let fresh: Vec<NodeId> = (0..n).map(|_| f.create_child(node, s, c)).collect();
            for (i, &a) in fresh.iter().enumerate() {
                for &b in &fresh[i + 1..] {
                    f.set_distinct(a, b);
                }
            }
            fresh
        }
        _ => panic!("apply_deterministic called on branching rule {:?}", inst.kind()),
    }
}

/// Highest-priority applicable rule, or `None` when the forest is complete.
/// Within one rule the lowest node id wins, then the lowest concept id.
pub fn applicable_rule(f: &CompletionForest) -> Option<RuleInstance> {
    let blocking = f.blocking_table();
    let mut best: Option<RuleInstance> = None;
    let consider = |inst: RuleInstance, best: &mut Option<RuleInstance>| {
        if best.as_ref().is_none_or(|b| inst.kind() < b.kind()) {
            *best = Some(inst);
        }
    };
    for x in f.node_ids() {
        let status = blocking[x.index()];
        for c in f.label(x) {
            for inst in rules_at(f, x, c, status) {
                consider(inst, &mut best);
            }
            if matches!(best, Some(RuleInstance::MergeRoot { .. })) {
                return best;
            }
        }
    }
    best
}

/// All rule instances triggered by `c ∈ L(x)`, at most one per rule kind.
fn rules_at(f: &CompletionForest, x: NodeId, c: ConceptId, status: Blocking) -> Vec<RuleInstance> {
    let tables = f.tables();
    let indirect = status.is_indirect();
    let blocked = status.is_blocked();
    let mut out = Vec::new();
    match tables.kinds[c] {
        Kind::Atom | Kind::NegAtom => {}
        Kind::And(a, b) => {
            if !indirect && !(f.has(x, a) && f.has(x, b)) {
                out.push(RuleInstance::Conj {
                    node: x,
                    concept: c,
                });
            }
        }
        Kind::Or(a, b) => {
            if !indirect && !f.has(x, a) && !f.has(x, b) {
                out.push(RuleInstance::Disj {
                    node: x,
                    concept: c,
                });
            }
        }
        Kind::Forall(s, filler) => {
            if indirect {
                return out;
            }
            if let Some(y) = f.neighbours_iter(x, s).find(|&y| !f.has(y, filler)) {
                out.push(RuleInstance::Forall {
                    node: x,
                    concept: c,
                    target: y,
                });
            }
            'plus: for &(r, added) in &tables.forall_plus[c] {
                for y in f.neighbours_iter(x, r) {
                    if !f.has(y, added) {
                        out.push(RuleInstance::ForallPlus {
                            node: x,
                            concept: c,
                            target: y,
                            added,
                        });
                        break 'plus;
                    }
                }
            }
        }
        Kind::Exists(s, filler) => {
            if !blocked && !f.neighbours_iter(x, s).any(|y| f.has(y, filler)) {
                out.push(RuleInstance::Exists {
                    node: x,
                    concept: c,
                });
            }
        }
        Kind::AtLeast(n, s, filler) => {
            if let Some(inst) = choose_at(f, x, c, s, filler, indirect) {
                out.push(inst);
            }
            if !blocked && n > 0 {
                let cands: Vec<NodeId> = f.count_set(x, s, filler).into_iter().collect();
                if f.has_distinct_subset(&cands, n as usize).is_none() {
                    out.push(RuleInstance::AtLeast {
                        node: x,
                        concept: c,
                    });
                }
            }
        }
        Kind::AtMost(n, s, filler) => {
            if let Some(inst) = choose_at(f, x, c, s, filler, indirect) {
                out.push(inst);
            }
            let cands: Vec<NodeId> = f.count_set(x, s, filler).into_iter().collect();
            if cands.len() > n as usize {
                let pairs = |eligible: &dyn Fn(NodeId, NodeId) -> bool| -> Vec<(NodeId, NodeId)> {
                    let mut v = Vec::new();
                    for &y in &cands {
                        for &z in &cands {
                            if y != z && !f.distinct(y, z) && eligible(y, z) {
                                v.push((y, z));
                            }
                        }
                    }
                    v
                };
                let root_pairs = pairs(&|y, z| f.is_root(y) && f.is_root(z));
                if !root_pairs.is_empty() {
                    out.push(RuleInstance::MergeRoot {
                        node: x,
                        concept: c,
                        pairs: root_pairs,
                    });
                }
                if !indirect {
                    let tree_pairs = pairs(&|y, z| f.parent(y) == Some(x) && !f.is_tree_ancestor(y, z));
                    if !tree_pairs.is_empty() {
                        out.push(RuleInstance::Merge {
                            node: x,
                            concept: c,
                            pairs: tree_pairs,
                        });
                    }
                }
            }
        }
    }
    out
}

fn choose_at(
    f: &CompletionForest,
    x: NodeId,
    c: ConceptId,
    s: usize,
    filler: ConceptId,
    indirect: bool,
) -> Option<RuleInstance> {
    if indirect {
        return None;
    }
    let neg = f.tables().negation(filler);
    f.neighbours_iter(x, s)
        .find(|&y| !f.has(y, filler) && !f.has(y, neg))
        .map(|y| RuleInstance::Choose {
            node: x,
            concept: c,
            target: y,
        })
}

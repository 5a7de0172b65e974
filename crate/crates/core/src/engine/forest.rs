//! The completion forest: labelled nodes and edges plus `≠`/`≐` relations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::tables::{ConceptId, RoleId, Tables};
use crate::reduction::ReducedProblem;
use crate::syntax::{Assertion, Concept, Name, Role};

/// Node identifier; ids are handed out in creation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

pub type RoleSet = BTreeSet<RoleId>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// Root standing for the listed individuals.
    Root(Vec<Name>),
    Tree,
}

#[derive(Clone, Debug)]
pub(crate) struct Node {
    pub(crate) label: FixedBitSet,
    pub(crate) kind: NodeKind,
    pub(crate) parent: Option<NodeId>,
    pub(crate) out: BTreeMap<NodeId, RoleSet>,
    pub(crate) inc: BTreeSet<NodeId>,
    pub(crate) depth: usize,
    /// Nodes created by generating rules applied at this node.
    pub(crate) generated: usize,
    /// Set on roots emptied by the root-merge rule.
    pub(crate) merged_into: Option<NodeId>,
}

/// Blocking state of a node, recomputed from current labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Blocking {
    Unblocked,
    /// Directly blocked; the payload is the blocking ancestor.
    Direct(NodeId),
    Indirect,
}

impl Blocking {
    pub fn is_blocked(self) -> bool {
        !matches!(self, Blocking::Unblocked)
    }

    pub fn is_indirect(self) -> bool {
        matches!(self, Blocking::Indirect)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClashReport {
    /// `{A, ¬A} ⊆ L(x)`.
    Atom { node: NodeId, atom: Name },
    /// `≤n S.C ∈ L(x)` with `n+1` pairwise-distinct `S`-neighbours carrying `C`.
    AtMost {
        node: NodeId,
        concept: ConceptId,
        witnesses: Vec<NodeId>,
    },
    /// The ABox asserted `a ≠ a`.
    SelfInequality { individual: Name },
}

#[derive(Clone, Debug)]
pub struct CompletionForest {
    pub(crate) tables: Arc<Tables>,
    pub(crate) nodes: Vec<Node>,
    pub(crate) neq: BTreeSet<(NodeId, NodeId)>,
    pub(crate) eq: BTreeSet<(NodeId, NodeId)>,
    pub(crate) individuals: BTreeMap<Name, NodeId>,
    pub(crate) self_distinct: Option<Name>,
}

fn ordered(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl CompletionForest {
    /// The initial forest: one root per individual labelled with its
    /// concepts, root edges from role assertions, `≠` from inequality
    /// assertions and an empty `≐`.
    pub fn init(tables: Arc<Tables>, problem: &ReducedProblem) -> Self {
        let m = tables.closure_size();
        let mut forest = CompletionForest {
            tables,
            nodes: Vec::new(),
            neq: BTreeSet::new(),
            eq: BTreeSet::new(),
            individuals: BTreeMap::new(),
            self_distinct: None,
        };
        for (i, ind) in problem.individuals().iter().enumerate() {
            forest.nodes.push(Node {
                label: FixedBitSet::with_capacity(m),
                kind: NodeKind::Root(vec![ind.clone()]),
                parent: None,
                out: BTreeMap::new(),
                inc: BTreeSet::new(),
                depth: 0,
                generated: 0,
                merged_into: None,
            });
            forest.individuals.insert(ind.clone(), NodeId(i as u32));
        }
        for a in problem.abox() {
            match a {
                Assertion::Instance(ind, c) => {
                    let x = forest.individuals[ind];
                    let id = forest.tables.id_of(c).expect("assertion concept in closure");
                    forest.nodes[x.index()].label.insert(id);
                }
                Assertion::Related(a, b, r) => {
                    let (x, y) = (forest.individuals[a], forest.individuals[b]);
                    let rid = forest.tables.role_id(r).expect("role in signature");
                    forest.add_edge_roles(x, y, [rid]);
                }
                Assertion::Distinct(a, b) => {
                    let (x, y) = (forest.individuals[a], forest.individuals[b]);
                    if x == y {
                        forest.self_distinct.get_or_insert_with(|| a.clone());
                    } else {
                        forest.neq.insert(ordered(x, y));
                    }
                }
            }
        }
        forest
    }

    pub fn tables(&self) -> &Arc<Tables> {
        &self.tables
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn is_root(&self, x: NodeId) -> bool {
        matches!(self.nodes[x.index()].kind, NodeKind::Root(_))
    }

    pub fn kind(&self, x: NodeId) -> &NodeKind {
        &self.nodes[x.index()].kind
    }

    pub fn parent(&self, x: NodeId) -> Option<NodeId> {
        self.nodes[x.index()].parent
    }

    /// Edges from the root of `x`'s tree; 0 for roots.
    pub fn depth(&self, x: NodeId) -> usize {
        self.nodes[x.index()].depth
    }

    pub fn generated(&self, x: NodeId) -> usize {
        self.nodes[x.index()].generated
    }

    /// Root emptied by a root merge, with the node it was merged into.
    pub fn merged_into(&self, x: NodeId) -> Option<NodeId> {
        self.nodes[x.index()].merged_into
    }

    pub fn has(&self, x: NodeId, c: ConceptId) -> bool {
        self.nodes[x.index()].label.contains(c)
    }

    /// Label ids in concept order.
    pub fn label(&self, x: NodeId) -> impl Iterator<Item = ConceptId> + '_ {
        self.nodes[x.index()].label.ones()
    }

    pub fn label_set(&self, x: NodeId) -> &FixedBitSet {
        &self.nodes[x.index()].label
    }

    pub fn label_concepts(&self, x: NodeId) -> Vec<&Concept> {
        self.label(x).map(|c| self.tables.concept(c)).collect()
    }

    pub fn edge_label(&self, x: NodeId, y: NodeId) -> Option<&RoleSet> {
        self.nodes[x.index()].out.get(&y)
    }

    /// Outgoing edges of `x` with their labels.
    pub fn out_edges(&self, x: NodeId) -> impl Iterator<Item = (NodeId, &RoleSet)> + '_ {
        self.nodes[x.index()].out.iter().map(|(y, l)| (*y, l))
    }

    /// Sources of incoming edges of `x`.
    pub fn in_edges(&self, x: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes[x.index()].inc.iter().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, &RoleSet)> + '_ {
        self.node_ids()
            .flat_map(move |x| self.out_edges(x).map(move |(y, l)| (x, y, l)))
    }

    pub fn inequalities(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.neq
    }

    pub fn equalities(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.eq
    }

    pub fn distinct(&self, x: NodeId, y: NodeId) -> bool {
        self.neq.contains(&ordered(x, y))
    }

    /// Root node currently standing for an individual, following `≐` from
    /// its original root to the live root it was merged into.
    pub fn node_of(&self, individual: &str) -> Option<NodeId> {
        let mut x = *self.individuals.get(individual)?;
        while let Some(z) = self.merged_into(x) {
            x = z;
        }
        Some(x)
    }

    /// Roots emptied by a merge are not live, nor are tree nodes below an
    /// edge emptied by the at-most rule.
    pub fn is_live(&self, x: NodeId) -> bool {
        if self.is_root(x) {
            return self.merged_into(x).is_none();
        }
        let mut cur = x;
        while let Some(p) = self.parent(cur) {
            if self.edge_label(p, cur).is_none_or(|l| l.is_empty()) {
                return false;
            }
            cur = p;
        }
        true
    }

    fn edge_has_sub_role(&self, label: &RoleSet, s: RoleId) -> bool {
        label.iter().any(|&r| self.tables.sub_role(r, s))
    }

    /// `S`-successors: targets of edges from `x` carrying some `R ⊑* S`.
    pub fn successors(&self, x: NodeId, s: RoleId) -> BTreeSet<NodeId> {
        self.nodes[x.index()]
            .out
            .iter()
            .filter(|(_, l)| self.edge_has_sub_role(l, s))
            .map(|(y, _)| *y)
            .collect()
    }

    /// `S`-neighbours: `S`-successors plus nodes `y` with an edge `⟨y,x⟩`
    /// carrying some `R ⊑* Inv(S)`.
    pub fn neighbours(&self, x: NodeId, s: RoleId) -> BTreeSet<NodeId> {
        self.neighbours_iter(x, s).collect()
    }

    /// [`CompletionForest::neighbours`] without collecting; a node linked in
    /// both directions may be yielded twice.
    pub(crate) fn neighbours_iter(
        &self,
        x: NodeId,
        s: RoleId,
    ) -> impl Iterator<Item = NodeId> + '_ {
        let node = &self.nodes[x.index()];
        let succ = node
            .out
            .iter()
            .filter(move |(_, l)| self.edge_has_sub_role(l, s))
            .map(|(y, _)| *y);
        let pred = node.inc.iter().copied().filter(move |&y| {
            self.edge_label(y, x)
                .is_some_and(|l| self.edge_has_sub_role(l, s ^ 1))
        });
        succ.chain(pred)
    }

    /// Role-typed form of [`CompletionForest::neighbours`].
    pub fn s_neighbours(&self, x: NodeId, s: &Role) -> BTreeSet<NodeId> {
        match self.tables.role_id(s) {
            Ok(sid) => self.neighbours(x, sid),
            Err(_) => BTreeSet::new(),
        }
    }

    /// `S^F(x, C)`: `S`-neighbours of `x` whose label holds `C`.
    pub fn count_set(&self, x: NodeId, s: RoleId, c: ConceptId) -> BTreeSet<NodeId> {
        let mut set = self.neighbours(x, s);
        set.retain(|y| self.has(*y, c));
        set
    }

    /// Whether `a` lies strictly above `b` on `b`'s chain of tree parents.
    pub fn is_tree_ancestor(&self, a: NodeId, b: NodeId) -> bool {
        let mut cur = self.parent(b);
        while let Some(p) = cur {
            if p == a {
                return true;
            }
            cur = self.parent(p);
        }
        false
    }

    /// Whether `candidates` contains `k` pairwise `≠`-related nodes.
    pub fn has_distinct_subset(&self, candidates: &[NodeId], k: usize) -> Option<Vec<NodeId>> {
        fn extend(
            f: &CompletionForest,
            cands: &[NodeId],
            start: usize,
            k: usize,
            chosen: &mut Vec<NodeId>,
        ) -> bool {
            if chosen.len() == k {
                return true;
            }
            for i in start..cands.len() {
                if cands.len() - i < k - chosen.len() {
                    break;
                }
                let y = cands[i];
                if chosen.iter().all(|&c| f.distinct(c, y)) {
                    chosen.push(y);
                    if extend(f, cands, i + 1, k, chosen) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            false
        }
        if k > candidates.len() {
            return None;
        }
        let mut chosen = Vec::with_capacity(k);
        extend(self, candidates, 0, k, &mut chosen).then_some(chosen)
    }

    /// Blocking state of every node, indexed by node id.
    ///
    /// Parents are always created before their children, so one pass in id
    /// order sees every parent's state first.
    pub fn blocking_table(&self) -> Vec<Blocking> {
        let mut table = vec![Blocking::Unblocked; self.nodes.len()];
        for x in self.node_ids() {
            let Some(p) = self.parent(x) else { continue };
            let edge = self.edge_label(p, x);
            if table[p.index()].is_blocked() || edge.is_none_or(|l| l.is_empty()) {
                table[x.index()] = Blocking::Indirect;
                continue;
            }
            let edge = edge.expect("checked above");
            let mut y = p;
            while !self.is_root(y) {
                let y_parent = self.parent(y).expect("tree node has a parent");
                if self.label_set(x) == self.label_set(y)
                    && self.label_set(p) == self.label_set(y_parent)
                    && self.edge_label(y_parent, y) == Some(edge)
                {
                    table[x.index()] = Blocking::Direct(y);
                    break;
                }
                y = y_parent;
            }
        }
        table
    }

    pub fn blocking_status(&self, x: NodeId) -> Blocking {
        self.blocking_table()[x.index()]
    }

    /// First clash in node order, if any.
    pub fn detect_clash(&self) -> Option<ClashReport> {
        if let Some(a) = &self.self_distinct {
            return Some(ClashReport::SelfInequality {
                individual: a.clone(),
            });
        }
        use super::tables::Kind;
        for x in self.node_ids() {
            for c in self.label(x) {
                match self.tables.kinds[c] {
                    Kind::Atom if self.has(x, self.tables.neg[c]) => {
                        let Concept::Atom(name) = self.tables.concept(c) else {
                            unreachable!()
                        };
                        return Some(ClashReport::Atom {
                            node: x,
                            atom: name.clone(),
                        });
                    }
                    Kind::AtMost(n, s, filler) => {
                        let cands: Vec<NodeId> =
                            self.count_set(x, s, filler).into_iter().collect();
                        if let Some(w) = self.has_distinct_subset(&cands, n as usize + 1) {
                            return Some(ClashReport::AtMost {
                                node: x,
                                concept: c,
                                witnesses: w,
                            });
                        }
                    }
                    _ => {}
                }
            }
        }
        None
    }

    // ---- mutation primitives used by the rules ----

    pub(crate) fn add_concept(&mut self, x: NodeId, c: ConceptId) {
        self.nodes[x.index()].label.insert(c);
    }

    pub(crate) fn add_edge_roles(
        &mut self,
        x: NodeId,
        y: NodeId,
        roles: impl IntoIterator<Item = RoleId>,
    ) {
        self.nodes[x.index()]
            .out
            .entry(y)
            .or_default()
            .extend(roles);
        self.nodes[y.index()].inc.insert(x);
    }

    pub(crate) fn set_distinct(&mut self, x: NodeId, y: NodeId) {
        debug_assert_ne!(x, y, "≠ is irreflexive");
        self.neq.insert(ordered(x, y));
    }

    /// Fresh tree child of `x` over an edge labelled `{s}`, labelled `{c}`.
    pub(crate) fn create_child(&mut self, x: NodeId, s: RoleId, c: ConceptId) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        let mut label = FixedBitSet::with_capacity(self.tables.closure_size());
        label.insert(c);
        let depth = self.nodes[x.index()].depth + 1;
        self.nodes.push(Node {
            label,
            kind: NodeKind::Tree,
            parent: Some(x),
            out: BTreeMap::new(),
            inc: BTreeSet::new(),
            depth,
            generated: 0,
            merged_into: None,
        });
        self.nodes[x.index()].generated += 1;
        self.add_edge_roles(x, id, [s]);
        id
    }

    fn inherit_inequalities(&mut self, from: NodeId, to: NodeId) {
        let inherited: Vec<NodeId> = self
            .neq
            .iter()
            .filter_map(|&(a, b)| {
                if a == from {
                    Some(b)
                } else if b == from {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        for u in inherited {
            self.set_distinct(u, to);
        }
    }

    /// At-most rule merge of `y` into `z`, both `S`-neighbours of `x`, with
    /// `y` a tree successor of `x`.
    pub(crate) fn merge_into_neighbour(&mut self, x: NodeId, y: NodeId, z: NodeId) {
        debug_assert_eq!(self.parent(y), Some(x));
        let y_label = self.nodes[y.index()].label.clone();
        self.nodes[z.index()].label.union_with(&y_label);

        let xy = self.edge_label(x, y).cloned().unwrap_or_default();
        let z_is_predecessor = if self.is_root(x) {
            self.is_root(z) && self.edge_label(x, z).is_none()
        } else {
            self.parent(x) == Some(z)
        };
        if z_is_predecessor {
            self.add_edge_roles(z, x, xy.iter().map(|r| r ^ 1));
        } else {
            self.add_edge_roles(x, z, xy);
        }
        if let Some(l) = self.nodes[x.index()].out.get_mut(&y) {
            l.clear();
        }
        self.inherit_inequalities(y, z);
    }

    /// Root merge of `y` into `z`: labels and all adjacency of `y` move to
    /// `z`, `y` is emptied and disconnected, and `y ≐ z` is recorded.
    pub(crate) fn merge_roots(&mut self, y: NodeId, z: NodeId) {
        let y_label = self.nodes[y.index()].label.clone();
        self.nodes[z.index()].label.union_with(&y_label);

        let rename = |w: NodeId| if w == y { z } else { w };
        let outgoing: Vec<(NodeId, RoleSet)> = self.nodes[y.index()]
            .out
            .iter()
            .map(|(w, l)| (*w, l.clone()))
            .collect();
        let incoming: Vec<NodeId> = self.nodes[y.index()].inc.iter().copied().collect();

        for (w, l) in &outgoing {
            self.add_edge_roles(z, rename(*w), l.iter().copied());
            if !self.is_root(*w) {
                self.nodes[w.index()].parent = Some(z);
            }
        }
        for w in &incoming {
            if *w == y {
                continue;
            }
            let l = self.edge_label(*w, y).cloned().unwrap_or_default();
            self.add_edge_roles(*w, z, l);
        }

        for (w, _) in outgoing {
            self.nodes[w.index()].inc.remove(&y);
        }
        for w in incoming {
            self.nodes[w.index()].out.remove(&y);
        }
        let node = &mut self.nodes[y.index()];
        node.out.clear();
        node.inc.clear();
        node.label.clear();
        node.merged_into = Some(z);

        self.inherit_inequalities(y, z);
        self.eq.insert(ordered(y, z));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::Provenance;
    use crate::syntax::{Name, RoleBox};

    fn forest(abox: Vec<Assertion>, rbox: RoleBox) -> CompletionForest {
        let names: Vec<Name> = abox
            .iter()
            .flat_map(|a| match a {
                Assertion::Instance(_, c) => c.roles().into_iter().collect::<Vec<_>>(),
                Assertion::Related(_, _, r) => vec![r.clone()],
                Assertion::Distinct(..) => vec![],
            })
            .map(|r| r.name().clone())
            .collect();
        let rbox = rbox.extended(names, vec![], Vec::<Name>::new());
        let p = ReducedProblem::new(abox, rbox, "$u", Provenance::Manual);
        CompletionForest::init(Arc::new(Tables::new(&p).unwrap()), &p)
    }

    fn a(n: &str) -> Concept {
        Concept::atom(n)
    }

    #[test]
    fn init_builds_roots_edges_and_inequalities() {
        let r = Role::named("R");
        let f = forest(
            vec![
                Assertion::instance("a", a("A")),
                Assertion::instance("b", a("B")),
                Assertion::related("a", "b", r.clone()),
            ],
            RoleBox::new(["R"], vec![], Vec::<Name>::new()),
        );
        assert_eq!(f.node_count(), 2);
        let (xa, xb) = (f.node_of("a").unwrap(), f.node_of("b").unwrap());
        let rid = f.tables.role_id(&r).unwrap();
        assert_eq!(f.edge_label(xa, xb), Some(&RoleSet::from([rid])));
        assert_eq!(f.label_concepts(xa), vec![&a("A")]);
        assert_eq!(f.label_concepts(xb), vec![&a("B")]);
        assert!(f.inequalities().is_empty());

        let single = forest(vec![Assertion::instance("a", a("A"))], RoleBox::default());
        assert_eq!(single.node_count(), 1);
        assert_eq!(single.edges().count(), 0);

        let g = forest(
            vec![
                Assertion::instance("a", a("A")),
                Assertion::instance("b", a("B")),
                Assertion::distinct("a", "b"),
            ],
            RoleBox::default(),
        );
        assert!(g.distinct(NodeId(0), NodeId(1)));
        assert_eq!(g.inequalities().len(), 1);
    }

    #[test]
    fn neighbours_follow_hierarchy_and_inversion() {
        let (r, s) = (Role::named("R"), Role::named("S"));
        let rbox = RoleBox::new(Vec::<Name>::new(), vec![(r.clone(), s.clone())], Vec::<Name>::new());
        let f = forest(
            vec![
                Assertion::instance("x", a("A")),
                Assertion::instance("y", a("A")),
                Assertion::related("x", "y", r.clone()),
            ],
            rbox,
        );
        let (x, y) = (NodeId(0), NodeId(1));
        assert!(f.s_neighbours(x, &s).contains(&y));
        assert!(f.s_neighbours(x, &r).contains(&y));
        assert!(f.s_neighbours(y, &r.inv()).contains(&x));
        assert!(f.s_neighbours(y, &s.inv()).contains(&x));
        assert!(!f.s_neighbours(y, &r).contains(&x));
        assert!(!f.s_neighbours(x, &r.inv()).contains(&y));
    }

    #[test]
    fn empty_edge_contributes_nothing() {
        let r = Role::named("R");
        let mut f = forest(
            vec![Assertion::instance("x", Concept::exists(r.clone(), a("A")))],
            RoleBox::new(["R"], vec![], Vec::<Name>::new()),
        );
        let rid = f.tables.role_id(&r).unwrap();
        let cid = f.tables.id_of(&a("A")).unwrap();
        let y = f.create_child(NodeId(0), rid, cid);
        assert!(f.neighbours(NodeId(0), rid).contains(&y));
        f.nodes[0].out.get_mut(&y).unwrap().clear();
        assert!(f.neighbours(NodeId(0), rid).is_empty());
        assert!(f.neighbours(y, rid ^ 1).is_empty());
        assert_eq!(f.blocking_status(y), Blocking::Indirect);
        assert!(!f.is_live(y));
    }

    #[test]
    fn count_set_counts_fresh_children() {
        let s = Role::named("S");
        let mut f = forest(
            vec![Assertion::instance("x", Concept::at_least(2, s.clone(), a("C")))],
            RoleBox::new(["S"], vec![], Vec::<Name>::new()),
        );
        let sid = f.tables.role_id(&s).unwrap();
        let cid = f.tables.id_of(&a("C")).unwrap();
        let y1 = f.create_child(NodeId(0), sid, cid);
        let y2 = f.create_child(NodeId(0), sid, cid);
        f.set_distinct(y1, y2);
        assert_eq!(f.count_set(NodeId(0), sid, cid).len(), 2);
        assert_eq!(f.count_set(y1, sid ^ 1, cid).len(), 0);
        assert!(f.has_distinct_subset(&[y1, y2], 2).is_some());
    }

    #[test]
    fn atom_clash_is_reported() {
        let f = forest(
            vec![
                Assertion::instance("x", a("A")),
                Assertion::instance("x", Concept::neg_atom("A")),
            ],
            RoleBox::default(),
        );
        assert!(matches!(f.detect_clash(), Some(ClashReport::Atom { .. })));
    }

    #[test]
    fn at_most_zero_clashes_with_single_neighbour() {
        let s = Role::named("S");
        let f = forest(
            vec![
                Assertion::instance("x", Concept::at_most(0, s.clone(), a("C"))),
                Assertion::instance("y", a("C")),
                Assertion::related("x", "y", s),
            ],
            RoleBox::default(),
        );
        assert!(matches!(f.detect_clash(), Some(ClashReport::AtMost { .. })));
    }

    #[test]
    fn at_most_one_with_mergeable_neighbours_is_no_clash() {
        let s = Role::named("S");
        let f = forest(
            vec![
                Assertion::instance("x", Concept::at_most(1, s.clone(), a("C"))),
                Assertion::instance("y", a("C")),
                Assertion::instance("z", a("C")),
                Assertion::related("x", "y", s.clone()),
                Assertion::related("x", "z", s),
            ],
            RoleBox::default(),
        );
        assert_eq!(f.detect_clash(), None);
    }
}

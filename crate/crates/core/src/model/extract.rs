use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{Element, Interpretation};
use crate::engine::{CompletionForest, NodeId, RoleId};
use crate::reduction::ReducedProblem;
use crate::syntax::Concept;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("node {node} is blocked by {blocker}; use bounded unravelling instead")]
    Blocked { node: NodeId, blocker: NodeId },
    #[error("forest has a clash")]
    Clash,
}

type Pairs = BTreeSet<(Element, Element)>;

fn transitive_closure(pairs: &Pairs, n: usize) -> Pairs {
    let mut reach = vec![vec![false; n]; n];
    for &(x, y) in pairs {
        reach[x][y] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut out = Pairs::new();
    for (i, row) in reach.iter().enumerate() {
        for (j, &b) in row.iter().enumerate() {
            if b {
                out.insert((i, j));
            }
        }
    }
    out
}

/// Reads a model off a complete, clash-free forest without blocked nodes.
///
/// The domain is the set of live nodes. A transitive role gets the
/// transitive closure of its edges; any other role gets its edges plus the
/// closures of its transitive sub-roles.
pub fn extract_model(
    f: &CompletionForest,
    problem: &ReducedProblem,
) -> Result<Interpretation, ExtractError> {
    if f.detect_clash().is_some() {
        return Err(ExtractError::Clash);
    }
    let blocking = f.blocking_table();
    let live: Vec<NodeId> = f.node_ids().filter(|&x| f.is_live(x)).collect();
    for &x in &live {
        if let crate::engine::Blocking::Direct(blocker) = blocking[x.index()] {
            return Err(ExtractError::Blocked { node: x, blocker });
        }
    }
    let element: BTreeMap<NodeId, Element> =
        live.iter().enumerate().map(|(e, &x)| (x, e)).collect();
    let n = live.len();
    let tables = f.tables();
    let rbox = tables.rbox();

    let mut i = Interpretation::new(n);
    let atoms: BTreeSet<_> = tables
        .concepts()
        .iter()
        .flat_map(Concept::atoms)
        .chain(problem.atoms())
        .collect();
    i.declare_atoms(&atoms);
    for (&x, &e) in &element {
        for c in f.label(x) {
            if let Concept::Atom(a) = tables.concept(c) {
                i.atoms.get_mut(a).expect("declared").insert(e);
            }
        }
    }

    // Edge pairs per role id, with each edge also entered under the inverse.
    let mut edges: Vec<Pairs> = vec![Pairs::new(); tables.role_count()];
    for (x, y, label) in f.edges() {
        let (Some(&ex), Some(&ey)) = (element.get(&x), element.get(&y)) else {
            continue;
        };
        for &r in label {
            edges[r].insert((ex, ey));
            edges[r ^ 1].insert((ey, ex));
        }
    }
    // E(S): pairs of every sub-role.
    let role_count = tables.role_count();
    let e_of = |s: RoleId| -> Pairs {
        (0..role_count)
            .filter(|&r| tables.sub_role(r, s))
            .flat_map(|r| edges[r].iter().copied())
            .collect()
    };
    for name in rbox.signature() {
        let s = tables
            .role_id(&crate::syntax::Role::named(name.clone()))
            .expect("signature role");
        let pairs = if tables.is_transitive(s) {
            transitive_closure(&e_of(s), n)
        } else {
            let mut pairs = e_of(s);
            for p in (0..role_count).filter(|&p| tables.is_transitive(p) && tables.sub_role(p, s)) {
                pairs.extend(transitive_closure(&e_of(p), n));
            }
            pairs
        };
        i.roles.insert(name.clone(), pairs);
    }

    for ind in problem.individuals() {
        let x = f.node_of(ind).expect("individual has a root");
        i.individuals.insert(ind.clone(), element[&x]);
    }
    Ok(i)
}

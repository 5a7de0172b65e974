//! Test corpora: seeded random knowledge bases, concepts and
//! interpretations, and a curated regression set with known verdicts.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::Interpretation;
use crate::parse::{parse_concept, parse_kb};
use crate::reduction::{
    reduce_abox_consistency, reduce_concept_sat, reduce_subsumption, ReducedProblem,
};
use crate::syntax::{Assertion, Concept, Gci, KnowledgeBase, Name, Role, RoleBox};

/// Shape of generated knowledge bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomConfig {
    pub atoms: usize,
    /// At most three: `R`, `S` and the transitive `T`.
    pub roles: usize,
    pub max_depth: usize,
    pub max_number: u32,
    pub max_individuals: usize,
    pub max_gcis: usize,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig {
            atoms: 4,
            roles: 3,
            max_depth: 3,
            max_number: 2,
            max_individuals: 3,
            max_gcis: 1,
        }
    }
}

const ATOMS: [&str; 6] = ["A", "B", "C", "D", "E", "F"];
const ROLES: [&str; 3] = ["R", "S", "T"];
const TRANSITIVE: &str = "T";
const INDIVIDUALS: [&str; 4] = ["a", "b", "c", "d"];

impl RandomConfig {
    fn atom_names(&self) -> &'static [&'static str] {
        &ATOMS[..self.atoms.clamp(1, ATOMS.len())]
    }

    fn role_names(&self) -> &'static [&'static str] {
        &ROLES[..self.roles.clamp(1, ROLES.len())]
    }

    /// The role box every generated knowledge base uses: `T` transitive when
    /// present, and `S ⊑ T` when `with_inclusion` holds.
    pub fn rbox(&self, with_inclusion: bool) -> RoleBox {
        let names = self.role_names();
        let has_t = names.contains(&TRANSITIVE);
        let inclusions = if with_inclusion && has_t && names.contains(&"S") {
            vec![(Role::named("S"), Role::named("T"))]
        } else {
            vec![]
        };
        let transitive: Vec<&str> = if has_t { vec![TRANSITIVE] } else { vec![] };
        RoleBox::new(names.iter().copied(), inclusions, transitive)
    }
}

fn random_role<R: Rng>(rng: &mut R, names: &[&str]) -> Role {
    let name = *names.choose(rng).expect("non-empty role set");
    if rng.gen_bool(0.3) {
        Role::inverse_of(name)
    } else {
        Role::named(name)
    }
}

/// A random concept of depth at most `depth`. Number restrictions only use
/// simple roles.
pub fn random_concept<R: Rng>(rng: &mut R, cfg: &RandomConfig, depth: usize) -> Concept {
    let atoms = cfg.atom_names();
    let roles = cfg.role_names();
    let simple: Vec<&str> = roles.iter().copied().filter(|r| *r != TRANSITIVE).collect();
    let literal = |rng: &mut R| {
        let a = *atoms.choose(rng).expect("non-empty atom set");
        if rng.gen_bool(0.5) {
            Concept::atom(a)
        } else {
            Concept::neg_atom(a)
        }
    };
    if depth == 0 || rng.gen_bool(0.2) {
        return literal(rng);
    }
    let sub = |rng: &mut R| random_concept(rng, cfg, depth - 1);
    match rng.gen_range(0..8) {
        0 => Concept::and(sub(rng), sub(rng)),
        1 => Concept::or(sub(rng), sub(rng)),
        2 => Concept::not(sub(rng)),
        3 => Concept::exists(random_role(rng, roles), sub(rng)),
        4 => Concept::forall(random_role(rng, roles), sub(rng)),
        k if simple.is_empty() => {
            let _ = k;
            literal(rng)
        }
        5 | 6 => {
            let n = rng.gen_range(0..=cfg.max_number);
            Concept::at_least(n, random_role(rng, &simple), sub(rng))
        }
        _ => {
            let n = rng.gen_range(0..=cfg.max_number);
            Concept::at_most(n, random_role(rng, &simple), sub(rng))
        }
    }
}

/// A random terminology of up to `cfg.max_gcis` inclusions.
pub fn random_tbox<R: Rng>(rng: &mut R, cfg: &RandomConfig) -> Vec<Gci> {
    let depth = cfg.max_depth.min(2);
    (0..rng.gen_range(0..=cfg.max_gcis))
        .map(|_| Gci::new(random_concept(rng, cfg, 1), random_concept(rng, cfg, depth)))
        .collect()
}

/// A random knowledge base.
pub fn random_kb<R: Rng>(rng: &mut R, cfg: &RandomConfig) -> KnowledgeBase {
    let rbox = cfg.rbox(rng.gen_bool(0.5));
    let tbox = random_tbox(rng, cfg);
    let count = rng.gen_range(1..=cfg.max_individuals.clamp(1, INDIVIDUALS.len()));
    let inds = &INDIVIDUALS[..count];
    let mut abox = Vec::new();
    for a in inds {
        for _ in 0..rng.gen_range(1..=3) {
            let depth = rng.gen_range(1..=cfg.max_depth.max(1));
            abox.push(Assertion::instance(*a, random_concept(rng, cfg, depth)));
        }
    }
    if count > 1 {
        for _ in 0..rng.gen_range(0..=count) {
            let a = *inds.choose(rng).expect("non-empty");
            let b = *inds.choose(rng).expect("non-empty");
            abox.push(Assertion::related(a, b, random_role(rng, cfg.role_names())));
        }
        if rng.gen_bool(0.3) {
            abox.push(Assertion::distinct(inds[0], inds[1]));
        }
    }
    KnowledgeBase::new(tbox, rbox, abox).expect("generator respects simplicity")
}

/// A random interpretation over the generator's signature with a domain of
/// one to `max_domain` elements. Transitive roles are closed.
pub fn random_interpretation<R: Rng>(
    rng: &mut R,
    cfg: &RandomConfig,
    max_domain: usize,
) -> Interpretation {
    let n = rng.gen_range(1..=max_domain.max(1));
    let mut i = Interpretation::new(n);
    for a in cfg.atom_names() {
        let ext = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        i.atoms.insert(Name::from(*a), ext);
    }
    for r in cfg.role_names() {
        let mut reach = vec![vec![false; n]; n];
        for row in reach.iter_mut() {
            for cell in row.iter_mut() {
                *cell = rng.gen_bool(0.4);
            }
        }
        if *r == TRANSITIVE {
            for k in 0..n {
                for x in 0..n {
                    for y in 0..n {
                        reach[x][y] |= reach[x][k] && reach[k][y];
                    }
                }
            }
        }
        let pairs = (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| reach[x][y])
            .collect();
        i.roles.insert(Name::from(*r), pairs);
    }
    i
}

/// What a curated case asks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Query {
    Consistent,
    Sat(&'static str),
    Subsumes(&'static str, &'static str),
}

/// A regression case: knowledge base source, query and the expected answer
/// (consistent / satisfiable / subsumed).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CuratedCase {
    pub name: &'static str,
    pub source: &'static str,
    pub query: Query,
    pub expected: bool,
}

impl CuratedCase {
    pub fn kb(&self) -> KnowledgeBase {
        parse_kb(self.source).unwrap_or_else(|e| panic!("{}: {e}", self.name))
    }

    /// The consistency problem that answers the query.
    pub fn reduce(&self) -> ReducedProblem {
        let kb = self.kb();
        let concept = |s: &str| parse_concept(s).unwrap_or_else(|e| panic!("{}: {e}", self.name));
        match self.query {
            Query::Consistent => reduce_abox_consistency(&kb),
            Query::Sat(c) => reduce_concept_sat(&concept(c), &kb).expect("valid query"),
            Query::Subsumes(c, d) => {
                reduce_subsumption(&concept(c), &concept(d), &kb).expect("valid query")
            }
        }
    }

    /// Answer to the query given the consistency of the reduced problem.
    pub fn answer(&self, consistent: bool) -> bool {
        match self.query {
            Query::Subsumes(..) => !consistent,
            _ => consistent,
        }
    }
}

const fn case(name: &'static str, source: &'static str, query: Query, expected: bool) -> CuratedCase {
    CuratedCase {
        name,
        source,
        query,
        expected,
    }
}

use Query::{Consistent, Sat, Subsumes};

/// Hand-checked knowledge bases covering every expansion rule, both merge
/// geometries, root merging, inequality-protected pairs, transitive and
/// inverse propagation, and termination through blocking.
pub const CURATED: &[CuratedCase] = &[
    case("empty", "", Consistent, true),
    case("single-atom", "(instance a A)", Consistent, true),
    case("atom-clash", "(instance a (and A (not A)))", Consistent, false),
    case("or-open", "(instance a (or A B))\n(instance a (not A))", Consistent, true),
    case(
        "or-closed",
        "(instance a (or A B))\n(instance a (not A))\n(instance a (not B))",
        Consistent,
        false,
    ),
    case(
        "exists-forall-clash",
        "(instance a (some R A))\n(instance a (all R (not A)))",
        Consistent,
        false,
    ),
    case(
        "exists-forall-ok",
        "(instance a (some R A))\n(instance a (all R B))",
        Consistent,
        true,
    ),
    case(
        "transitive-roots",
        "(transitive R)\n(related a b R)\n(related b c R)\n(instance a (all R A))\n(instance c (not A))",
        Consistent,
        false,
    ),
    case(
        "transitive-tree",
        "(transitive R)\n(instance a (and (all R A) (some R (some R (not A)))))",
        Consistent,
        false,
    ),
    case(
        "non-transitive-tree",
        "(instance a (and (all R A) (some R (some R (not A)))))",
        Consistent,
        true,
    ),
    case(
        "transitive-super-role",
        "(transitive T)\n(subrole R T)\n(instance a (and (all T A) (some R (some R (not A)))))",
        Consistent,
        false,
    ),
    case(
        "subrole-forall",
        "(subrole S R)\n(instance a (and (some S A) (all R (not A))))",
        Consistent,
        false,
    ),
    case(
        "inverse-back-propagation",
        "(instance a (and A (some R (all (inv R) (not A)))))",
        Consistent,
        false,
    ),
    case(
        "inverse-transitive",
        "(transitive R)\n(instance a (and A (some R (some R (all (inv R) (not A))))))",
        Consistent,
        false,
    ),
    case(
        "inverse-root-edge",
        "(related a b (inv R))\n(instance b (all R (not A)))\n(instance a A)",
        Consistent,
        false,
    ),
    case(
        "at-least-at-most-clash",
        "(instance a (and (at-least 3 R A) (at-most 2 R A)))",
        Consistent,
        false,
    ),
    case("at-least-zero", "(instance a (at-least 0 R A))", Consistent, true),
    case("not-at-least-zero", "(instance a (not (at-least 0 R A)))", Consistent, false),
    case(
        "merge-successors",
        "(instance a (and (at-most 1 R A) (and (some R (and A B)) (some R (and A C)))))",
        Consistent,
        true,
    ),
    case(
        "merge-successors-clash",
        "(instance a (and (at-most 1 R A) (and (some R (and A B)) (some R (and A (not B))))))",
        Consistent,
        false,
    ),
    case(
        "merge-into-predecessor",
        "(instance a (and B (some R (and (some (inv R) C) (at-most 1 (inv R) (or X (not X)))))))",
        Consistent,
        true,
    ),
    case(
        "merge-into-predecessor-clash",
        "(instance a (and (not C) (some R (and (some (inv R) C) (at-most 1 (inv R) (or X (not X)))))))",
        Consistent,
        false,
    ),
    case(
        "subrole-counting",
        "(subrole S R)\n(instance a (and (at-most 1 R A) (and (some S (and A B)) (some R (and A (not B))))))",
        Consistent,
        false,
    ),
    case(
        "choose-pigeonhole",
        "(instance a (and (at-least 3 R B) (and (at-most 1 R A) (at-most 1 R (not A)))))",
        Consistent,
        false,
    ),
    case(
        "choose-split",
        "(instance a (and (at-least 2 R B) (and (at-most 1 R A) (at-most 1 R (not A)))))",
        Consistent,
        true,
    ),
    case(
        "root-merge",
        "(instance a (at-most 1 R A))\n(related a b R)\n(related a c R)\n(instance b A)\n(instance c A)",
        Consistent,
        true,
    ),
    case(
        "root-merge-clash",
        "(instance a (at-most 1 R A))\n(related a b R)\n(related a c R)\n(instance b (and A B))\n(instance c (and A (not B)))",
        Consistent,
        false,
    ),
    case(
        "distinct-blocks-merge",
        "(instance a (at-most 1 R A))\n(related a b R)\n(related a c R)\n(instance b A)\n(instance c A)\n(distinct b c)",
        Consistent,
        false,
    ),
    case("self-distinct", "(instance a A)\n(distinct a a)", Consistent, false),
    case(
        "blocking-cycle",
        "(implies A (some R A))\n(instance a A)",
        Consistent,
        true,
    ),
    case(
        "blocking-with-inverse",
        "(implies A (and (some R A) (all (inv R) B)))\n(instance a A)",
        Consistent,
        true,
    ),
    case(
        "blocking-transitive",
        "(transitive T)\n(implies A (some T (and A (all T B))))\n(instance a (and A (not B)))",
        Consistent,
        true,
    ),
    case(
        "gci-propagates-to-successors",
        "(implies (or X (not X)) (all R A))\n(instance a (some R (not A)))",
        Consistent,
        false,
    ),
    case("sat-with-gci", "(implies A B)", Sat("(and A (not B))"), false),
    case("sat-plain", "(implies A B)", Sat("A"), true),
    case(
        "sat-gci-reaches-successor",
        "(implies A (all R B))",
        Sat("(and A (some R (not B)))"),
        false,
    ),
    case("subsumes-reflexive", "", Subsumes("A", "A"), true),
    case("subsumes-gci", "(implies A B)", Subsumes("A", "B"), true),
    case("subsumes-converse", "(implies A B)", Subsumes("B", "A"), false),
    case(
        "subsumes-via-role-hierarchy",
        "(subrole S R)",
        Subsumes("(some S A)", "(some R A)"),
        true,
    ),
    case(
        "subsumes-number",
        "",
        Subsumes("(at-least 2 R A)", "(some R A)"),
        true,
    ),
];

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn curated_cases_parse() {
        assert!(CURATED.len() >= 25);
        for c in CURATED {
            c.reduce();
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let cfg = RandomConfig::default();
        let a = random_kb(&mut ChaCha8Rng::seed_from_u64(7), &cfg);
        let b = random_kb(&mut ChaCha8Rng::seed_from_u64(7), &cfg);
        assert_eq!(a, b);
    }

    #[test]
    fn generated_concepts_respect_depth() {
        let cfg = RandomConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            assert!(random_concept(&mut rng, &cfg, 3).depth() <= 3);
        }
    }
}

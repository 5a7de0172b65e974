//! Small-model search: for each domain size and each way of mapping the
//! individuals onto it, the remaining interpretation is found by a SAT
//! solver over a Tseitin encoding of the problem.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use varisat::{ExtendFormula, Lit, Solver};

use super::{check_model, Element, Interpretation, Target};
use crate::syntax::{nnf, Assertion, Concept, Name, Role, BOTTOM_MARKER};

/// Searches interpretations with domains of size `1..=max_domain` and
/// returns a model of the smallest size found. `None` does not show
/// inconsistency: some consistent inputs only have large or infinite models.
pub fn find_model_bruteforce<'a>(
    target: impl Into<Target<'a>>,
    max_domain: usize,
) -> Option<Interpretation> {
    let target = target.into();
    let search = |d: usize| search_domain(target, d);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (1..=max_domain).into_par_iter().find_map_first(search)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (1..=max_domain).find_map(search)
    }
}

fn search_domain(target: Target<'_>, d: usize) -> Option<Interpretation> {
    let individuals = target.individuals();
    let mut map = vec![0usize; individuals.len()];
    loop {
        if let Some(i) = solve_with_mapping(target, d, &map) {
            let report = check_model(&i, target);
            assert!(report.is_model(), "SAT model fails the checker: {report}");
            return Some(i);
        }
        if !next_restricted_growth(&mut map, d) {
            return None;
        }
    }
}

/// Advances `map` to the next restricted-growth string with values below
/// `d`: `map[0] = 0` and each entry exceeds the running maximum by at most
/// one. These enumerate individual mappings up to renaming of elements.
fn next_restricted_growth(map: &mut [usize], d: usize) -> bool {
    for i in (1..map.len()).rev() {
        let max_before = map[..i].iter().copied().max().unwrap_or(0);
        if map[i] <= max_before && map[i] + 1 < d {
            map[i] += 1;
            for v in &mut map[i + 1..] {
                *v = 0;
            }
            return true;
        }
    }
    false
}

struct Encoder<'s> {
    solver: Solver<'s>,
    d: usize,
    falsum: Lit,
    atoms: BTreeMap<Name, Vec<Lit>>,
    roles: BTreeMap<Name, Vec<Vec<Lit>>>,
    memo: HashMap<(Concept, Element), Lit>,
}

impl Encoder<'_> {
    fn fresh(&mut self) -> Lit {
        self.solver.new_lit()
    }

    fn role(&self, r: &Role, x: Element, y: Element) -> Lit {
        let table = &self.roles[r.name()];
        if r.is_inverted() {
            table[y][x]
        } else {
            table[x][y]
        }
    }

    fn atom(&mut self, a: &Name, x: Element) -> Lit {
        if &**a == BOTTOM_MARKER {
            return self.falsum;
        }
        if !self.atoms.contains_key(a) {
            let lits = (0..self.d).map(|_| self.solver.new_lit()).collect();
            self.atoms.insert(a.clone(), lits);
        }
        self.atoms[a][x]
    }

    /// `v ↔ ⋀ lits`.
    fn and(&mut self, lits: &[Lit]) -> Lit {
        let v = self.fresh();
        for &l in lits {
            self.solver.add_clause(&[!v, l]);
        }
        let mut clause: Vec<Lit> = lits.iter().map(|&l| !l).collect();
        clause.push(v);
        self.solver.add_clause(&clause);
        v
    }

    fn or(&mut self, lits: &[Lit]) -> Lit {
        let negated: Vec<Lit> = lits.iter().map(|&l| !l).collect();
        !self.and(&negated)
    }

    /// `v ↔ at least n of lits`.
    fn at_least(&mut self, n: usize, lits: &[Lit]) -> Lit {
        if n == 0 {
            return !self.falsum;
        }
        if n > lits.len() {
            return self.falsum;
        }
        let mut choices = Vec::new();
        let mut subset = Vec::with_capacity(n);
        fn subsets(lits: &[Lit], n: usize, start: usize, cur: &mut Vec<Lit>, out: &mut Vec<Vec<Lit>>) {
            if cur.len() == n {
                out.push(cur.clone());
                return;
            }
            for i in start..lits.len() {
                cur.push(lits[i]);
                subsets(lits, n, i + 1, cur, out);
                cur.pop();
            }
        }
        subsets(lits, n, 0, &mut subset, &mut choices);
        let conj: Vec<Lit> = choices.iter().map(|s| self.and(s)).collect();
        self.or(&conj)
    }

    /// Literal true exactly when element `x` is in the extension of the NNF
    /// concept `c`.
    fn concept(&mut self, c: &Concept, x: Element) -> Lit {
        if let Some(&l) = self.memo.get(&(c.clone(), x)) {
            return l;
        }
        let lit = match c {
            Concept::Atom(a) => self.atom(a, x),
            Concept::NegAtom(a) => !self.atom(a, x),
            Concept::Not(inner) => {
                let n = nnf(&Concept::not((**inner).clone()));
                self.concept(&n, x)
            }
            Concept::And(a, b) => {
                let l = [self.concept(a, x), self.concept(b, x)];
                self.and(&l)
            }
            Concept::Or(a, b) => {
                let l = [self.concept(a, x), self.concept(b, x)];
                self.or(&l)
            }
            Concept::Exists(r, inner) => {
                let w = self.witnesses(r, inner, x);
                self.or(&w)
            }
            Concept::Forall(r, inner) => {
                let mut l = Vec::with_capacity(self.d);
                for y in 0..self.d {
                    let edge = self.role(r, x, y);
                    let fill = self.concept(inner, y);
                    l.push(self.or(&[!edge, fill]));
                }
                self.and(&l)
            }
            Concept::AtLeast(n, r, inner) => {
                let w = self.witnesses(r, inner, x);
                self.at_least(*n as usize, &w)
            }
            Concept::AtMost(n, r, inner) => {
                let w = self.witnesses(r, inner, x);
                !self.at_least(*n as usize + 1, &w)
            }
        };
        self.memo.insert((c.clone(), x), lit);
        lit
    }

    /// For each `y`: a literal for `(x,y) ∈ Rᴵ ∧ y ∈ Cᴵ`.
    fn witnesses(&mut self, r: &Role, c: &Concept, x: Element) -> Vec<Lit> {
        (0..self.d)
            .map(|y| {
                let edge = self.role(r, x, y);
                let fill = self.concept(c, y);
                self.and(&[edge, fill])
            })
            .collect()
    }
}

fn solve_with_mapping(target: Target<'_>, d: usize, map: &[usize]) -> Option<Interpretation> {
    let individuals = target.individuals();
    let element: BTreeMap<&Name, Element> = individuals.iter().zip(map.iter().copied()).collect();
    for a in target.abox() {
        if let Assertion::Distinct(x, y) = a {
            if element[x] == element[y] {
                return None;
            }
        }
    }

    let rbox = target.rbox();
    let mut solver = Solver::new();
    let falsum = solver.new_lit();
    solver.add_clause(&[!falsum]);
    let roles: BTreeMap<Name, Vec<Vec<Lit>>> = rbox
        .signature()
        .iter()
        .map(|n| {
            let table = (0..d)
                .map(|_| (0..d).map(|_| solver.new_lit()).collect())
                .collect();
            (n.clone(), table)
        })
        .collect();
    let mut enc = Encoder {
        solver,
        d,
        falsum,
        atoms: BTreeMap::new(),
        roles,
        memo: HashMap::new(),
    };
    for a in target.atoms() {
        enc.atom(&a, 0);
    }

    for name in rbox.transitive_names() {
        let t = &enc.roles[name];
        let mut clauses = Vec::new();
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    clauses.push([!t[x][y], !t[y][z], t[x][z]]);
                }
            }
        }
        for c in clauses {
            enc.solver.add_clause(&c);
        }
    }
    for (sub, sup) in rbox.declared_inclusions() {
        for x in 0..d {
            for y in 0..d {
                let c = [!enc.role(sub, x, y), enc.role(sup, x, y)];
                enc.solver.add_clause(&c);
            }
        }
    }
    for gci in target.tbox() {
        let c = nnf(&Concept::or(Concept::not(gci.sub.clone()), gci.sup.clone()));
        for x in 0..d {
            let l = enc.concept(&c, x);
            enc.solver.add_clause(&[l]);
        }
    }
    for a in target.abox() {
        match a {
            Assertion::Instance(ind, c) => {
                let l = enc.concept(&nnf(c), element[ind]);
                enc.solver.add_clause(&[l]);
            }
            Assertion::Related(x, y, r) => {
                let l = enc.role(r, element[x], element[y]);
                enc.solver.add_clause(&[l]);
            }
            Assertion::Distinct(..) => {}
        }
    }

    if !enc.solver.solve().expect("solver without proof output cannot fail") {
        return None;
    }
    let model: BTreeSet<Lit> = enc.solver.model()?.into_iter().collect();
    let holds = |l: Lit| model.contains(&l);

    let mut i = Interpretation::new(d);
    for (a, lits) in &enc.atoms {
        let ext = (0..d).filter(|&x| holds(lits[x])).collect();
        i.atoms.insert(a.clone(), ext);
    }
    for (r, table) in &enc.roles {
        let mut pairs = BTreeSet::new();
        for (x, row) in table.iter().enumerate() {
            for (y, &l) in row.iter().enumerate() {
                if holds(l) {
                    pairs.insert((x, y));
                }
            }
        }
        i.roles.insert(r.clone(), pairs);
    }
    i.individuals = element.into_iter().map(|(a, e)| (a.clone(), e)).collect();
    Some(i)
}

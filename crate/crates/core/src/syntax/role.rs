use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use fixedbitset::FixedBitSet;

use super::{Name, SignatureError};

/// A role name, possibly inverted.
///
/// Inversion is a flag rather than a wrapper, so `R⁻⁻` cannot be built.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Role {
    name: Name,
    inverted: bool,
}

impl Role {
    pub fn named(name: impl Into<Name>) -> Self {
        Role {
            name: name.into(),
            inverted: false,
        }
    }

    pub fn inverse_of(name: impl Into<Name>) -> Self {
        Role {
            name: name.into(),
            inverted: true,
        }
    }

    pub fn name(&self) -> &Name {
        &self.name
    }

    pub fn is_inverted(&self) -> bool {
        self.inverted
    }

    /// `Inv(R)`.
    pub fn inv(&self) -> Role {
        Role {
            name: self.name.clone(),
            inverted: !self.inverted,
        }
    }
}

/// Free-function form of [`Role::inv`].
pub fn inv(r: &Role) -> Role {
    r.inv()
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "(inv {})", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

/// Role hierarchy plus transitivity declarations.
///
/// The reflexive-transitive, inversion-closed closure of the declared
/// inclusions is computed once at construction. Roles are indexed densely:
/// the role name at signature position `i` has index `2i`, its inverse `2i+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoleBox {
    names: Vec<Name>,
    positions: BTreeMap<Name, usize>,
    inclusions: BTreeSet<(Role, Role)>,
    transitive: BTreeSet<Name>,
    // reach[i] contains j iff role i ⊑* role j
    reach: Vec<FixedBitSet>,
}

impl Default for RoleBox {
    fn default() -> Self {
        RoleBox::new(Vec::<Name>::new(), Vec::new(), Vec::<Name>::new())
    }
}

impl RoleBox {
    /// Builds a role box. Every name mentioned by an inclusion or a
    /// transitivity declaration joins the signature automatically.
    pub fn new<N, T>(
        signature: impl IntoIterator<Item = N>,
        inclusions: impl IntoIterator<Item = (Role, Role)>,
        transitive: impl IntoIterator<Item = T>,
    ) -> Self
    where
        N: Into<Name>,
        T: Into<Name>,
    {
        let inclusions: BTreeSet<(Role, Role)> = inclusions.into_iter().collect();
        let transitive: BTreeSet<Name> = transitive.into_iter().map(Into::into).collect();
        let mut all: BTreeSet<Name> = signature.into_iter().map(Into::into).collect();
        for (r, s) in &inclusions {
            all.insert(r.name().clone());
            all.insert(s.name().clone());
        }
        all.extend(transitive.iter().cloned());

        let names: Vec<Name> = all.into_iter().collect();
        let positions = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect::<BTreeMap<_, _>>();

        let count = names.len() * 2;
        let index = |r: &Role| positions[r.name()] * 2 + usize::from(r.is_inverted());
        let mut reach: Vec<FixedBitSet> = (0..count)
            .map(|i| {
                let mut row = FixedBitSet::with_capacity(count);
                row.insert(i);
                row
            })
            .collect();
        for (r, s) in &inclusions {
            let (ri, si) = (index(r), index(s));
            reach[ri].insert(si);
            reach[ri ^ 1].insert(si ^ 1);
        }
        // Warshall over bit rows.
        for k in 0..count {
            for i in 0..count {
                if i != k && reach[i].contains(k) {
                    let row = reach[k].clone();
                    reach[i].union_with(&row);
                }
            }
        }

        RoleBox {
            names,
            positions,
            inclusions,
            transitive,
            reach,
        }
    }

    /// Role names of the signature, sorted.
    pub fn signature(&self) -> &[Name] {
        &self.names
    }

    pub fn contains(&self, name: &str) -> bool {
        self.positions.contains_key(name)
    }

    pub fn declared_inclusions(&self) -> &BTreeSet<(Role, Role)> {
        &self.inclusions
    }

    pub fn transitive_names(&self) -> &BTreeSet<Name> {
        &self.transitive
    }

    /// Number of roles including inverses.
    pub fn role_count(&self) -> usize {
        self.names.len() * 2
    }

    /// Every role of the signature together with its inverse, in index order.
    pub fn roles(&self) -> Vec<Role> {
        (0..self.role_count()).map(|i| self.role_at(i)).collect()
    }

    pub fn role_at(&self, index: usize) -> Role {
        let name = self.names[index / 2].clone();
        if index % 2 == 1 {
            Role::inverse_of(name)
        } else {
            Role::named(name)
        }
    }

    pub fn role_index(&self, r: &Role) -> Result<usize, SignatureError> {
        self.positions
            .get(r.name())
            .map(|p| p * 2 + usize::from(r.is_inverted()))
            .ok_or_else(|| SignatureError::UnknownRole(r.name().to_string()))
    }

    /// `Trans(R)`: the role's name is declared transitive. Since the
    /// declaration is on names, `R` and `Inv(R)` always agree.
    pub fn is_transitive(&self, r: &Role) -> Result<bool, SignatureError> {
        self.role_index(r)?;
        Ok(self.transitive.contains(r.name()))
    }

    /// `r ⊑* s`.
    pub fn subsumes_role(&self, r: &Role, s: &Role) -> Result<bool, SignatureError> {
        let (ri, si) = (self.role_index(r)?, self.role_index(s)?);
        Ok(self.reach[ri].contains(si))
    }

    /// Index form of [`RoleBox::subsumes_role`].
    pub fn subsumes_index(&self, r: usize, s: usize) -> bool {
        self.reach[r].contains(s)
    }

    /// A role is simple when no role `p ⊑* r` (including `r`) is transitive.
    /// Roles outside the signature have no sub-roles and are simple.
    pub fn is_simple(&self, r: &Role) -> bool {
        let Ok(ri) = self.role_index(r) else {
            return true;
        };
        (0..self.role_count()).all(|p| {
            !(self.reach[p].contains(ri) && self.transitive.contains(&self.names[p / 2]))
        })
    }

    /// Returns a role box with extra names, inclusions and transitive names added.
    pub fn extended<N, T>(
        &self,
        names: impl IntoIterator<Item = N>,
        inclusions: impl IntoIterator<Item = (Role, Role)>,
        transitive: impl IntoIterator<Item = T>,
    ) -> RoleBox
    where
        N: Into<Name>,
        T: Into<Name>,
    {
        let sig = self
            .names
            .iter()
            .cloned()
            .chain(names.into_iter().map(Into::into))
            .collect::<Vec<Name>>();
        let incl = self
            .inclusions
            .iter()
            .cloned()
            .chain(inclusions)
            .collect::<Vec<_>>();
        let trans = self
            .transitive
            .iter()
            .cloned()
            .chain(transitive.into_iter().map(Into::into))
            .collect::<Vec<Name>>();
        RoleBox::new(sig, incl, trans)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rbox(incl: &[(Role, Role)], trans: &[&str]) -> RoleBox {
        RoleBox::new(Vec::<Name>::new(), incl.to_vec(), trans.iter().copied().map(Name::from))
    }

    #[test]
    fn inv_is_an_involution() {
        let r = Role::named("R");
        assert_eq!(inv(&r), Role::inverse_of("R"));
        assert_eq!(inv(&Role::inverse_of("R")), r);
        let s = Role::inverse_of("S");
        assert_eq!(inv(&inv(&s)), s);
    }

    #[test]
    fn transitivity_is_shared_with_inverse() {
        let rb = RoleBox::new(["Q"], vec![], ["P"]);
        assert!(rb.is_transitive(&Role::named("P")).unwrap());
        assert!(rb.is_transitive(&Role::inverse_of("P")).unwrap());
        assert!(!rb.is_transitive(&Role::named("Q")).unwrap());
        assert!(rb.is_transitive(&Role::named("Z")).is_err());
    }

    #[test]
    fn closure_is_transitive_reflexive_and_inverse_closed() {
        let (r, s, t) = (Role::named("R"), Role::named("S"), Role::named("T"));
        let rb = rbox(&[(r.clone(), s.clone()), (s.clone(), t.clone())], &[]);
        assert!(rb.subsumes_role(&r, &t).unwrap());
        assert!(rb.subsumes_role(&r.inv(), &t.inv()).unwrap());
        assert!(!rb.subsumes_role(&r, &t.inv()).unwrap());
        assert!(!rb.subsumes_role(&t, &r).unwrap());

        let single = rbox(&[(r.clone(), s.clone())], &[]);
        assert!(single.subsumes_role(&r.inv(), &s.inv()).unwrap());
        let empty = RoleBox::new(["R"], vec![], Vec::<Name>::new());
        assert!(empty.subsumes_role(&r, &r).unwrap());
    }

    #[test]
    fn inverse_inclusions_are_honoured() {
        let (r, s) = (Role::named("R"), Role::named("S"));
        let rb = rbox(&[(r.inv(), s.clone())], &[]);
        assert!(rb.subsumes_role(&r, &s.inv()).unwrap());
    }

    #[test]
    fn simplicity() {
        let (p, s) = (Role::named("P"), Role::named("S"));
        let rb = rbox(&[(p.clone(), s.clone())], &["P"]);
        assert!(!rb.is_simple(&s));
        assert!(!rb.is_simple(&p.inv()));
        assert!(!rb.is_simple(&s.inv()));
        let plain = RoleBox::new(["R"], vec![], Vec::<Name>::new());
        assert!(plain.is_simple(&Role::named("R")));
    }
}

use std::collections::{BTreeMap, BTreeSet};

use super::concept::{Name, Role};
use super::ontology::TBox;

/// Reflexive-transitive closure `⊑*` of the role inclusions over directed roles.
///
/// Roles are indexed as `2 * name_index + inverted`, so `Inv` is `id ^ 1`.
#[derive(Clone, Debug)]
pub struct RoleHierarchy {
    names: Vec<Name>,
    index: BTreeMap<Name, usize>,
    /// `sub[a]` is a bitset over role ids: bit `b` set iff `a ⊑* b`.
    sub: Vec<Vec<u64>>,
    transitive: BTreeSet<Name>,
}

impl RoleHierarchy {
    pub fn new(tbox: &TBox) -> Self {
        Self::with_roles(tbox, std::iter::empty())
    }

    /// Closure over the TBox roles plus any extra role names.
    pub fn with_roles(tbox: &TBox, extra: impl IntoIterator<Item = Name>) -> Self {
        let mut names: BTreeSet<Name> = tbox.role_names();
        names.extend(extra);
        let names: Vec<Name> = names.into_iter().collect();
        let index: BTreeMap<Name, usize> = names.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        let n = names.len() * 2;
        let words = n.div_ceil(64).max(1);
        let mut sub = vec![vec![0u64; words]; n];
        for (i, row) in sub.iter_mut().enumerate() {
            row[i / 64] |= 1 << (i % 64);
        }
        let id = |r: &Role| index[r.name()] * 2 + r.is_inverse() as usize;
        for (a, b) in &tbox.role_inclusions {
            let (a, b) = (id(a), id(b));
            sub[a][b / 64] |= 1 << (b % 64);
            sub[a ^ 1][(b ^ 1) / 64] |= 1 << ((b ^ 1) % 64);
        }
        // Warshall over bit rows.
        for k in 0..n {
            let row_k = sub[k].clone();
            for row in sub.iter_mut() {
                if row[k / 64] >> (k % 64) & 1 == 1 {
                    for (w, bits) in row.iter_mut().zip(&row_k) {
                        *w |= bits;
                    }
                }
            }
        }
        RoleHierarchy { names, index, sub, transitive: tbox.transitive.clone() }
    }

    pub fn role_count(&self) -> usize {
        self.names.len() * 2
    }

    pub fn id_of(&self, r: &Role) -> Option<usize> {
        self.index.get(r.name()).map(|i| i * 2 + r.is_inverse() as usize)
    }

    pub fn role_of(&self, id: usize) -> Role {
        let name = self.names[id / 2].clone();
        if id % 2 == 1 {
            Role::inverse_of(name)
        } else {
            Role::named(name)
        }
    }

    pub fn is_sub_id(&self, a: usize, b: usize) -> bool {
        self.sub[a][b / 64] >> (b % 64) & 1 == 1
    }

    /// `a ⊑* b`. Roles outside the hierarchy are only related to themselves.
    pub fn is_sub(&self, a: &Role, b: &Role) -> bool {
        match (self.id_of(a), self.id_of(b)) {
            (Some(x), Some(y)) => self.is_sub_id(x, y),
            _ => a == b,
        }
    }

    pub fn is_transitive(&self, r: &Role) -> bool {
        self.transitive.contains(r.name())
    }

    /// All directed roles `r` with `r ⊑* sup`, including `sup` itself.
    pub fn subs_of(&self, sup: &Role) -> Vec<Role> {
        match self.id_of(sup) {
            None => vec![sup.clone()],
            Some(s) => (0..self.role_count())
                .filter(|&r| self.is_sub_id(r, s))
                .map(|r| self.role_of(r))
                .collect(),
        }
    }

    /// All directed roles in the hierarchy.
    pub fn roles(&self) -> impl Iterator<Item = Role> + '_ {
        (0..self.role_count()).map(|i| self.role_of(i))
    }
}

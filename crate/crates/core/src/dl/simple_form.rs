use std::collections::HashMap;

use super::concept::{Concept, Name};
use super::ontology::TBox;

pub const SIMPLE_FORM_PREFIX: &str = "_:sf";

/// Rewrites every GCI so that no side nests quantifiers: each quantifier filler
/// of depth ≥ 1 is replaced by a fresh name `_:sf<n>` defined by two GCIs.
/// Identical fillers share one name.
pub fn to_simple_form(t: &TBox) -> TBox {
    let mut sf = SimpleForm::new(t);
    let mut out = TBox {
        gcis: Vec::with_capacity(t.gcis.len()),
        role_inclusions: t.role_inclusions.clone(),
        transitive: t.transitive.clone(),
    };
    for g in &t.gcis {
        let lhs = sf.flatten(&g.lhs);
        let rhs = sf.flatten(&g.rhs);
        out.add_gci(lhs, rhs);
    }
    out.gcis.extend(sf.definitions);
    out
}

struct SimpleForm {
    next: usize,
    names: HashMap<Concept, Name>,
    definitions: Vec<super::ontology::Gci>,
}

impl SimpleForm {
    fn new(t: &TBox) -> Self {
        let next = t
            .concept_names()
            .iter()
            .filter_map(|n| n.as_str().strip_prefix(SIMPLE_FORM_PREFIX)?.parse::<usize>().ok())
            .map(|n| n + 1)
            .max()
            .unwrap_or(0);
        SimpleForm { next, names: HashMap::new(), definitions: Vec::new() }
    }

    fn name_for(&mut self, filler: Concept) -> Concept {
        if let Some(n) = self.names.get(&filler) {
            return Concept::Atomic(n.clone());
        }
        let name = Name::from(format!("{SIMPLE_FORM_PREFIX}{}", self.next));
        self.next += 1;
        let atom = Concept::Atomic(name.clone());
        self.definitions.push(super::ontology::Gci::new(atom.clone(), filler.clone()));
        self.definitions.push(super::ontology::Gci::new(filler.clone(), atom.clone()));
        self.names.insert(filler, name);
        atom
    }

    /// Returns a concept of depth ≤ 1 whose fillers are quantifier-free.
    fn flatten(&mut self, c: &Concept) -> Concept {
        match c {
            Concept::Top | Concept::Bottom | Concept::Atomic(_) | Concept::Nominal(_) => c.clone(),
            Concept::Not(inner) => Concept::not(self.flatten(inner)),
            Concept::And(cs) => Concept::and(cs.iter().map(|x| self.flatten(x))),
            Concept::Or(cs) => Concept::or(cs.iter().map(|x| self.flatten(x))),
            Concept::Exists(r, f) | Concept::Forall(r, f) => {
                let mut filler = self.flatten(f);
                if filler.quantification_depth() >= 1 {
                    filler = self.name_for(filler);
                }
                if matches!(c, Concept::Exists(..)) {
                    Concept::exists(r.clone(), filler)
                } else {
                    Concept::forall(r.clone(), filler)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dl::Role;

    fn a(n: &str) -> Concept {
        Concept::atomic(n)
    }

    fn ex(r: &str, c: Concept) -> Concept {
        Concept::exists(Role::named(r), c)
    }

    #[test]
    fn nested_existential_gets_a_name() {
        let mut t = TBox::new();
        t.add_gci(ex("R1", ex("R2", a("C"))), a("E"));
        let s = to_simple_form(&t);
        let d = a("_:sf0");
        assert_eq!(s.gcis[0].lhs, ex("R1", d.clone()));
        assert_eq!(s.gcis[0].rhs, a("E"));
        assert_eq!(s.gcis.len(), 3);
        assert!(s.gcis.iter().any(|g| g.lhs == d && g.rhs == ex("R2", a("C"))));
        assert!(s.gcis.iter().any(|g| g.rhs == d && g.lhs == ex("R2", a("C"))));
    }

    #[test]
    fn atomic_inclusion_is_unchanged() {
        let mut t = TBox::new();
        t.add_gci(a("A"), a("B"));
        assert_eq!(to_simple_form(&t), t);
    }

    #[test]
    fn one_name_for_a_mixed_filler() {
        let mut t = TBox::new();
        t.add_gci(ex("R1", Concept::and([a("A"), ex("R2", a("A"))])), a("E"));
        let s = to_simple_form(&t);
        assert_eq!(s.gcis.len(), 3);
        for g in &s.gcis {
            assert!(g.lhs.quantification_depth() < 2 && g.rhs.quantification_depth() < 2);
        }
    }

    #[test]
    fn fresh_names_avoid_existing_ones() {
        let mut t = TBox::new();
        t.add_gci(a("_:sf3"), ex("R", ex("R", a("A"))));
        let s = to_simple_form(&t);
        assert!(s.gcis.iter().any(|g| g.lhs == a("_:sf4")));
    }
}

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Prefix reserved for names minted by the reasoner itself.
pub const RESERVED_PREFIX: &str = "_:";

/// An interned-by-sharing symbol: concept, role or individual name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_reserved(&self) -> bool {
        self.0.starts_with(RESERVED_PREFIX)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl From<String> for Name {
    fn from(s: String) -> Self {
        Name(Arc::from(s))
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl serde::Serialize for Name {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// A role name or the inverse of a role name. `R⁻⁻` cannot be represented.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Role {
    name: Name,
    inverted: bool,
}

impl Role {
    pub fn named(name: impl Into<Name>) -> Self {
        Role { name: name.into(), inverted: false }
    }

    pub fn inverse_of(name: impl Into<Name>) -> Self {
        Role { name: name.into(), inverted: true }
    }

    /// `Inv(R)`: `R ↦ R⁻`, `P⁻ ↦ P`.
    pub fn inv(&self) -> Role {
        Role { name: self.name.clone(), inverted: !self.inverted }
    }

    pub fn name(&self) -> &Name {
        &self.name
    }

    pub fn is_inverse(&self) -> bool {
        self.inverted
    }
}

impl fmt::Debug for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "{}⁻", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "ObjectInverseOf({})", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

/// A SHIO concept term.
///
/// `And`/`Or` are only built through [`Concept::and`] and [`Concept::or`], which
/// flatten nested connectives of the same kind, drop neutral elements and
/// deduplicate; an `And`/`Or` value therefore always has at least two children.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Concept {
    Top,
    Bottom,
    Atomic(Name),
    Nominal(Name),
    Not(Box<Concept>),
    And(BTreeSet<Concept>),
    Or(BTreeSet<Concept>),
    Exists(Role, Box<Concept>),
    Forall(Role, Box<Concept>),
}

impl Concept {
    pub fn atomic(name: impl Into<Name>) -> Self {
        Concept::Atomic(name.into())
    }

    pub fn nominal(name: impl Into<Name>) -> Self {
        Concept::Nominal(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Concept) -> Self {
        Concept::Not(Box::new(c))
    }

    pub fn exists(role: Role, filler: Concept) -> Self {
        Concept::Exists(role, Box::new(filler))
    }

    pub fn forall(role: Role, filler: Concept) -> Self {
        Concept::Forall(role, Box::new(filler))
    }

    pub fn and<I: IntoIterator<Item = Concept>>(items: I) -> Self {
        let mut set = BTreeSet::new();
        for c in items {
            match c {
                Concept::Top => {}
                Concept::Bottom => return Concept::Bottom,
                Concept::And(inner) => set.extend(inner),
                other => {
                    set.insert(other);
                }
            }
        }
        match set.len() {
            0 => Concept::Top,
            1 => set.into_iter().next().unwrap(),
            _ => Concept::And(set),
        }
    }

    pub fn or<I: IntoIterator<Item = Concept>>(items: I) -> Self {
        let mut set = BTreeSet::new();
        for c in items {
            match c {
                Concept::Bottom => {}
                Concept::Top => return Concept::Top,
                Concept::Or(inner) => set.extend(inner),
                other => {
                    set.insert(other);
                }
            }
        }
        match set.len() {
            0 => Concept::Bottom,
            1 => set.into_iter().next().unwrap(),
            _ => Concept::Or(set),
        }
    }

    /// Rebuilds the term bottom-up through the canonical constructors.
    pub fn canonicalize(&self) -> Concept {
        match self {
            Concept::Top | Concept::Bottom | Concept::Atomic(_) | Concept::Nominal(_) => self.clone(),
            Concept::Not(c) => Concept::not(c.canonicalize()),
            Concept::And(cs) => Concept::and(cs.iter().map(Concept::canonicalize)),
            Concept::Or(cs) => Concept::or(cs.iter().map(Concept::canonicalize)),
            Concept::Exists(r, c) => Concept::exists(r.clone(), c.canonicalize()),
            Concept::Forall(r, c) => Concept::forall(r.clone(), c.canonicalize()),
        }
    }

    /// Negation normal form: `Not` only in front of atomic concepts and nominals.
    pub fn nnf(&self) -> Concept {
        match self {
            Concept::Top | Concept::Bottom | Concept::Atomic(_) | Concept::Nominal(_) => self.clone(),
            Concept::Not(c) => c.negated_nnf(),
            Concept::And(cs) => Concept::and(cs.iter().map(Concept::nnf)),
            Concept::Or(cs) => Concept::or(cs.iter().map(Concept::nnf)),
            Concept::Exists(r, c) => Concept::exists(r.clone(), c.nnf()),
            Concept::Forall(r, c) => Concept::forall(r.clone(), c.nnf()),
        }
    }

    /// `nnf(¬self)`.
    pub fn negated_nnf(&self) -> Concept {
        match self {
            Concept::Top => Concept::Bottom,
            Concept::Bottom => Concept::Top,
            Concept::Atomic(_) | Concept::Nominal(_) => Concept::not(self.clone()),
            Concept::Not(c) => c.nnf(),
            Concept::And(cs) => Concept::or(cs.iter().map(Concept::negated_nnf)),
            Concept::Or(cs) => Concept::and(cs.iter().map(Concept::negated_nnf)),
            Concept::Exists(r, c) => Concept::forall(r.clone(), c.negated_nnf()),
            Concept::Forall(r, c) => Concept::exists(r.clone(), c.negated_nnf()),
        }
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            Concept::Top | Concept::Bottom | Concept::Atomic(_) | Concept::Nominal(_) => true,
            Concept::Not(c) => matches!(**c, Concept::Atomic(_) | Concept::Nominal(_)),
            Concept::And(cs) | Concept::Or(cs) => cs.iter().all(Concept::is_nnf),
            Concept::Exists(_, c) | Concept::Forall(_, c) => c.is_nnf(),
        }
    }

    /// Maximum nesting of quantifiers.
    pub fn quantification_depth(&self) -> usize {
        match self {
            Concept::Top | Concept::Bottom | Concept::Atomic(_) | Concept::Nominal(_) => 0,
            Concept::Not(c) => c.quantification_depth(),
            Concept::And(cs) | Concept::Or(cs) => {
                cs.iter().map(Concept::quantification_depth).max().unwrap_or(0)
            }
            Concept::Exists(_, c) | Concept::Forall(_, c) => 1 + c.quantification_depth(),
        }
    }

    /// Pre-order walk over every subconcept, including `self`.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Concept)) {
        f(self);
        match self {
            Concept::Top | Concept::Bottom | Concept::Atomic(_) | Concept::Nominal(_) => {}
            Concept::Not(c) | Concept::Exists(_, c) | Concept::Forall(_, c) => c.visit(f),
            Concept::And(cs) | Concept::Or(cs) => cs.iter().for_each(|c| c.visit(f)),
        }
    }

    pub fn atomic_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit(&mut |c| {
            if let Concept::Atomic(n) = c {
                out.insert(n.clone());
            }
        });
        out
    }

    pub fn nominals(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit(&mut |c| {
            if let Concept::Nominal(n) = c {
                out.insert(n.clone());
            }
        });
        out
    }

    pub fn role_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit(&mut |c| {
            if let Concept::Exists(r, _) | Concept::Forall(r, _) = c {
                out.insert(r.name().clone());
            }
        });
        out
    }

    /// Replaces every nominal `{o}` for which `f` returns a concept.
    pub fn replace_nominals(&self, f: &impl Fn(&Name) -> Option<Concept>) -> Concept {
        match self {
            Concept::Nominal(n) => f(n).unwrap_or_else(|| self.clone()),
            Concept::Top | Concept::Bottom | Concept::Atomic(_) => self.clone(),
            Concept::Not(c) => Concept::not(c.replace_nominals(f)),
            Concept::And(cs) => Concept::and(cs.iter().map(|c| c.replace_nominals(f))),
            Concept::Or(cs) => Concept::or(cs.iter().map(|c| c.replace_nominals(f))),
            Concept::Exists(r, c) => Concept::exists(r.clone(), c.replace_nominals(f)),
            Concept::Forall(r, c) => Concept::forall(r.clone(), c.replace_nominals(f)),
        }
    }
}

impl fmt::Debug for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Top => f.write_str("⊤"),
            Concept::Bottom => f.write_str("⊥"),
            Concept::Atomic(n) => write!(f, "{n}"),
            Concept::Nominal(n) => write!(f, "{{{n}}}"),
            Concept::Not(c) => write!(f, "¬{c:?}"),
            Concept::And(cs) | Concept::Or(cs) => {
                let sep = if matches!(self, Concept::And(_)) { " ⊓ " } else { " ⊔ " };
                f.write_str("(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    write!(f, "{c:?}")?;
                }
                f.write_str(")")
            }
            Concept::Exists(r, c) => write!(f, "∃{r:?}.{c:?}"),
            Concept::Forall(r, c) => write!(f, "∀{r:?}.{c:?}"),
        }
    }
}

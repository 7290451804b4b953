use std::sync::Arc;

/// Sorted set of branch-point ids a fact depends on. Empty for facts that
/// hold unconditionally.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub(crate) struct Deps(Option<Arc<[u32]>>);

impl std::fmt::Debug for Deps {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Deps {
    pub fn none() -> Self {
        Deps(None)
    }

    pub fn single(id: u32) -> Self {
        Deps(Some(Arc::from([id])))
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().flat_map(|s| s.iter().copied())
    }

    pub fn max(&self) -> Option<u32> {
        self.0.as_ref().and_then(|s| s.last().copied())
    }

    pub fn union(&self, other: &Deps) -> Deps {
        match (&self.0, &other.0) {
            (None, _) => other.clone(),
            (_, None) => self.clone(),
            (Some(a), Some(b)) => {
                if Arc::ptr_eq(a, b) {
                    return self.clone();
                }
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() && j < b.len() {
                    match a[i].cmp(&b[j]) {
                        std::cmp::Ordering::Less => {
                            out.push(a[i]);
                            i += 1;
                        }
                        std::cmp::Ordering::Greater => {
                            out.push(b[j]);
                            j += 1;
                        }
                        std::cmp::Ordering::Equal => {
                            out.push(a[i]);
                            i += 1;
                            j += 1;
                        }
                    }
                }
                out.extend_from_slice(&a[i..]);
                out.extend_from_slice(&b[j..]);
                if out.len() == a.len() {
                    return self.clone();
                }
                if out.len() == b.len() {
                    return other.clone();
                }
                Deps(Some(Arc::from(out)))
            }
        }
    }

    pub fn with(&self, id: u32) -> Deps {
        self.union(&Deps::single(id))
    }

    pub fn without(&self, id: u32) -> Deps {
        match &self.0 {
            Some(s) if s.contains(&id) => {
                let v: Vec<u32> = s.iter().copied().filter(|&x| x != id).collect();
                if v.is_empty() {
                    Deps(None)
                } else {
                    Deps(Some(Arc::from(v)))
                }
            }
            _ => self.clone(),
        }
    }
}

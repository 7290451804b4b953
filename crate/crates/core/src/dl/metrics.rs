use serde::Serialize;

use super::concept::Concept;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConceptMetrics {
    pub quantification_depth: usize,
    pub conjunct_count: usize,
    pub existential_count: usize,
}

pub fn metrics(c: &Concept) -> ConceptMetrics {
    let mut existential_count = 0;
    c.visit(&mut |sub| {
        if matches!(sub, Concept::Exists(..)) {
            existential_count += 1;
        }
    });
    ConceptMetrics {
        quantification_depth: c.quantification_depth(),
        conjunct_count: match c {
            Concept::And(cs) => cs.len(),
            _ => 1,
        },
        existential_count,
    }
}

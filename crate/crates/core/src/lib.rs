//! Instance checking over SHI ontologies by rolling up query-relevant ABox
//! assertions into concepts and deciding membership with TBox subsumption.

pub mod bench;
pub mod dl;
pub mod syntax;
pub mod rollup;
pub mod syncond;
pub mod query;
pub mod tableau;

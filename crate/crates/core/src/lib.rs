//! Ontology alignment as link prediction over a merged triple store.
//!
//! Two ontologies are parsed into labeled triples ([`ontology_io`]), merged
//! into one text-keyed triple store ([`triple_factory`]), embedded with one of
//! fifteen knowledge-graph embedding models ([`kge`], [`trainer`]), and aligned
//! by cosine similarity between the learned entity vectors ([`aligner`]).
//! [`evaluator`] scores the result against a reference alignment and
//! [`synth`] generates ontology pairs with known ground truth.

pub mod aligner;
pub mod checkpoint;
pub mod error;
pub mod evaluator;
pub mod kge;
pub mod ontology_io;
pub mod synth;
pub mod trainer;
pub mod triple_factory;

pub use error::{Error, Result, Stage};

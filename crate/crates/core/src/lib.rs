//! Ontology-based information extraction over multi-part normative documents.
//!
//! The crate follows the usual extraction workflow: documents are ingested into
//! a [`corpus::Corpus`], ontologies are loaded as annotation vocabularies, the
//! annotation pipeline produces stand-off [`annotate::Annotation`]s, and the
//! extraction, population and consistency stages turn those annotations into
//! entities, candidate classes and typed findings. [`report`] writes everything
//! out as a deterministic bundle.

pub mod annotate;
pub mod consistency;
pub mod corpus;
pub mod extract;
pub mod ontology;
pub mod populate;
pub mod report;
pub mod span;
pub mod workflow;

pub use span::Span;

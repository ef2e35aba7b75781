//! SKOS triple encoding and Turtle serialization.
//!
//! Split into the term/triple model ([`model`]), well-known namespaces
//! ([`ns`]), the snapshot/grouping/mapping encoders ([`encode`]) and the
//! deterministic Turtle writer with its round-trip subset parser
//! ([`turtle`]).

pub mod encode;
pub mod model;
pub mod ns;
pub mod turtle;

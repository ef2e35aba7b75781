//! Versioned SKOS encoding of code lists.
//!
//! A *code list* is an authority file that assigns short codes to entities —
//! country codes, subdivision codes, currency codes and the like. Code lists
//! change over time: entities are created, dissolved, split, merged, renamed
//! and recoded, and the maintenance agency publishes those changes as dated
//! newsletters. Encoding only the latest state of such a list loses the
//! history; encoding every state without connecting them loses the identity
//! of codes across revisions.
//!
//! This crate models the full life cycle:
//!
//! * [`vocab`] — immutable snapshots of a code list: concepts with labels and
//!   notations, concept schemes and collections, hierarchy and membership,
//!   plus a lint-style validator.
//! * [`langtag`] — the RFC 4646 subset used for label language tags,
//!   including the private-use `x-notation-<kind>` convention that lets a
//!   notation travel inside a plain literal's language tag.
//! * [`ledger`] — the change ledger: a tab-separated interchange format
//!   listing an initial snapshot and a series of dated newsletters, and the
//!   rules that turn each change event into mapping edges between versions.
//! * [`version`] — the version graph: one URI namespace per published
//!   version, mapping edges between adjacent versions, and resolution of a
//!   code forward or backward through the graph or by date.
//! * [`rdf`] — SKOS triple encoding of snapshots, groupings and mappings,
//!   a deterministic Turtle serializer and a round-trip subset parser.
//! * [`cli`] — the `skoslist` command-line tool built from the above.

#![warn(missing_docs)]

pub mod cli;
pub mod langtag;
pub mod ledger;
pub mod rdf;
pub mod version;
pub mod vocab;

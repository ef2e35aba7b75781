//! Well-known namespaces and vocabulary terms.
//!
//! SKOS and OWL are fixed; code-list namespaces are configuration and live in
//! [`crate::rdf::encode::UriStrategy`].

use super::model::Uri;

/// The SKOS core vocabulary namespace.
pub const SKOS: &str = "http://www.w3.org/2004/02/skos/core#";

/// The OWL namespace (for `owl:sameAs`).
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";

/// The RDF namespace (for `rdf:type`, written `a` in Turtle).
pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";

/// `rdf:type`.
pub fn rdf_type() -> Uri {
    Uri::new(format!("{RDF}type")).expect("well-known URI")
}

/// A term in the SKOS namespace: `skos(\"Concept\")`, `skos(\"prefLabel\")`…
pub fn skos(local: &str) -> Uri {
    Uri::new(format!("{SKOS}{local}")).expect("SKOS local names are URI-safe")
}

/// A term in the OWL namespace: `owl(\"sameAs\")`.
pub fn owl(local: &str) -> Uri {
    Uri::new(format!("{OWL}{local}")).expect("OWL local names are URI-safe")
}

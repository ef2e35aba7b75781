//! RDF terms, triples and prefix maps.
//!
//! The model is deliberately small: URIs and optionally language-tagged
//! literals. No blank nodes, no typed literals — code lists do not need them,
//! and leaving them out keeps serialization canonical and parsing total.

use std::fmt;

use thiserror::Error;

use crate::langtag::LanguageTag;

/// Error raised for text that does not pass the URI well-formedness check.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid URI `{text}`: {reason}")]
pub struct InvalidUri {
    /// The rejected text.
    pub text: String,
    /// What was expected.
    pub reason: &'static str,
}

/// An absolute URI.
///
/// Validation is shallow — a scheme followed by at least one character, no
/// whitespace or characters that would break `<…>` serialization — because
/// the crate mints URIs from validated namespaces and codes anyway.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Uri(String);

impl Uri {
    /// Validates `text` as an absolute URI.
    pub fn new(text: impl Into<String>) -> Result<Self, InvalidUri> {
        let text = text.into();
        let scheme_ok = match text.find(':') {
            Some(index) if index > 0 => text[..index]
                .chars()
                .enumerate()
                .all(|(i, c)| c.is_ascii_alphabetic() || (i > 0 && "+-.0123456789".contains(c))),
            _ => false,
        };
        if !scheme_ok {
            return Err(InvalidUri { text, reason: "an absolute URI starts with a scheme" });
        }
        if text.chars().any(|c| c.is_ascii_control() || " <>\"{}|^`\\".contains(c)) {
            return Err(InvalidUri {
                text,
                reason: "URIs must not contain whitespace, control or angle-bracket characters",
            });
        }
        Ok(Uri(text))
    }

    /// The URI as text.
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// This URI with `suffix` appended — the namespace + local name idiom.
    /// The suffix must keep the result well-formed.
    pub fn join(&self, suffix: &str) -> Result<Self, InvalidUri> {
        Uri::new(format!("{}{suffix}", self.0))
    }
}

impl fmt::Display for Uri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Uri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// A triple's object position: URI or literal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    /// A resource.
    Uri(Uri),
    /// A literal with optional language tag. No typed literals: codes and
    /// numbers are published as plain strings.
    Literal {
        /// The literal text, unescaped.
        text: String,
        /// Language of the text, if any.
        lang: Option<LanguageTag>,
    },
}

impl Term {
    /// Convenience constructor for a plain literal.
    pub fn literal(text: impl Into<String>) -> Self {
        Term::Literal { text: text.into(), lang: None }
    }

    /// Convenience constructor for a language-tagged literal.
    pub fn tagged(text: impl Into<String>, lang: LanguageTag) -> Self {
        Term::Literal { text: text.into(), lang: Some(lang) }
    }
}

/// One RDF statement. Subjects and predicates are URIs (no blank nodes).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Triple {
    /// Statement subject.
    pub subject: Uri,
    /// Statement predicate.
    pub predicate: Uri,
    /// Statement object.
    pub object: Term,
}

impl Triple {
    /// Builds a triple.
    pub fn new(subject: Uri, predicate: Uri, object: Term) -> Self {
        Triple { subject, predicate, object }
    }
}

/// Error raised when extending a [`PrefixMap`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrefixError {
    /// Prefix names must be unique within a map.
    #[error("prefix `{0}` is already declared")]
    DuplicatePrefix(String),
    /// Prefix name out of shape.
    #[error("invalid prefix `{0}`: prefixes are letters, digits, `_` and interior `-`")]
    InvalidPrefix(String),
}

/// An ordered prefix → namespace table.
///
/// Order is significant: `@prefix` lines are written in table order, and
/// subjects sort by the position of their namespace here. Prefix names are
/// unique; namespaces may repeat (the first entry wins when rendering).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixMap {
    entries: Vec<(String, Uri)>,
}

impl PrefixMap {
    /// An empty map.
    pub fn new() -> Self {
        PrefixMap::default()
    }

    /// Appends a prefix. The empty prefix (`:`) is allowed.
    pub fn add(&mut self, prefix: impl Into<String>, namespace: Uri) -> Result<(), PrefixError> {
        let prefix = prefix.into();
        let shape_ok = prefix.is_empty()
            || (prefix.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
                && !prefix.starts_with('-')
                && !prefix.ends_with('-'));
        if !shape_ok {
            return Err(PrefixError::InvalidPrefix(prefix));
        }
        if self.entries.iter().any(|(existing, _)| *existing == prefix) {
            return Err(PrefixError::DuplicatePrefix(prefix));
        }
        self.entries.push((prefix, namespace));
        Ok(())
    }

    /// The entries in declaration order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Uri)> {
        self.entries.iter().map(|(p, ns)| (p.as_str(), ns))
    }

    /// Number of declared prefixes.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// True when no prefix is declared.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Namespace bound to `prefix`, if declared.
    pub fn namespace(&self, prefix: &str) -> Option<&Uri> {
        self.entries.iter().find(|(p, _)| p == prefix).map(|(_, ns)| ns)
    }

    /// Longest-namespace match for `uri`: the entry index and the local
    /// remainder. Among equal namespaces the earliest entry wins.
    pub fn best_match<'a>(&self, uri: &'a Uri) -> Option<(usize, &'a str)> {
        let mut best: Option<(usize, usize)> = None; // (namespace length, index)
        for (index, (_, namespace)) in self.entries.iter().enumerate() {
            let ns = namespace.as_str();
            if uri.as_str().starts_with(ns) {
                let candidate = (ns.len(), index);
                best = Some(match best {
                    // Longer namespace wins; first entry wins a duplicate.
                    Some((len, idx)) if len >= candidate.0 => (len, idx),
                    _ => candidate,
                });
            }
        }
        best.map(|(len, index)| (index, &uri.as_str()[len..]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uri(text: &str) -> Uri {
        Uri::new(text).expect(text)
    }

    #[test]
    fn uri_validation() {
        assert!(Uri::new("http://iso.org/iso3166/").is_ok());
        assert!(Uri::new("urn:example:a").is_ok());
        assert!(Uri::new("").is_err());
        assert!(Uri::new("no-scheme").is_err());
        assert!(Uri::new(":missing").is_err());
        assert!(Uri::new("http://iso.org/a b").is_err());
        assert!(Uri::new("http://iso.org/<a>").is_err());
    }

    #[test]
    fn join_appends_local_names() {
        let ns = uri("http://iso.org/iso3166/");
        assert_eq!(ns.join("FR").unwrap().as_str(), "http://iso.org/iso3166/FR");
        assert!(ns.join("a b").is_err());
    }

    #[test]
    fn prefix_map_keeps_order_and_uniqueness() {
        let mut map = PrefixMap::new();
        map.add("skos", uri("http://www.w3.org/2004/02/skos/core#")).unwrap();
        map.add("iso3166", uri("http://iso.org/iso3166/")).unwrap();
        assert_eq!(
            map.iter().map(|(p, _)| p).collect::<Vec<_>>(),
            vec!["skos", "iso3166"]
        );
        assert_eq!(
            map.add("skos", uri("http://example.org/")).unwrap_err(),
            PrefixError::DuplicatePrefix("skos".to_owned())
        );
        // The same namespace may be declared under two prefixes.
        map.add("countries", uri("http://iso.org/iso3166/")).unwrap();
        assert_eq!(map.len(), 3);
        assert!(map.add("bad prefix", uri("http://example.org/")).is_err());
    }

    #[test]
    fn best_match_prefers_the_longest_namespace() {
        let mut map = PrefixMap::new();
        map.add("iso3166", uri("http://iso.org/iso3166/")).unwrap();
        map.add("iso3166-2", uri("http://iso.org/iso3166/2/")).unwrap();
        let subject = uri("http://iso.org/iso3166/2/FR-regions");
        assert_eq!(map.best_match(&subject), Some((1, "FR-regions")));
        let bare = uri("http://iso.org/iso3166/2/");
        assert_eq!(map.best_match(&bare), Some((1, "")));
        let concept = uri("http://iso.org/iso3166/FR-E");
        assert_eq!(map.best_match(&concept), Some((0, "FR-E")));
        let foreign = uri("http://example.org/x");
        assert_eq!(map.best_match(&foreign), None);
    }

    #[test]
    fn duplicate_namespaces_resolve_to_the_first_entry() {
        let mut map = PrefixMap::new();
        map.add("a", uri("http://iso.org/iso3166/")).unwrap();
        map.add("b", uri("http://iso.org/iso3166/")).unwrap();
        let subject = uri("http://iso.org/iso3166/FR");
        assert_eq!(map.best_match(&subject), Some((0, "FR")));
    }
}

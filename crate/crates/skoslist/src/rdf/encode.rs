//! Encoders turning snapshots and version graphs into triple sets.
//!
//! Three encoders cover the three kinds of statements a code list makes:
//! [`encode_snapshot`] writes one version's concepts and containers in
//! full, [`encode_grouping`] writes only the container skeleton (types and
//! memberships), and [`encode_mappings`] writes the cross-version identity
//! statements of a [`VersionGraph`].
//!
//! Notations — code-form labels like `FR`, `FRA`, `250` — can be encoded
//! three ways, chosen by [`NotationStyle`]:
//!
//! * `Property`: one dedicated property per notation kind
//!   (`iso3166:twoLetterCode "FR"`), declared on the concept scheme via
//!   `skos:notationPropery` (a proposed relation; see [`Spelling`]).
//! * `Langtag`: preferred labels carrying private-use language tags
//!   (`"FR"@x-notation-twoletter`).
//! * `Zxx`: preferred labels in the `zxx` (no linguistic content)
//!   language — readable everywhere, but limited to one notation per
//!   concept since preferred labels are unique per language.
//!
//! Where each resource lives is decided by a [`UriStrategy`]: concepts sit
//! in the base namespace, the scheme's own container is the bare base
//! namespace, containers named `<scheme>-<suffix>` own the `<base><suffix>/`
//! namespace, and every other container lives in the namespace of its
//! nearest namespace-owning ancestor.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::langtag::LanguageTag;
use crate::ledger::MappingRelation;
use crate::rdf::model::{Term, Triple, Uri};
use crate::rdf::ns::{owl, rdf_type, skos};
use crate::version::VersionGraph;
use crate::vocab::{Code, Concept, ContainerKind, Snapshot};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// How notations are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NotationStyle {
    /// One dedicated property per notation kind, declared on the scheme.
    Property,
    /// Preferred labels with private-use `x-notation-<kind>` language tags.
    Langtag,
    /// Preferred labels in the `zxx` (no linguistic content) language.
    Zxx,
}

/// Spelling of the proposed notation-declaration relation.
///
/// The relation was proposed as `skos:notationPropery` (sic); the obvious
/// intended spelling is `skos:notationProperty`. Both are supported so
/// output can either stay faithful to the proposal text or read correctly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spelling {
    /// `skos:notationPropery`, verbatim from the proposal.
    Paper,
    /// `skos:notationProperty`.
    Corrected,
}

impl Spelling {
    fn relation_local(self) -> &'static str {
        match self {
            Spelling::Paper => "notationPropery",
            Spelling::Corrected => "notationProperty",
        }
    }
}

/// Errors from encoding a snapshot.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    /// The `zxx` style writes notations as preferred labels of one shared
    /// language, so it cannot express more than one notation per concept.
    #[error("style zxx cannot represent concept `{code}` carrying {count} notations")]
    StyleUnrepresentable {
        /// The concept with too many notations.
        code: Code,
        /// How many notations it carries.
        count: usize,
    },
}

/// The property local name for a notation kind: well-known kinds map to
/// their camel-cased property (`twoletter` → `twoLetterCode`), anything
/// else is used verbatim.
pub fn notation_property_local(kind: &str) -> &str {
    match kind {
        "twoletter" => "twoLetterCode",
        "threeletter" => "threeLetterCode",
        "numerical" => "numericalCode",
        other => other,
    }
}

// ---------------------------------------------------------------------------
// URI strategy
// ---------------------------------------------------------------------------

/// Assigns URIs to the resources of one snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UriStrategy {
    /// Namespace concept URIs are minted under.
    pub concept_ns: Uri,
    /// Namespace the notation properties live in.
    pub notation_ns: Uri,
    container_uris: BTreeMap<Code, Uri>,
}

impl UriStrategy {
    /// The namespace layout used throughout: concepts under `base`, the
    /// scheme's container as the bare `base` namespace, containers named
    /// `<scheme>-<suffix>` as the bare `<base><suffix>/` namespace, and
    /// every other container under its nearest namespace-owning ancestor
    /// (falling back to `base` for orphans).
    ///
    /// Versioned exports use the same layout with a version namespace as
    /// `base`.
    pub fn profile(snapshot: &Snapshot, scheme_id: &Code, base: &Uri) -> Self {
        let owned_ns = |id: &Code| -> Option<Uri> {
            if id == scheme_id {
                return Some(base.clone());
            }
            id.as_str()
                .strip_prefix(&format!("{scheme_id}-"))
                .map(|suffix| {
                    base.join(&format!("{suffix}/"))
                        .expect("code characters are URI-safe")
                })
        };
        // Each member's first containing container, in container order.
        let mut parent: BTreeMap<&Code, &Code> = BTreeMap::new();
        for (id, container) in &snapshot.containers {
            for member in &container.members {
                parent.entry(member).or_insert(id);
            }
        }
        let mut container_uris = BTreeMap::new();
        for id in snapshot.containers.keys() {
            if let Some(namespace) = owned_ns(id) {
                container_uris.insert(id.clone(), namespace);
                continue;
            }
            let mut namespace = base.clone();
            let mut seen: BTreeSet<&Code> = BTreeSet::new();
            let mut cursor = id;
            while seen.insert(cursor) {
                match parent.get(cursor) {
                    Some(up) => {
                        if let Some(owned) = owned_ns(up) {
                            namespace = owned;
                            break;
                        }
                        cursor = up;
                    }
                    None => break,
                }
            }
            let uri = namespace
                .join(id.as_str())
                .expect("code characters are URI-safe");
            container_uris.insert(id.clone(), uri);
        }
        UriStrategy {
            concept_ns: base.clone(),
            notation_ns: base.clone(),
            container_uris,
        }
    }

    /// The URI of a concept code.
    pub fn concept_uri(&self, code: &Code) -> Uri {
        self.concept_ns
            .join(code.as_str())
            .expect("code characters are URI-safe")
    }

    /// The URI of a container code.
    pub fn container_uri(&self, code: &Code) -> Uri {
        self.container_uris
            .get(code)
            .cloned()
            .unwrap_or_else(|| self.concept_uri(code))
    }

    /// The URI of the dedicated property for a notation kind.
    pub fn notation_property_uri(&self, kind: &str) -> Uri {
        self.notation_ns
            .join(notation_property_local(kind))
            .expect("notation kinds are URI-safe")
    }

    /// The URI of a member, container or concept.
    fn member_uri(&self, snapshot: &Snapshot, code: &Code) -> Uri {
        if snapshot.containers.contains_key(code) {
            self.container_uri(code)
        } else {
            self.concept_uri(code)
        }
    }
}

// ---------------------------------------------------------------------------
// Encoders
// ---------------------------------------------------------------------------

/// Encodes one snapshot in full: per concept a type triple, label triples,
/// hierarchy triples in both directions, and notation triples per style;
/// per container a type triple and its member triples. Under the
/// `Property` style, schemes additionally declare their notation
/// properties.
pub fn encode_snapshot(
    snapshot: &Snapshot,
    strategy: &UriStrategy,
    style: NotationStyle,
    spelling: Spelling,
) -> Result<BTreeSet<Triple>, EncodeError> {
    let mut triples = BTreeSet::new();
    for (code, concept) in &snapshot.concepts {
        let subject = strategy.concept_uri(code);
        triples.insert(Triple::new(
            subject.clone(),
            rdf_type(),
            Term::Uri(skos("Concept")),
        ));
        for label in &concept.pref_labels {
            triples.insert(Triple::new(
                subject.clone(),
                skos("prefLabel"),
                Term::tagged(label.text.clone(), label.lang.clone()),
            ));
        }
        for label in &concept.alt_labels {
            triples.insert(Triple::new(
                subject.clone(),
                skos("altLabel"),
                Term::tagged(label.text.clone(), label.lang.clone()),
            ));
        }
        for broader in &concept.broader {
            triples.insert(Triple::new(
                subject.clone(),
                skos("broader"),
                Term::Uri(strategy.concept_uri(broader)),
            ));
        }
        for narrower in &concept.narrower {
            triples.insert(Triple::new(
                subject.clone(),
                skos("narrower"),
                Term::Uri(strategy.concept_uri(narrower)),
            ));
        }
        encode_notations(&mut triples, concept, &subject, strategy, style)?;
    }
    for (id, container) in &snapshot.containers {
        let subject = strategy.container_uri(id);
        let class = match container.kind {
            ContainerKind::Scheme => "ConceptScheme",
            ContainerKind::Collection => "Collection",
        };
        triples.insert(Triple::new(subject.clone(), rdf_type(), Term::Uri(skos(class))));
        for member in &container.members {
            triples.insert(Triple::new(
                subject.clone(),
                skos("member"),
                Term::Uri(strategy.member_uri(snapshot, member)),
            ));
        }
        if style == NotationStyle::Property && container.kind == ContainerKind::Scheme {
            for kind in &container.notation_kinds {
                triples.insert(Triple::new(
                    subject.clone(),
                    skos(spelling.relation_local()),
                    Term::Uri(strategy.notation_property_uri(kind)),
                ));
            }
        }
    }
    Ok(triples)
}

fn encode_notations(
    triples: &mut BTreeSet<Triple>,
    concept: &Concept,
    subject: &Uri,
    strategy: &UriStrategy,
    style: NotationStyle,
) -> Result<(), EncodeError> {
    match style {
        NotationStyle::Property => {
            for notation in &concept.notations {
                triples.insert(Triple::new(
                    subject.clone(),
                    strategy.notation_property_uri(&notation.kind),
                    Term::literal(notation.value.clone()),
                ));
            }
        }
        NotationStyle::Langtag => {
            for notation in &concept.notations {
                let tag = LanguageTag::for_notation(&notation.kind, None)
                    .expect("notation kinds are valid private subtags");
                triples.insert(Triple::new(
                    subject.clone(),
                    skos("prefLabel"),
                    Term::tagged(notation.value.clone(), tag),
                ));
            }
        }
        NotationStyle::Zxx => {
            if concept.notations.len() > 1 {
                return Err(EncodeError::StyleUnrepresentable {
                    code: concept.code.clone(),
                    count: concept.notations.len(),
                });
            }
            for notation in &concept.notations {
                triples.insert(Triple::new(
                    subject.clone(),
                    skos("prefLabel"),
                    Term::tagged(notation.value.clone(), LanguageTag::zxx()),
                ));
            }
        }
    }
    Ok(())
}

/// Encodes only the container skeleton of a snapshot: one type triple per
/// container and one triple per membership. Concept bodies are left out;
/// concepts appear solely as member objects.
pub fn encode_grouping(snapshot: &Snapshot, strategy: &UriStrategy) -> BTreeSet<Triple> {
    let mut triples = BTreeSet::new();
    for (id, container) in &snapshot.containers {
        let subject = strategy.container_uri(id);
        let class = match container.kind {
            ContainerKind::Scheme => "ConceptScheme",
            ContainerKind::Collection => "Collection",
        };
        triples.insert(Triple::new(subject.clone(), rdf_type(), Term::Uri(skos(class))));
        for member in &container.members {
            triples.insert(Triple::new(
                subject.clone(),
                skos("member"),
                Term::Uri(strategy.member_uri(snapshot, member)),
            ));
        }
    }
    triples
}

/// Encodes the cross-version mapping statements of a version graph: one
/// triple per edge, with `owl:sameAs` for carried-over concepts and
/// `skos:exactMatch`/`skos:narrowMatch`/`skos:broadMatch` for changes.
pub fn encode_mappings(graph: &VersionGraph) -> BTreeSet<Triple> {
    let mut triples = BTreeSet::new();
    for edge in &graph.edges {
        let predicate = match edge.relation {
            MappingRelation::SameAs => owl("sameAs"),
            MappingRelation::ExactMatch => skos("exactMatch"),
            MappingRelation::NarrowMatch => skos("narrowMatch"),
            MappingRelation::BroadMatch => skos("broadMatch"),
        };
        triples.insert(Triple::new(
            edge.from.full(),
            predicate,
            Term::Uri(edge.to.full()),
        ));
    }
    triples
}

// ---------------------------------------------------------------------------

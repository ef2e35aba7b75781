//! The code-list vocabulary model: concepts, containers, snapshots.
//!
//! A snapshot is one published state of a code list. It holds *concepts* (the
//! coded entities, with labels, notations and broader/narrower hierarchy) and
//! *containers* (concept schemes and collections that group concepts or other
//! containers). Snapshots are immutable values: every operation consumes the
//! snapshot and returns the extended one, so earlier states can be kept
//! around simply by cloning before the call.
//!
//! Construction operations reject the mistakes they can see locally
//! (duplicate codes, self-hierarchy, membership cycles), while [`Snapshot::validate`]
//! sweeps a whole snapshot and reports *every* rule breach as a [`Violation`]
//! — lint style, not fail-fast — which is what ledger ingestion relies on to
//! surface domain problems without aborting the parse.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::langtag::LanguageTag;

// ---------------------------------------------------------------------------
// Codes
// ---------------------------------------------------------------------------

/// A code from an authority file: `FR`, `CA-NT`, `iso3166-2`, `FR-regions`.
///
/// Codes are non-empty ASCII strings of letters, digits and interior hyphens.
/// Both cases are accepted — entity codes are conventionally upper-case while
/// scheme and collection identifiers are lower-case. Codes are compared
/// byte-wise; no case folding takes place.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Code(String);

impl Code {
    /// Validates `text` as a code.
    pub fn new(text: impl Into<String>) -> Result<Self, VocabError> {
        let text = text.into();
        let reason = if text.is_empty() {
            Some("codes must not be empty")
        } else if text.starts_with('-') || text.ends_with('-') {
            Some("codes must not start or end with a hyphen")
        } else if !text.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            Some("codes may only contain ASCII letters, digits and hyphens")
        } else {
            None
        };
        match reason {
            Some(reason) => Err(VocabError::InvalidCode { text, reason }),
            None => Ok(Code(text)),
        }
    }

    /// The code as text.
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Code {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl std::str::FromStr for Code {
    type Err = VocabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Code::new(s)
    }
}

// ---------------------------------------------------------------------------
// Labels and notations
// ---------------------------------------------------------------------------

/// A human-readable label in one language.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    /// Label text; non-empty by convention.
    pub text: String,
    /// Language of the text.
    pub lang: LanguageTag,
}

impl Label {
    /// Convenience constructor.
    pub fn new(text: impl Into<String>, lang: LanguageTag) -> Self {
        Label { text: text.into(), lang }
    }
}

/// A formal notation of a concept: the code itself in one of possibly several
/// systems (`twoletter = FR`, `threeletter = FRA`, `numerical = 250`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Notation {
    /// Notation system, a non-empty lowercase alphanumeric token.
    pub kind: String,
    /// Notation value, non-empty.
    pub value: String,
}

impl Notation {
    /// Validates and builds a notation.
    pub fn new(kind: impl Into<String>, value: impl Into<String>) -> Result<Self, VocabError> {
        let kind = kind.into();
        let value = value.into();
        if kind.is_empty() || !kind.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
        {
            return Err(VocabError::InvalidNotation {
                reason: "notation kind must be a non-empty lowercase alphanumeric token",
            });
        }
        if value.is_empty() {
            return Err(VocabError::InvalidNotation { reason: "notation value must not be empty" });
        }
        Ok(Notation { kind, value })
    }
}

// ---------------------------------------------------------------------------
// Concepts and containers
// ---------------------------------------------------------------------------

/// A coded entity: one country, subdivision, currency, …
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    /// The concept's code within its snapshot.
    pub code: Code,
    /// Preferred labels; at most one per language tag.
    pub pref_labels: BTreeSet<Label>,
    /// Alternative labels.
    pub alt_labels: BTreeSet<Label>,
    /// Notations, at most one per kind by convention.
    pub notations: BTreeSet<Notation>,
    /// Codes of broader concepts. Mutually inverse with [`Concept::narrower`].
    pub broader: BTreeSet<Code>,
    /// Codes of narrower concepts. Mutually inverse with [`Concept::broader`].
    pub narrower: BTreeSet<Code>,
}

impl Concept {
    /// A bare concept with the given code.
    pub fn new(code: &Code) -> Self {
        Concept {
            code: code.clone(),
            pref_labels: BTreeSet::new(),
            alt_labels: BTreeSet::new(),
            notations: BTreeSet::new(),
            broader: BTreeSet::new(),
            narrower: BTreeSet::new(),
        }
    }

    /// Chainable: adds a preferred label.
    pub fn with_pref_label(mut self, label: Label) -> Self {
        self.pref_labels.insert(label);
        self
    }

    /// Chainable: adds an alternative label.
    pub fn with_alt_label(mut self, label: Label) -> Self {
        self.alt_labels.insert(label);
        self
    }

    /// Chainable: adds a notation.
    pub fn with_notation(mut self, notation: Notation) -> Self {
        self.notations.insert(notation);
        self
    }
}

/// Whether a container is a concept scheme or a collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ContainerKind {
    /// A `skos:ConceptScheme`: a code list or a part of one.
    Scheme,
    /// A `skos:Collection`: a labelled grouping inside a scheme.
    Collection,
}

/// A concept scheme or collection grouping concepts and other containers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    /// The container's identifier, sharing the code space with concepts.
    pub id: Code,
    /// Scheme or collection.
    pub kind: ContainerKind,
    /// Members in insertion order, distinct; may name concepts or containers.
    pub members: Vec<Code>,
    /// Notation systems declared by this scheme (always empty on
    /// collections). Derived by [`Snapshot::seal`] from member concepts.
    pub notation_kinds: BTreeSet<String>,
}

impl Container {
    /// A bare container with no members.
    pub fn new(id: &Code, kind: ContainerKind) -> Self {
        Container { id: id.clone(), kind, members: Vec::new(), notation_kinds: BTreeSet::new() }
    }
}

// ---------------------------------------------------------------------------
// Errors and violations
// ---------------------------------------------------------------------------

/// Errors raised while building snapshot values.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabError {
    /// Text that does not satisfy the code grammar.
    #[error("invalid code `{text}`: {reason}")]
    InvalidCode {
        /// The rejected text.
        text: String,
        /// What was expected.
        reason: &'static str,
    },
    /// Notation kind or value out of shape.
    #[error("invalid notation: {reason}")]
    InvalidNotation {
        /// What was expected.
        reason: &'static str,
    },
    /// The code is already taken by a concept or container.
    #[error("code `{0}` is already defined")]
    DuplicateCode(Code),
    /// A concept cannot be its own broader or narrower concept.
    #[error("concept `{0}` cannot be broader or narrower than itself")]
    SelfHierarchy(Code),
    /// A referenced code is not part of the snapshot.
    #[error("unknown code `{0}`")]
    UnknownCode(Code),
    /// Adding the membership would close a cycle.
    #[error("adding `{member}` to `{container}` would close a membership cycle")]
    MembershipCycle {
        /// Container the member was to be added to.
        container: Code,
        /// The offending member.
        member: Code,
    },
    /// The code names a concept, not a container.
    #[error("`{0}` is not a container")]
    NotAContainer(Code),
    /// Members are distinct; the code is already a member.
    #[error("`{member}` is already a member of `{container}`")]
    DuplicateMember {
        /// The container.
        container: Code,
        /// The repeated member.
        member: Code,
    },
}

/// One rule breach found by [`Snapshot::validate`].
///
/// Violations order and deduplicate naturally, so a validation report is a
/// sorted list free of repeats.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    /// The same code names both a concept and a container.
    DuplicateCode {
        /// The doubly-used code.
        code: Code,
    },
    /// More than one preferred label in one language.
    DuplicatePrefLabel {
        /// The concept carrying the labels.
        code: Code,
        /// The language with multiple preferred labels.
        lang: LanguageTag,
    },
    /// A concept is broader or narrower than itself.
    SelfHierarchy {
        /// The self-referential concept.
        code: Code,
    },
    /// A hierarchy link recorded in one direction only.
    BrokenInverse {
        /// The broader end of the link.
        broader: Code,
        /// The narrower end of the link.
        narrower: Code,
    },
    /// A reference to a code that does not exist in the snapshot.
    UnknownReference {
        /// The concept or container holding the reference.
        code: Code,
        /// The dangling target.
        referenced: Code,
    },
    /// The container lies on a membership cycle.
    MembershipCycle {
        /// A container on the cycle.
        code: Code,
    },
    /// A member listed more than once.
    DuplicateMember {
        /// The container.
        container: Code,
        /// The repeated member.
        member: Code,
    },
    /// A collection carrying notation kinds (only schemes declare them).
    CollectionWithNotations {
        /// The offending collection.
        code: Code,
    },
}

impl Violation {
    /// Stable machine-readable kind token, as printed by the CLI.
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::DuplicateCode { .. } => "DuplicateCode",
            Violation::DuplicatePrefLabel { .. } => "DuplicatePrefLabel",
            Violation::SelfHierarchy { .. } => "SelfHierarchy",
            Violation::BrokenInverse { .. } => "BrokenInverse",
            Violation::UnknownReference { .. } => "UnknownReference",
            Violation::MembershipCycle { .. } => "MembershipCycle",
            Violation::DuplicateMember { .. } => "DuplicateMember",
            Violation::CollectionWithNotations { .. } => "CollectionWithNotations",
        }
    }

    /// The code the violation is primarily about.
    pub fn code(&self) -> &Code {
        match self {
            Violation::DuplicateCode { code }
            | Violation::DuplicatePrefLabel { code, .. }
            | Violation::SelfHierarchy { code }
            | Violation::MembershipCycle { code }
            | Violation::CollectionWithNotations { code } => code,
            Violation::BrokenInverse { broader, .. } => broader,
            Violation::UnknownReference { code, .. } => code,
            Violation::DuplicateMember { container, .. } => container,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateCode { code } => {
                write!(f, "code `{code}` names both a concept and a container")
            }
            Violation::DuplicatePrefLabel { code, lang } => {
                write!(f, "concept `{code}` has more than one preferred label for `{lang}`")
            }
            Violation::SelfHierarchy { code } => {
                write!(f, "concept `{code}` is broader or narrower than itself")
            }
            Violation::BrokenInverse { broader, narrower } => write!(
                f,
                "hierarchy link `{broader}` > `{narrower}` is not recorded in both directions"
            ),
            Violation::UnknownReference { code, referenced } => {
                write!(f, "`{code}` references unknown code `{referenced}`")
            }
            Violation::MembershipCycle { code } => {
                write!(f, "container `{code}` lies on a membership cycle")
            }
            Violation::DuplicateMember { container, member } => {
                write!(f, "container `{container}` lists member `{member}` more than once")
            }
            Violation::CollectionWithNotations { code } => {
                write!(f, "collection `{code}` declares notation kinds")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Snapshots
// ---------------------------------------------------------------------------

/// One published state of a code list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Snapshot {
    /// Version identifier (`first`, `newsletter-3`, …).
    pub version: String,
    /// Concepts by code.
    pub concepts: BTreeMap<Code, Concept>,
    /// Containers by id.
    pub containers: BTreeMap<Code, Container>,
    /// Codes at the top of the snapshot: not a member of anything and, for
    /// concepts, without broader concepts. Derived by [`Snapshot::seal`].
    pub roots: BTreeSet<Code>,
    /// Codes dissolved by the newsletter that produced this snapshot. The
    /// marker is per-transition: it is not carried into later versions.
    pub deprecated: BTreeSet<Code>,
}

impl Snapshot {
    /// An empty snapshot with the given version id.
    pub fn new(version: impl Into<String>) -> Self {
        Snapshot { version: version.into(), ..Snapshot::default() }
    }

    /// Adds a concept. The code must be free among concepts and containers.
    pub fn add_concept(mut self, concept: Concept) -> Result<Self, VocabError> {
        let code = concept.code.clone();
        if self.concepts.contains_key(&code) || self.containers.contains_key(&code) {
            return Err(VocabError::DuplicateCode(code));
        }
        self.concepts.insert(code, concept);
        Ok(self)
    }

    /// Adds a container. The id must be free among concepts and containers.
    pub fn add_container(mut self, container: Container) -> Result<Self, VocabError> {
        let id = container.id.clone();
        if self.concepts.contains_key(&id) || self.containers.contains_key(&id) {
            return Err(VocabError::DuplicateCode(id));
        }
        self.containers.insert(id, container);
        Ok(self)
    }

    /// Records `narrower` below `broader`, in both directions at once so the
    /// inverse invariant holds by construction. Linking an existing pair
    /// again is a no-op.
    pub fn link_hierarchy(mut self, broader: &Code, narrower: &Code) -> Result<Self, VocabError> {
        if broader == narrower {
            return Err(VocabError::SelfHierarchy(broader.clone()));
        }
        for code in [broader, narrower] {
            if !self.concepts.contains_key(code) {
                return Err(VocabError::UnknownCode(code.clone()));
            }
        }
        self.concepts
            .get_mut(broader)
            .expect("checked above")
            .narrower
            .insert(narrower.clone());
        self.concepts
            .get_mut(narrower)
            .expect("checked above")
            .broader
            .insert(broader.clone());
        Ok(self)
    }

    /// Appends `member` to `container`'s member list, preserving insertion
    /// order. The member may be a concept or another container; cycles and
    /// repeats are rejected.
    pub fn add_member(mut self, container: &Code, member: &Code) -> Result<Self, VocabError> {
        if !self.containers.contains_key(container) {
            if self.concepts.contains_key(container) {
                return Err(VocabError::NotAContainer(container.clone()));
            }
            return Err(VocabError::UnknownCode(container.clone()));
        }
        if !self.concepts.contains_key(member) && !self.containers.contains_key(member) {
            return Err(VocabError::UnknownCode(member.clone()));
        }
        if container == member || self.membership_reaches(member, container) {
            return Err(VocabError::MembershipCycle {
                container: container.clone(),
                member: member.clone(),
            });
        }
        let entry = self.containers.get_mut(container).expect("checked above");
        if entry.members.contains(member) {
            return Err(VocabError::DuplicateMember {
                container: container.clone(),
                member: member.clone(),
            });
        }
        entry.members.push(member.clone());
        Ok(self)
    }

    /// True when `target` is reachable from `from` along membership edges.
    fn membership_reaches(&self, from: &Code, target: &Code) -> bool {
        let mut queue: VecDeque<&Code> = VecDeque::from([from]);
        let mut seen: BTreeSet<&Code> = BTreeSet::from([from]);
        while let Some(current) = queue.pop_front() {
            if current == target {
                return true;
            }
            if let Some(container) = self.containers.get(current) {
                for member in &container.members {
                    if seen.insert(member) {
                        queue.push_back(member);
                    }
                }
            }
        }
        false
    }

    /// Derives the computed parts of the snapshot: root codes and the
    /// notation kinds declared by each scheme.
    ///
    /// A scheme collects the notation kinds of all concepts transitively
    /// reachable through its members; `primary_scheme`, when given, also
    /// collects the kinds of concepts that are members of no container at
    /// all (a code list usually declares its entities without spelling out
    /// every membership).
    pub fn seal(mut self, primary_scheme: Option<&Code>) -> Self {
        // Roots: never listed as a member, and (for concepts) no broader.
        let mut membered: BTreeSet<&Code> = BTreeSet::new();
        for container in self.containers.values() {
            membered.extend(container.members.iter());
        }
        let mut roots: BTreeSet<Code> = BTreeSet::new();
        for (code, concept) in &self.concepts {
            if !membered.contains(code) && concept.broader.is_empty() {
                roots.insert(code.clone());
            }
        }
        for code in self.containers.keys() {
            if !membered.contains(code) {
                roots.insert(code.clone());
            }
        }
        // Notation kinds per scheme.
        let orphan_kinds: BTreeSet<String> = self
            .concepts
            .iter()
            .filter(|(code, _)| !membered.contains(code))
            .flat_map(|(_, concept)| concept.notations.iter().map(|n| n.kind.clone()))
            .collect();
        let mut scheme_kinds: BTreeMap<Code, BTreeSet<String>> = BTreeMap::new();
        for (id, container) in &self.containers {
            if container.kind != ContainerKind::Scheme {
                continue;
            }
            let mut kinds: BTreeSet<String> = self
                .reachable_concepts(id)
                .flat_map(|concept| concept.notations.iter().map(|n| n.kind.clone()))
                .collect();
            if Some(id) == primary_scheme {
                kinds.extend(orphan_kinds.iter().cloned());
            }
            scheme_kinds.insert(id.clone(), kinds);
        }
        for (id, kinds) in scheme_kinds {
            self.containers.get_mut(&id).expect("key from iteration").notation_kinds = kinds;
        }
        self.roots = roots;
        self
    }

    /// The snapshot's primary scheme: the unique root container of scheme
    /// kind, if there is exactly one. Newsletter application re-seals
    /// successor snapshots against it.
    pub fn primary_scheme(&self) -> Option<&Code> {
        let mut schemes = self.roots.iter().filter(|code| {
            matches!(self.containers.get(*code), Some(c) if c.kind == ContainerKind::Scheme)
        });
        match (schemes.next(), schemes.next()) {
            (Some(only), None) => Some(only),
            _ => None,
        }
    }

    /// All concepts transitively reachable from `container` via members.
    fn reachable_concepts(&self, container: &Code) -> impl Iterator<Item = &Concept> {
        let mut queue: VecDeque<&Code> = VecDeque::from([container]);
        let mut seen: BTreeSet<&Code> = BTreeSet::from([container]);
        let mut found: Vec<&Concept> = Vec::new();
        while let Some(current) = queue.pop_front() {
            if let Some(inner) = self.containers.get(current) {
                for member in &inner.members {
                    if seen.insert(member) {
                        queue.push_back(member);
                    }
                }
            } else if let Some(concept) = self.concepts.get(current) {
                found.push(concept);
            }
        }
        found.into_iter()
    }

    /// Checks every domain rule and returns all breaches, sorted and
    /// deduplicated. An empty result means the snapshot is clean.
    pub fn validate(&self) -> Vec<Violation> {
        let mut found: BTreeSet<Violation> = BTreeSet::new();

        // A code must name either a concept or a container, never both.
        for code in self.concepts.keys() {
            if self.containers.contains_key(code) {
                found.insert(Violation::DuplicateCode { code: code.clone() });
            }
        }

        for (code, concept) in &self.concepts {
            // At most one preferred label per language.
            let mut langs: BTreeMap<&LanguageTag, usize> = BTreeMap::new();
            for label in &concept.pref_labels {
                *langs.entry(&label.lang).or_default() += 1;
            }
            for (lang, count) in langs {
                if count > 1 {
                    found.insert(Violation::DuplicatePrefLabel {
                        code: code.clone(),
                        lang: lang.clone(),
                    });
                }
            }
            // Hierarchy: no self-links, no dangling ends, inverses present.
            if concept.broader.contains(code) || concept.narrower.contains(code) {
                found.insert(Violation::SelfHierarchy { code: code.clone() });
            }
            for broader in &concept.broader {
                match self.concepts.get(broader) {
                    None => {
                        found.insert(Violation::UnknownReference {
                            code: code.clone(),
                            referenced: broader.clone(),
                        });
                    }
                    Some(other) if broader != code && !other.narrower.contains(code) => {
                        found.insert(Violation::BrokenInverse {
                            broader: broader.clone(),
                            narrower: code.clone(),
                        });
                    }
                    Some(_) => {}
                }
            }
            for narrower in &concept.narrower {
                match self.concepts.get(narrower) {
                    None => {
                        found.insert(Violation::UnknownReference {
                            code: code.clone(),
                            referenced: narrower.clone(),
                        });
                    }
                    Some(other) if narrower != code && !other.broader.contains(code) => {
                        found.insert(Violation::BrokenInverse {
                            broader: code.clone(),
                            narrower: narrower.clone(),
                        });
                    }
                    Some(_) => {}
                }
            }
        }

        for (id, container) in &self.containers {
            let mut seen_members: BTreeSet<&Code> = BTreeSet::new();
            for member in &container.members {
                if !seen_members.insert(member) {
                    found.insert(Violation::DuplicateMember {
                        container: id.clone(),
                        member: member.clone(),
                    });
                }
                if !self.concepts.contains_key(member) && !self.containers.contains_key(member) {
                    found.insert(Violation::UnknownReference {
                        code: id.clone(),
                        referenced: member.clone(),
                    });
                }
            }
            if container.kind == ContainerKind::Collection && !container.notation_kinds.is_empty()
            {
                found.insert(Violation::CollectionWithNotations { code: id.clone() });
            }
            // A container on a cycle reaches itself through its members.
            if container.members.iter().any(|m| m == id || self.membership_reaches(m, id)) {
                found.insert(Violation::MembershipCycle { code: id.clone() });
            }
        }

        for root in &self.roots {
            if !self.concepts.contains_key(root) && !self.containers.contains_key(root) {
                found.insert(Violation::UnknownReference {
                    code: root.clone(),
                    referenced: root.clone(),
                });
            }
        }

        found.into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn code(text: &str) -> Code {
        Code::new(text).expect(text)
    }

    fn en(text: &str) -> Label {
        Label::new(text, LanguageTag::parse("en").unwrap())
    }

    #[test]
    fn code_grammar() {
        assert!(Code::new("FR").is_ok());
        assert!(Code::new("CA-NT").is_ok());
        assert!(Code::new("FR-35").is_ok());
        // Scheme and collection identifiers are lower-case codes.
        assert!(Code::new("iso3166-2").is_ok());
        assert!(Code::new("FR-regions").is_ok());
        assert!(Code::new("").is_err());
        assert!(Code::new("-FR").is_err());
        assert!(Code::new("FR-").is_err());
        assert!(Code::new("F R").is_err());
        assert!(Code::new("FR_1").is_err());
    }

    #[test]
    fn notation_grammar() {
        assert!(Notation::new("twoletter", "FR").is_ok());
        assert!(Notation::new("", "FR").is_err());
        assert!(Notation::new("twoLetter", "FR").is_err());
        assert!(Notation::new("twoletter", "").is_err());
    }

    #[test]
    fn add_concept_then_duplicate() {
        let fr = Concept::new(&code("FR")).with_pref_label(en("France"));
        let snapshot = Snapshot::new("first").add_concept(fr.clone()).unwrap();
        assert_eq!(snapshot.concepts[&code("FR")].pref_labels.len(), 1);
        assert_eq!(
            snapshot.add_concept(fr).unwrap_err(),
            VocabError::DuplicateCode(code("FR"))
        );
    }

    #[test]
    fn concept_and_container_share_the_code_space() {
        let snapshot = Snapshot::new("first")
            .add_concept(Concept::new(&code("FR")))
            .unwrap();
        let err = snapshot
            .add_container(Container::new(&code("FR"), ContainerKind::Scheme))
            .unwrap_err();
        assert_eq!(err, VocabError::DuplicateCode(code("FR")));
    }

    #[test]
    fn hierarchy_links_are_recorded_both_ways() {
        let snapshot = Snapshot::new("first")
            .add_concept(Concept::new(&code("FR")))
            .unwrap()
            .add_concept(Concept::new(&code("FR-E")))
            .unwrap()
            .link_hierarchy(&code("FR"), &code("FR-E"))
            .unwrap();
        assert!(snapshot.concepts[&code("FR")].narrower.contains(&code("FR-E")));
        assert!(snapshot.concepts[&code("FR-E")].broader.contains(&code("FR")));
        assert!(snapshot.validate().is_empty());
    }

    #[test]
    fn linking_twice_is_idempotent() {
        let base = Snapshot::new("first")
            .add_concept(Concept::new(&code("CA")))
            .unwrap()
            .add_concept(Concept::new(&code("CA-NU")))
            .unwrap();
        let once = base.clone().link_hierarchy(&code("CA"), &code("CA-NU")).unwrap();
        let twice = once
            .clone()
            .link_hierarchy(&code("CA"), &code("CA-NU"))
            .unwrap();
        // Oracle: the expected state built directly.
        let mut expected = base;
        expected
            .concepts
            .get_mut(&code("CA"))
            .unwrap()
            .narrower
            .insert(code("CA-NU"));
        expected
            .concepts
            .get_mut(&code("CA-NU"))
            .unwrap()
            .broader
            .insert(code("CA"));
        assert_eq!(once, expected);
        assert_eq!(twice, expected);
    }

    #[test]
    fn self_hierarchy_is_rejected() {
        let snapshot = Snapshot::new("first")
            .add_concept(Concept::new(&code("CS")))
            .unwrap();
        assert_eq!(
            snapshot.link_hierarchy(&code("CS"), &code("CS")).unwrap_err(),
            VocabError::SelfHierarchy(code("CS"))
        );
    }

    #[test]
    fn hierarchy_requires_known_codes() {
        let snapshot = Snapshot::new("first")
            .add_concept(Concept::new(&code("FR")))
            .unwrap();
        assert_eq!(
            snapshot.link_hierarchy(&code("FR"), &code("FR-E")).unwrap_err(),
            VocabError::UnknownCode(code("FR-E"))
        );
    }

    #[test]
    fn members_keep_insertion_order() {
        let snapshot = Snapshot::new("first")
            .add_container(Container::new(&code("FR-departements"), ContainerKind::Collection))
            .unwrap()
            .add_concept(Concept::new(&code("FR-56")))
            .unwrap()
            .add_concept(Concept::new(&code("FR-35")))
            .unwrap()
            .add_member(&code("FR-departements"), &code("FR-56"))
            .unwrap()
            .add_member(&code("FR-departements"), &code("FR-35"))
            .unwrap();
        assert_eq!(
            snapshot.containers[&code("FR-departements")].members,
            vec![code("FR-56"), code("FR-35")]
        );
    }

    #[test]
    fn membership_rejects_cycles_and_repeats() {
        let snapshot = Snapshot::new("first")
            .add_container(Container::new(&code("a"), ContainerKind::Collection))
            .unwrap()
            .add_container(Container::new(&code("b"), ContainerKind::Collection))
            .unwrap()
            .add_member(&code("a"), &code("b"))
            .unwrap();
        assert_eq!(
            snapshot.clone().add_member(&code("b"), &code("a")).unwrap_err(),
            VocabError::MembershipCycle { container: code("b"), member: code("a") }
        );
        assert_eq!(
            snapshot.clone().add_member(&code("a"), &code("a")).unwrap_err(),
            VocabError::MembershipCycle { container: code("a"), member: code("a") }
        );
        assert_eq!(
            snapshot.add_member(&code("a"), &code("b")).unwrap_err(),
            VocabError::DuplicateMember { container: code("a"), member: code("b") }
        );
    }

    #[test]
    fn membership_requires_a_container() {
        let snapshot = Snapshot::new("first")
            .add_concept(Concept::new(&code("FR")))
            .unwrap();
        assert_eq!(
            snapshot.clone().add_member(&code("FR"), &code("FR")).unwrap_err(),
            VocabError::NotAContainer(code("FR"))
        );
        assert_eq!(
            snapshot.add_member(&code("nowhere"), &code("FR")).unwrap_err(),
            VocabError::UnknownCode(code("nowhere"))
        );
    }

    #[test]
    fn validate_reports_duplicate_pref_labels() {
        let mut snapshot = Snapshot::new("first")
            .add_concept(Concept::new(&code("FR")).with_pref_label(en("France")))
            .unwrap();
        snapshot
            .concepts
            .get_mut(&code("FR"))
            .unwrap()
            .pref_labels
            .insert(en("Republic of France"));
        assert_eq!(
            snapshot.validate(),
            vec![Violation::DuplicatePrefLabel {
                code: code("FR"),
                lang: LanguageTag::parse("en").unwrap(),
            }]
        );
    }

    #[test]
    fn validate_reports_broken_inverses() {
        let mut snapshot = Snapshot::new("first")
            .add_concept(Concept::new(&code("FR")))
            .unwrap()
            .add_concept(Concept::new(&code("FR-E")))
            .unwrap();
        // Seed the link in one direction only.
        snapshot
            .concepts
            .get_mut(&code("FR"))
            .unwrap()
            .narrower
            .insert(code("FR-E"));
        assert_eq!(
            snapshot.validate(),
            vec![Violation::BrokenInverse { broader: code("FR"), narrower: code("FR-E") }]
        );
    }

    #[test]
    fn validate_reports_self_hierarchy_once() {
        let mut snapshot = Snapshot::new("first")
            .add_concept(Concept::new(&code("FR-E")))
            .unwrap();
        let concept = snapshot.concepts.get_mut(&code("FR-E")).unwrap();
        concept.broader.insert(code("FR-E"));
        concept.narrower.insert(code("FR-E"));
        assert_eq!(
            snapshot.validate(),
            vec![Violation::SelfHierarchy { code: code("FR-E") }]
        );
    }

    #[test]
    fn validate_reports_dangling_references() {
        let mut snapshot = Snapshot::new("first")
            .add_concept(Concept::new(&code("FR")))
            .unwrap();
        snapshot
            .concepts
            .get_mut(&code("FR"))
            .unwrap()
            .broader
            .insert(code("ZZ"));
        assert_eq!(
            snapshot.validate(),
            vec![Violation::UnknownReference { code: code("FR"), referenced: code("ZZ") }]
        );
    }

    #[test]
    fn validate_reports_membership_cycles() {
        let mut snapshot = Snapshot::new("first")
            .add_container(Container::new(&code("a"), ContainerKind::Collection))
            .unwrap()
            .add_container(Container::new(&code("b"), ContainerKind::Collection))
            .unwrap()
            .add_member(&code("a"), &code("b"))
            .unwrap();
        snapshot
            .containers
            .get_mut(&code("b"))
            .unwrap()
            .members
            .push(code("a"));
        assert_eq!(
            snapshot.validate(),
            vec![
                Violation::MembershipCycle { code: code("a") },
                Violation::MembershipCycle { code: code("b") },
            ]
        );
    }

    #[test]
    fn validate_reports_duplicate_codes_across_maps() {
        let mut snapshot = Snapshot::new("first")
            .add_concept(Concept::new(&code("FR")))
            .unwrap();
        snapshot
            .containers
            .insert(code("FR"), Container::new(&code("FR"), ContainerKind::Scheme));
        assert_eq!(snapshot.validate(), vec![Violation::DuplicateCode { code: code("FR") }]);
    }

    #[test]
    fn validate_reports_collections_with_notation_kinds() {
        let mut snapshot = Snapshot::new("first")
            .add_container(Container::new(&code("FR-regions"), ContainerKind::Collection))
            .unwrap();
        snapshot
            .containers
            .get_mut(&code("FR-regions"))
            .unwrap()
            .notation_kinds
            .insert("twoletter".to_owned());
        assert_eq!(
            snapshot.validate(),
            vec![Violation::CollectionWithNotations { code: code("FR-regions") }]
        );
    }

    #[test]
    fn construction_order_does_not_matter() {
        let forward = Snapshot::new("first")
            .add_concept(Concept::new(&code("FR")))
            .unwrap()
            .add_concept(Concept::new(&code("FR-E")))
            .unwrap()
            .link_hierarchy(&code("FR"), &code("FR-E"))
            .unwrap()
            .seal(None);
        let backward = Snapshot::new("first")
            .add_concept(Concept::new(&code("FR-E")))
            .unwrap()
            .add_concept(Concept::new(&code("FR")))
            .unwrap()
            .link_hierarchy(&code("FR"), &code("FR-E"))
            .unwrap()
            .seal(None);
        assert_eq!(forward, backward);
        assert_eq!(forward.validate(), backward.validate());
    }

    #[test]
    fn seal_derives_roots_and_scheme_notation_kinds() {
        let scheme = code("iso3166");
        let snapshot = Snapshot::new("first")
            .add_container(Container::new(&scheme, ContainerKind::Scheme))
            .unwrap()
            .add_concept(
                Concept::new(&code("FR"))
                    .with_notation(Notation::new("twoletter", "FR").unwrap())
                    .with_notation(Notation::new("numerical", "250").unwrap()),
            )
            .unwrap()
            .add_concept(Concept::new(&code("FR-E")))
            .unwrap()
            .link_hierarchy(&code("FR"), &code("FR-E"))
            .unwrap()
            .seal(Some(&scheme));
        // FR is an orphan concept (member of nothing): its kinds land on the
        // primary scheme; FR-E has a broader concept, so only FR and the
        // scheme are roots.
        assert_eq!(snapshot.roots, BTreeSet::from([scheme.clone(), code("FR")]));
        assert_eq!(
            snapshot.containers[&scheme].notation_kinds,
            BTreeSet::from(["twoletter".to_owned(), "numerical".to_owned()])
        );
    }

    #[test]
    fn seal_collects_kinds_through_nested_members() {
        let scheme = code("iso3166-2");
        let snapshot = Snapshot::new("first")
            .add_container(Container::new(&scheme, ContainerKind::Scheme))
            .unwrap()
            .add_container(Container::new(&code("FR-regions"), ContainerKind::Collection))
            .unwrap()
            .add_concept(
                Concept::new(&code("FR-E"))
                    .with_notation(Notation::new("subdivision", "FR-E").unwrap()),
            )
            .unwrap()
            .add_member(&scheme, &code("FR-regions"))
            .unwrap()
            .add_member(&code("FR-regions"), &code("FR-E"))
            .unwrap()
            .seal(None);
        assert_eq!(
            snapshot.containers[&scheme].notation_kinds,
            BTreeSet::from(["subdivision".to_owned()])
        );
        assert!(snapshot.containers[&code("FR-regions")].notation_kinds.is_empty());
        assert_eq!(snapshot.roots, BTreeSet::from([scheme]));
    }
}

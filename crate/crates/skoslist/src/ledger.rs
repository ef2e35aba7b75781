//! Versioned change ledgers: an initial code list plus dated newsletters.
//!
//! A [`Ledger`] holds the first release of a code list together with the
//! newsletters that amend it. Applying a newsletter to a snapshot yields the
//! successor snapshot plus the [`EdgeTemplate`]s that say how every concept
//! of the predecessor relates to the successor; the version graph later
//! materializes those templates into mapping statements.
//!
//! Ledgers are read from a tab-separated text format:
//!
//! ```text
//! scheme      iso3166   first     1974-01-01
//! concept     CA-NT     -         Northwest Territories    en    twoletter=NT
//! container   iso3166   scheme    CA-NT
//! newsletter  I-1       1999-04-01
//! split       CA-NT     CA-NT,CA-NU
//! ```
//!
//! The `scheme` header names the code list and labels its first version; the
//! trailing date column is optional and dates that first version. `concept`
//! records carry code, broader code (`-` for none), preferred label,
//! language tag, and a comma-joined `kind=value` notation list (`-` for
//! none). `container` records declare a scheme or collection together with
//! its member list. Every record after a `newsletter` line and up to the
//! next one is a change event of that newsletter: `create`, `dissolve`,
//! `split`, `merge`, `rename`, or `recode`. Lines starting with `#` are
//! comments.
//!
//! Parsing is strict about structure — unreadable tokens, wrong field
//! counts, unknown codes, or non-increasing newsletter dates fail with a
//! [`ParseError`] — but deliberately does not judge the list it read:
//! duplicate codes, repeated labels, or a code listed as its own broader
//! concept all parse fine and surface afterwards as snapshot violations
//! reported by [`Snapshot::validate`].

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use thiserror::Error;

use crate::langtag::LanguageTag;
use crate::vocab::{
    Code, Concept, Container, ContainerKind, Label, Notation, Snapshot, VocabError,
};

// ---------------------------------------------------------------------------
// Change classification
// ---------------------------------------------------------------------------

/// Mapping vocabulary between concepts of two adjacent versions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MappingRelation {
    /// The concept is carried over unchanged.
    SameAs,
    /// The concept continues with a changed code or label.
    ExactMatch,
    /// The old concept covers more than the new one (splits).
    NarrowMatch,
    /// The old concept covers less than the new one (merges).
    BroadMatch,
}

/// The kind of a change event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ChangeKind {
    /// A code enters the list without a predecessor.
    Creation,
    /// A code leaves the list without a successor.
    Dissolution,
    /// One code is divided into several successors.
    Split,
    /// Several codes are combined into one successor.
    Merge,
    /// A concept keeps its code but its label changes.
    Rename,
    /// A concept keeps its identity but its code changes.
    Recode,
}

/// How a change kind is reflected between two versions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChangeRule {
    /// No statement: the concept has no predecessor.
    NoEdge,
    /// A deprecation marker on the predecessor, which has no successor.
    Deprecate,
    /// One mapping per subject/object pair, with the given relation.
    Map(MappingRelation),
}

/// The fixed table from change kind to cross-version rule.
///
/// Creations leave no trace (nothing to map from), dissolutions deprecate
/// the old concept, splits map the old concept to each part it was divided
/// into, merges map each old concept to the combined one, and renames or
/// recodes keep the concept's identity.
pub fn classify_change(kind: ChangeKind) -> ChangeRule {
    match kind {
        ChangeKind::Creation => ChangeRule::NoEdge,
        ChangeKind::Dissolution => ChangeRule::Deprecate,
        ChangeKind::Split => ChangeRule::Map(MappingRelation::NarrowMatch),
        ChangeKind::Merge => ChangeRule::Map(MappingRelation::BroadMatch),
        ChangeKind::Rename => ChangeRule::Map(MappingRelation::ExactMatch),
        ChangeKind::Recode => ChangeRule::Map(MappingRelation::ExactMatch),
    }
}

/// One cross-version statement produced by applying a newsletter: either a
/// mapping from a predecessor concept to a successor concept, or a
/// deprecation marker on a predecessor concept without successor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeTemplate {
    /// `subject` (in the predecessor) maps to `object` (in the successor).
    Map {
        /// Concept code in the predecessor version.
        subject: Code,
        /// Concept code in the successor version.
        object: Code,
        /// The vocabulary relating the pair.
        relation: MappingRelation,
    },
    /// `subject` is deprecated and absent from the successor.
    Deprecate {
        /// Concept code in the predecessor version.
        subject: Code,
    },
}

impl EdgeTemplate {
    /// The predecessor-side concept the template speaks about.
    pub fn subject(&self) -> &Code {
        match self {
            EdgeTemplate::Map { subject, .. } | EdgeTemplate::Deprecate { subject } => subject,
        }
    }
}

// ---------------------------------------------------------------------------
// Events, newsletters, ledgers
// ---------------------------------------------------------------------------

/// Errors from assembling or applying ledgers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    /// An event has the wrong number of subjects or objects for its kind.
    #[error("{kind:?} event has the wrong shape: {reason}")]
    BadEventShape {
        /// The event's kind.
        kind: ChangeKind,
        /// What the shape rules expect.
        reason: &'static str,
    },
    /// An event refers to a code the snapshot does not hold.
    #[error("unknown code `{0}`")]
    UnknownCode(Code),
    /// An event introduces a code the snapshot already holds.
    #[error("code `{0}` already exists")]
    CodeExists(Code),
    /// Two events of one newsletter touch the same code.
    #[error("events touch code `{0}` more than once")]
    ConflictingEvents(Code),
    /// Newsletter dates must strictly increase.
    #[error("newsletter `{id}` is dated {date}, which is not after {previous}")]
    NonIncreasingDate {
        /// The offending newsletter.
        id: String,
        /// Its date.
        date: NaiveDate,
        /// The date it would have to follow.
        previous: NaiveDate,
    },
    /// A vocabulary-level error raised while building values.
    #[error(transparent)]
    Vocab(#[from] VocabError),
}

/// One change to a code list, described by codes before and after.
///
/// The shape rules per kind: creations have no subjects and one or more
/// distinct objects; dissolutions one subject and no objects; splits one
/// subject and at least two distinct objects (which may include the subject
/// itself when it continues as one of the parts); merges at least two
/// distinct subjects and one object (which may be one of the subjects);
/// renames name the same single code as subject and object and carry at
/// least one label; recodes have one subject and one different object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangeEvent {
    /// What happened.
    pub kind: ChangeKind,
    /// Codes affected in the predecessor version.
    pub subjects: Vec<Code>,
    /// Codes present in the successor version.
    pub objects: Vec<Code>,
    /// Labels for the outcome; for renames they replace the concept's
    /// preferred labels of the same language.
    pub new_labels: BTreeSet<Label>,
    /// Notations for the outcome; they replace notations of the same kind.
    pub new_notations: BTreeSet<Notation>,
}

impl ChangeEvent {
    fn bare(kind: ChangeKind, subjects: Vec<Code>, objects: Vec<Code>) -> Self {
        ChangeEvent {
            kind,
            subjects,
            objects,
            new_labels: BTreeSet::new(),
            new_notations: BTreeSet::new(),
        }
    }

    /// A creation of one or more fresh codes sharing the given labels.
    pub fn creation(
        codes: Vec<Code>,
        labels: impl IntoIterator<Item = Label>,
    ) -> Result<Self, LedgerError> {
        let mut event = Self::bare(ChangeKind::Creation, Vec::new(), codes);
        event.new_labels = labels.into_iter().collect();
        event.check_shape()?;
        Ok(event)
    }

    /// A dissolution of one code.
    pub fn dissolution(code: Code) -> Self {
        Self::bare(ChangeKind::Dissolution, vec![code], Vec::new())
    }

    /// A split of `old` into the given parts.
    pub fn split(old: Code, parts: Vec<Code>) -> Result<Self, LedgerError> {
        let event = Self::bare(ChangeKind::Split, vec![old], parts);
        event.check_shape()?;
        Ok(event)
    }

    /// A merge of the given codes into `new`.
    pub fn merge(olds: Vec<Code>, new: Code) -> Result<Self, LedgerError> {
        let event = Self::bare(ChangeKind::Merge, olds, vec![new]);
        event.check_shape()?;
        Ok(event)
    }

    /// A rename of `code`, replacing its preferred labels per language.
    pub fn rename(
        code: Code,
        labels: impl IntoIterator<Item = Label>,
    ) -> Result<Self, LedgerError> {
        let mut event = Self::bare(ChangeKind::Rename, vec![code.clone()], vec![code]);
        event.new_labels = labels.into_iter().collect();
        event.check_shape()?;
        Ok(event)
    }

    /// A recode of `old` to the fresh code `new`.
    pub fn recode(old: Code, new: Code) -> Result<Self, LedgerError> {
        let event = Self::bare(ChangeKind::Recode, vec![old], vec![new]);
        event.check_shape()?;
        Ok(event)
    }

    /// Attaches labels to the event's outcome.
    pub fn with_labels(mut self, labels: impl IntoIterator<Item = Label>) -> Self {
        self.new_labels.extend(labels);
        self
    }

    /// Attaches notations to the event's outcome.
    pub fn with_notations(mut self, notations: impl IntoIterator<Item = Notation>) -> Self {
        self.new_notations.extend(notations);
        self
    }

    /// All codes the event concerns, on either side of the change.
    pub fn touched(&self) -> BTreeSet<&Code> {
        self.subjects.iter().chain(self.objects.iter()).collect()
    }

    /// Checks the per-kind shape rules.
    pub fn check_shape(&self) -> Result<(), LedgerError> {
        let fail = |reason| {
            Err(LedgerError::BadEventShape {
                kind: self.kind,
                reason,
            })
        };
        match self.kind {
            ChangeKind::Creation => {
                if !self.subjects.is_empty() {
                    return fail("creations have no subjects");
                }
                if self.objects.is_empty() {
                    return fail("creations need at least one code");
                }
                if !all_distinct(&self.objects) {
                    return fail("created codes must be distinct");
                }
            }
            ChangeKind::Dissolution => {
                if self.subjects.len() != 1 || !self.objects.is_empty() {
                    return fail("dissolutions have one subject and no objects");
                }
            }
            ChangeKind::Split => {
                if self.subjects.len() != 1 {
                    return fail("splits have exactly one subject");
                }
                if self.objects.len() < 2 {
                    return fail("splits need at least two parts");
                }
                if !all_distinct(&self.objects) {
                    return fail("split parts must be distinct");
                }
            }
            ChangeKind::Merge => {
                if self.subjects.len() < 2 {
                    return fail("merges need at least two subjects");
                }
                if !all_distinct(&self.subjects) {
                    return fail("merged codes must be distinct");
                }
                if self.objects.len() != 1 {
                    return fail("merges have exactly one object");
                }
            }
            ChangeKind::Rename => {
                if self.subjects.len() != 1 || self.objects != self.subjects {
                    return fail("renames name the same code as subject and object");
                }
                if self.new_labels.is_empty() {
                    return fail("renames carry at least one label");
                }
            }
            ChangeKind::Recode => {
                if self.subjects.len() != 1 || self.objects.len() != 1 {
                    return fail("recodes have one subject and one object");
                }
                if self.subjects[0] == self.objects[0] {
                    return fail("recodes must change the code");
                }
            }
        }
        Ok(())
    }
}

fn all_distinct(codes: &[Code]) -> bool {
    codes.iter().collect::<BTreeSet<_>>().len() == codes.len()
}

/// A dated bundle of change events, named after its announcement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Newsletter {
    /// The announcement's own identifier, e.g. `I-1`.
    pub id: String,
    /// Publication date; also the date the changes take effect.
    pub date: NaiveDate,
    /// The changes, in announcement order.
    pub events: Vec<ChangeEvent>,
}

impl Newsletter {
    /// An empty newsletter.
    pub fn new(id: impl Into<String>, date: NaiveDate) -> Self {
        Newsletter {
            id: id.into(),
            date,
            events: Vec::new(),
        }
    }

    /// Adds an event, rejecting shapes and code conflicts within the
    /// newsletter: no two events may touch the same code.
    pub fn with_event(mut self, event: ChangeEvent) -> Result<Self, LedgerError> {
        event.check_shape()?;
        for existing in &self.events {
            if let Some(code) = existing.touched().intersection(&event.touched()).next() {
                return Err(LedgerError::ConflictingEvents((*code).clone()));
            }
        }
        self.events.push(event);
        Ok(self)
    }
}

/// A code list's full published history: the first release plus the
/// newsletters amending it, in date order.
#[derive(Debug, Clone)]
pub struct Ledger {
    /// The code of the list's concept scheme.
    pub scheme_id: Code,
    /// Date of the first release, when known.
    pub initial_date: Option<NaiveDate>,
    /// The first release.
    pub initial: Snapshot,
    /// Amendments in strictly increasing date order.
    pub newsletters: Vec<Newsletter>,
}

impl Ledger {
    /// A ledger holding just the first release.
    pub fn new(scheme_id: Code, initial: Snapshot) -> Self {
        Ledger {
            scheme_id,
            initial_date: None,
            initial,
            newsletters: Vec::new(),
        }
    }

    /// Dates the first release.
    pub fn with_initial_date(mut self, date: NaiveDate) -> Self {
        self.initial_date = Some(date);
        self
    }

    /// Appends a newsletter, enforcing strictly increasing dates.
    pub fn push_newsletter(mut self, newsletter: Newsletter) -> Result<Self, LedgerError> {
        let previous = self
            .newsletters
            .last()
            .map(|n| n.date)
            .or(self.initial_date);
        if let Some(previous) = previous {
            if newsletter.date <= previous {
                return Err(LedgerError::NonIncreasingDate {
                    id: newsletter.id.clone(),
                    date: newsletter.date,
                    previous,
                });
            }
        }
        self.newsletters.push(newsletter);
        Ok(self)
    }
}

// ---------------------------------------------------------------------------
// Newsletter application
// ---------------------------------------------------------------------------

/// Applies a newsletter to a snapshot, producing the successor snapshot and
/// the cross-version statements relating the two.
///
/// Every concept of the predecessor is the subject of at least one
/// [`EdgeTemplate`]: concepts untouched by any event map to themselves with
/// [`MappingRelation::SameAs`], all others follow [`classify_change`].
/// Hierarchy and memberships are rewired along: parts of a split inherit the
/// subject's broader concepts, a merged concept takes over the combined
/// neighborhood of its subjects, and references to a removed code are
/// rewritten to its successors (dropped for dissolutions).
pub fn apply_newsletter(
    snapshot: &Snapshot,
    newsletter: &Newsletter,
) -> Result<(Snapshot, Vec<EdgeTemplate>), LedgerError> {
    // Newsletters built by hand may repeat codes; re-check the invariant.
    let mut touched: BTreeSet<&Code> = BTreeSet::new();
    for event in &newsletter.events {
        event.check_shape()?;
        for code in event.touched() {
            if !touched.insert(code) {
                return Err(LedgerError::ConflictingEvents(code.clone()));
            }
        }
    }

    let primary = snapshot.primary_scheme().cloned();
    let mut next = Snapshot::new(newsletter.id.clone());
    next.concepts = snapshot.concepts.clone();
    next.containers = snapshot.containers.clone();

    let mut templates: Vec<EdgeTemplate> = Vec::new();
    let mut untouched: BTreeSet<Code> = snapshot.concepts.keys().cloned().collect();

    for event in &newsletter.events {
        for subject in &event.subjects {
            if !snapshot.concepts.contains_key(subject) {
                return Err(LedgerError::UnknownCode(subject.clone()));
            }
            untouched.remove(subject);
        }
        match event.kind {
            ChangeKind::Creation => {
                for object in &event.objects {
                    ensure_fresh(&next, object)?;
                    let mut concept = Concept::new(object);
                    apply_labels(&mut concept, &event.new_labels);
                    apply_notations(&mut concept, &event.new_notations);
                    next.concepts.insert(object.clone(), concept);
                }
            }
            ChangeKind::Dissolution => {
                let subject = &event.subjects[0];
                next.concepts.remove(subject);
                rewrite_references(&mut next, subject, &[]);
                next.deprecated.insert(subject.clone());
                templates.push(EdgeTemplate::Deprecate {
                    subject: subject.clone(),
                });
            }
            ChangeKind::Split => {
                let subject = &event.subjects[0];
                let inherited = snapshot.concepts[subject].broader.clone();
                for object in &event.objects {
                    if object == subject {
                        continue;
                    }
                    ensure_fresh(&next, object)?;
                    let mut concept = Concept::new(object);
                    apply_labels(&mut concept, &event.new_labels);
                    apply_notations(&mut concept, &event.new_notations);
                    concept.broader = inherited.clone();
                    insert_hierarchy_inverses(&mut next, &concept);
                    next.concepts.insert(object.clone(), concept);
                }
                if !event.objects.contains(subject) {
                    next.concepts.remove(subject);
                    rewrite_references(&mut next, subject, &event.objects);
                }
                for object in &event.objects {
                    templates.push(EdgeTemplate::Map {
                        subject: subject.clone(),
                        object: object.clone(),
                        relation: MappingRelation::NarrowMatch,
                    });
                }
            }
            ChangeKind::Merge => {
                let object = &event.objects[0];
                let mut broader = BTreeSet::new();
                let mut narrower = BTreeSet::new();
                for subject in &event.subjects {
                    let pre = &snapshot.concepts[subject];
                    broader.extend(pre.broader.iter().cloned());
                    narrower.extend(pre.narrower.iter().cloned());
                }
                // Vanishing subjects cannot stay neighbors of the outcome.
                for subject in &event.subjects {
                    broader.remove(subject);
                    narrower.remove(subject);
                }
                broader.remove(object);
                narrower.remove(object);
                if event.subjects.contains(object) {
                    let entry = next.concepts.get_mut(object).expect("subject exists");
                    entry.broader.extend(broader.iter().cloned());
                    entry.narrower.extend(narrower.iter().cloned());
                    entry.broader.remove(object);
                    entry.narrower.remove(object);
                    apply_labels(entry, &event.new_labels);
                    apply_notations(entry, &event.new_notations);
                    let merged = entry.clone();
                    insert_hierarchy_inverses(&mut next, &merged);
                } else {
                    ensure_fresh(&next, object)?;
                    let mut concept = Concept::new(object);
                    apply_labels(&mut concept, &event.new_labels);
                    apply_notations(&mut concept, &event.new_notations);
                    concept.broader = broader;
                    concept.narrower = narrower;
                    insert_hierarchy_inverses(&mut next, &concept);
                    next.concepts.insert(object.clone(), concept);
                }
                for subject in &event.subjects {
                    if subject != object {
                        next.concepts.remove(subject);
                        rewrite_references(&mut next, subject, std::slice::from_ref(object));
                    }
                    templates.push(EdgeTemplate::Map {
                        subject: subject.clone(),
                        object: object.clone(),
                        relation: MappingRelation::BroadMatch,
                    });
                }
            }
            ChangeKind::Rename => {
                let subject = &event.subjects[0];
                let entry = next.concepts.get_mut(subject).expect("subject exists");
                apply_labels(entry, &event.new_labels);
                apply_notations(entry, &event.new_notations);
                templates.push(EdgeTemplate::Map {
                    subject: subject.clone(),
                    object: subject.clone(),
                    relation: MappingRelation::ExactMatch,
                });
            }
            ChangeKind::Recode => {
                let subject = &event.subjects[0];
                let object = &event.objects[0];
                ensure_fresh(&next, object)?;
                let mut concept = next.concepts.remove(subject).expect("subject exists");
                concept.code = object.clone();
                apply_labels(&mut concept, &event.new_labels);
                apply_notations(&mut concept, &event.new_notations);
                next.concepts.insert(object.clone(), concept);
                rewrite_references(&mut next, subject, std::slice::from_ref(object));
                templates.push(EdgeTemplate::Map {
                    subject: subject.clone(),
                    object: object.clone(),
                    relation: MappingRelation::ExactMatch,
                });
            }
        }
    }

    for code in untouched {
        templates.push(EdgeTemplate::Map {
            subject: code.clone(),
            object: code,
            relation: MappingRelation::SameAs,
        });
    }
    templates.sort();
    Ok((next.seal(primary.as_ref()), templates))
}

fn ensure_fresh(snapshot: &Snapshot, code: &Code) -> Result<(), LedgerError> {
    if snapshot.concepts.contains_key(code) || snapshot.containers.contains_key(code) {
        return Err(LedgerError::CodeExists(code.clone()));
    }
    Ok(())
}

fn apply_labels(concept: &mut Concept, labels: &BTreeSet<Label>) {
    for label in labels {
        concept.pref_labels.retain(|l| l.lang != label.lang);
    }
    concept.pref_labels.extend(labels.iter().cloned());
}

fn apply_notations(concept: &mut Concept, notations: &BTreeSet<Notation>) {
    for notation in notations {
        concept.notations.retain(|n| n.kind != notation.kind);
    }
    concept.notations.extend(notations.iter().cloned());
}

/// Inserts the inverse direction of `concept`'s hierarchy links into the
/// neighbors that already exist (dangling neighbors stay dangling).
fn insert_hierarchy_inverses(snapshot: &mut Snapshot, concept: &Concept) {
    for parent in &concept.broader {
        if let Some(entry) = snapshot.concepts.get_mut(parent) {
            entry.narrower.insert(concept.code.clone());
        }
    }
    for child in &concept.narrower {
        if let Some(entry) = snapshot.concepts.get_mut(child) {
            entry.broader.insert(concept.code.clone());
        }
    }
}

/// Rewrites every reference to `old` — hierarchy links and container
/// memberships — to point at `replacements` instead, keeping the two
/// hierarchy directions in step. Empty `replacements` drop the references.
/// A replacement is never inserted into its own sets, so rewiring cannot
/// fabricate self-links.
fn rewrite_references(snapshot: &mut Snapshot, old: &Code, replacements: &[Code]) {
    let mut gained_narrower: Vec<(Code, Code)> = Vec::new();
    let mut gained_broader: Vec<(Code, Code)> = Vec::new();
    for (code, concept) in snapshot.concepts.iter_mut() {
        if concept.broader.remove(old) {
            for replacement in replacements {
                if replacement != code {
                    concept.broader.insert(replacement.clone());
                    gained_narrower.push((replacement.clone(), code.clone()));
                }
            }
        }
        if concept.narrower.remove(old) {
            for replacement in replacements {
                if replacement != code {
                    concept.narrower.insert(replacement.clone());
                    gained_broader.push((replacement.clone(), code.clone()));
                }
            }
        }
    }
    for (parent, child) in gained_narrower {
        if let Some(entry) = snapshot.concepts.get_mut(&parent) {
            entry.narrower.insert(child);
        }
    }
    for (child, parent) in gained_broader {
        if let Some(entry) = snapshot.concepts.get_mut(&child) {
            entry.broader.insert(parent);
        }
    }
    for container in snapshot.containers.values_mut() {
        if !container.members.iter().any(|member| member == old) {
            continue;
        }
        let present: BTreeSet<Code> = container
            .members
            .iter()
            .filter(|member| *member != old)
            .cloned()
            .collect();
        let mut rebuilt = Vec::with_capacity(container.members.len() + replacements.len());
        let mut replaced = false;
        for member in std::mem::take(&mut container.members) {
            if &member == old {
                if !replaced {
                    replaced = true;
                    for replacement in replacements {
                        if !present.contains(replacement) && !rebuilt.contains(replacement) {
                            rebuilt.push(replacement.clone());
                        }
                    }
                }
            } else {
                rebuilt.push(member);
            }
        }
        container.members = rebuilt;
    }
}

// ---------------------------------------------------------------------------
// The text format
// ---------------------------------------------------------------------------

/// A structural failure while reading the tab-separated ledger format.
///
/// Line and column are 1-based; the column points into the raw line, at the
/// start of the offending field or at the offending byte within it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    /// 1-based line of the failure.
    pub line: usize,
    /// 1-based column of the failure.
    pub column: usize,
    /// What went wrong.
    pub message: String,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

/// 1-based column at which field `index` of a tab-split line starts.
fn field_col(fields: &[&str], index: usize) -> usize {
    fields[..index].iter().map(|f| f.len() + 1).sum::<usize>() + 1
}

/// Reads a ledger from the tab-separated text format.
pub fn parse_ledger(input: &str) -> Result<Ledger, ParseError> {
    let mut draft = Draft::default();
    for (index, raw) in input.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        draft.record(line_no, &fields)?;
    }
    draft.finish()
}

struct Header {
    scheme_id: Code,
    version_label: String,
    date: Option<NaiveDate>,
}

/// A forward reference recorded during the first pass, checked at the end.
struct PendingRef {
    from: Code,
    to: Code,
    line: usize,
    column: usize,
}

#[derive(Default)]
struct Draft {
    header: Option<Header>,
    concepts: BTreeMap<Code, Concept>,
    containers: BTreeMap<Code, Container>,
    pending_broader: Vec<PendingRef>,
    pending_members: Vec<PendingRef>,
    newsletters: Vec<Newsletter>,
    /// Concept codes alive after the events read so far. Frozen from the
    /// initial section when the first newsletter record arrives.
    alive: BTreeSet<Code>,
    /// Container codes, frozen at the same moment; events never create
    /// containers, so a fresh concept code must avoid them too.
    container_ids: BTreeSet<Code>,
    /// Codes touched by events of the newsletter currently being read.
    touched: BTreeSet<Code>,
    in_events: bool,
}

impl Draft {
    fn record(&mut self, line: usize, fields: &[&str]) -> Result<(), ParseError> {
        let token = fields[0];
        if token == "scheme" {
            return self.scheme_record(line, fields);
        }
        if self.header.is_none() {
            return Err(err(line, 1, "the first record must be the scheme header"));
        }
        match token {
            "concept" => self.concept_record(line, fields),
            "container" => self.container_record(line, fields),
            "newsletter" => self.newsletter_record(line, fields),
            "create" | "dissolve" | "split" | "merge" | "rename" | "recode" => {
                self.event_record(line, fields)
            }
            other => Err(err(line, 1, format!("unknown record type `{other}`"))),
        }
    }

    fn scheme_record(&mut self, line: usize, fields: &[&str]) -> Result<(), ParseError> {
        if self.header.is_some() {
            return Err(err(line, 1, "duplicate scheme header"));
        }
        if fields.len() != 3 && fields.len() != 4 {
            return Err(err(
                line,
                1,
                format!("scheme record expects 3 or 4 fields, found {}", fields.len()),
            ));
        }
        let scheme_id = parse_code(fields[1], line, field_col(fields, 1))?;
        let version_label = fields[2];
        let label_ok = !version_label.is_empty()
            && version_label
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-');
        if !label_ok {
            return Err(err(
                line,
                field_col(fields, 2),
                "the version label must be ASCII letters, digits, or hyphens",
            ));
        }
        let date = match fields.get(3) {
            Some(field) => Some(parse_date(field, line, field_col(fields, 3))?),
            None => None,
        };
        self.header = Some(Header {
            scheme_id,
            version_label: version_label.to_string(),
            date,
        });
        Ok(())
    }

    fn concept_record(&mut self, line: usize, fields: &[&str]) -> Result<(), ParseError> {
        if self.in_events {
            return Err(err(
                line,
                1,
                "concept records belong to the initial section, before any newsletter",
            ));
        }
        if fields.len() != 6 {
            return Err(err(
                line,
                1,
                format!("concept record expects 6 fields, found {}", fields.len()),
            ));
        }
        let code = parse_code(fields[1], line, field_col(fields, 1))?;
        if fields[2] != "-" {
            let broader = parse_code(fields[2], line, field_col(fields, 2))?;
            self.pending_broader.push(PendingRef {
                from: code.clone(),
                to: broader,
                line,
                column: field_col(fields, 2),
            });
        }
        let label = parse_label(fields, 3, line)?;
        let notations = parse_notations(fields[5], line, field_col(fields, 5))?;
        let entry = self
            .concepts
            .entry(code.clone())
            .or_insert_with(|| Concept::new(&code));
        entry.pref_labels.insert(label);
        entry.notations.extend(notations);
        Ok(())
    }

    fn container_record(&mut self, line: usize, fields: &[&str]) -> Result<(), ParseError> {
        if self.in_events {
            return Err(err(
                line,
                1,
                "container records belong to the initial section, before any newsletter",
            ));
        }
        if fields.len() != 4 {
            return Err(err(
                line,
                1,
                format!("container record expects 4 fields, found {}", fields.len()),
            ));
        }
        let code = parse_code(fields[1], line, field_col(fields, 1))?;
        let kind = match fields[2] {
            "scheme" => ContainerKind::Scheme,
            "collection" => ContainerKind::Collection,
            other => {
                return Err(err(
                    line,
                    field_col(fields, 2),
                    format!("container kind must be `scheme` or `collection`, found `{other}`"),
                ));
            }
        };
        let members = if fields[3] == "-" {
            Vec::new()
        } else {
            parse_code_list(fields[3], line, field_col(fields, 3), false)?
        };
        let entry = match self.containers.get_mut(&code) {
            Some(existing) => {
                if existing.kind != kind {
                    return Err(err(
                        line,
                        field_col(fields, 2),
                        format!("container `{code}` redeclared with a different kind"),
                    ));
                }
                existing
            }
            None => self
                .containers
                .entry(code.clone())
                .or_insert_with(|| Container::new(&code, kind)),
        };
        for (member, column) in members {
            self.pending_members.push(PendingRef {
                from: code.clone(),
                to: member.clone(),
                line,
                column,
            });
            entry.members.push(member);
        }
        Ok(())
    }

    fn newsletter_record(&mut self, line: usize, fields: &[&str]) -> Result<(), ParseError> {
        if fields.len() != 3 {
            return Err(err(
                line,
                1,
                format!("newsletter record expects 3 fields, found {}", fields.len()),
            ));
        }
        if fields[1].is_empty() {
            return Err(err(line, field_col(fields, 1), "newsletter id is empty"));
        }
        let date = parse_date(fields[2], line, field_col(fields, 2))?;
        let previous = self
            .newsletters
            .last()
            .map(|n| n.date)
            .or(self.header.as_ref().and_then(|h| h.date));
        if let Some(previous) = previous {
            if date <= previous {
                return Err(err(
                    line,
                    field_col(fields, 2),
                    format!("newsletter dates must strictly increase: {date} is not after {previous}"),
                ));
            }
        }
        if !self.in_events {
            // The initial section is complete; freeze the starting point
            // for aliveness tracking.
            self.alive = self.concepts.keys().cloned().collect();
            self.container_ids = self.containers.keys().cloned().collect();
            self.in_events = true;
        }
        self.touched.clear();
        self.newsletters.push(Newsletter::new(fields[1], date));
        Ok(())
    }

    fn event_record(&mut self, line: usize, fields: &[&str]) -> Result<(), ParseError> {
        if !self.in_events {
            return Err(err(
                line,
                1,
                "change events must follow a newsletter record",
            ));
        }
        let token = fields[0];
        let expect_arity = |n: usize| -> Result<(), ParseError> {
            if fields.len() != n {
                Err(err(
                    line,
                    1,
                    format!("{token} record expects {n} fields, found {}", fields.len()),
                ))
            } else {
                Ok(())
            }
        };
        let event = match token {
            "split" => {
                expect_arity(3)?;
                let old = self.alive_code(fields[1], line, field_col(fields, 1))?;
                let parts = parse_code_list(fields[2], line, field_col(fields, 2), true)?;
                if parts.len() < 2 {
                    return Err(err(
                        line,
                        field_col(fields, 2),
                        "a split needs at least two parts",
                    ));
                }
                for (part, column) in &parts {
                    if part != &old {
                        self.fresh_code(part, line, *column)?;
                    }
                }
                let parts = parts.into_iter().map(|(code, _)| code).collect();
                ChangeEvent::bare(ChangeKind::Split, vec![old], parts)
            }
            "merge" => {
                expect_arity(3)?;
                let olds = parse_code_list(fields[1], line, field_col(fields, 1), true)?;
                if olds.len() < 2 {
                    return Err(err(
                        line,
                        field_col(fields, 1),
                        "a merge needs at least two codes",
                    ));
                }
                for (old, column) in &olds {
                    if !self.alive.contains(old) {
                        return Err(err(line, *column, format!("unknown code `{old}`")));
                    }
                }
                let olds: Vec<Code> = olds.into_iter().map(|(code, _)| code).collect();
                let new = parse_code(fields[2], line, field_col(fields, 2))?;
                if !olds.contains(&new) {
                    self.fresh_code(&new, line, field_col(fields, 2))?;
                }
                ChangeEvent::bare(ChangeKind::Merge, olds, vec![new])
            }
            "rename" => {
                expect_arity(4)?;
                let code = self.alive_code(fields[1], line, field_col(fields, 1))?;
                let label = parse_label(fields, 2, line)?;
                ChangeEvent::bare(ChangeKind::Rename, vec![code.clone()], vec![code])
                    .with_labels([label])
            }
            "recode" => {
                expect_arity(3)?;
                let old = self.alive_code(fields[1], line, field_col(fields, 1))?;
                let new = parse_code(fields[2], line, field_col(fields, 2))?;
                if new == old {
                    return Err(err(
                        line,
                        field_col(fields, 2),
                        "a recode must change the code",
                    ));
                }
                self.fresh_code(&new, line, field_col(fields, 2))?;
                ChangeEvent::bare(ChangeKind::Recode, vec![old], vec![new])
            }
            "create" => {
                expect_arity(4)?;
                let code = parse_code(fields[1], line, field_col(fields, 1))?;
                self.fresh_code(&code, line, field_col(fields, 1))?;
                let label = parse_label(fields, 2, line)?;
                ChangeEvent::bare(ChangeKind::Creation, Vec::new(), vec![code])
                    .with_labels([label])
            }
            "dissolve" => {
                expect_arity(2)?;
                let code = self.alive_code(fields[1], line, field_col(fields, 1))?;
                ChangeEvent::bare(ChangeKind::Dissolution, vec![code], Vec::new())
            }
            _ => unreachable!("caller dispatches event tokens"),
        };
        let newsletter_id = self.newsletters.last().expect("in_events implies one").id.clone();
        for code in event.touched() {
            if self.touched.contains(code) {
                return Err(err(
                    line,
                    1,
                    format!("events in newsletter `{newsletter_id}` touch `{code}` more than once"),
                ));
            }
        }
        self.touched.extend(event.touched().into_iter().cloned());
        for subject in &event.subjects {
            if !event.objects.contains(subject) {
                self.alive.remove(subject);
            }
        }
        self.alive.extend(event.objects.iter().cloned());
        self.newsletters
            .last_mut()
            .expect("in_events implies one")
            .events
            .push(event);
        Ok(())
    }

    fn alive_code(&self, field: &str, line: usize, column: usize) -> Result<Code, ParseError> {
        let code = parse_code(field, line, column)?;
        if !self.alive.contains(&code) {
            return Err(err(line, column, format!("unknown code `{code}`")));
        }
        Ok(code)
    }

    fn fresh_code(&self, code: &Code, line: usize, column: usize) -> Result<(), ParseError> {
        if self.alive.contains(code) || self.container_ids.contains(code) {
            return Err(err(line, column, format!("code `{code}` already exists")));
        }
        Ok(())
    }

    fn finish(mut self) -> Result<Ledger, ParseError> {
        let header = self
            .header
            .ok_or_else(|| err(1, 1, "missing scheme header"))?;
        for pending in &self.pending_broader {
            let known = self.concepts.contains_key(&pending.to)
                || self.containers.contains_key(&pending.to);
            if !known {
                return Err(err(
                    pending.line,
                    pending.column,
                    format!("unknown code `{}`", pending.to),
                ));
            }
            let child = self
                .concepts
                .get_mut(&pending.from)
                .expect("concept record created it");
            child.broader.insert(pending.to.clone());
            if pending.to == pending.from {
                child.narrower.insert(pending.to.clone());
            } else if let Some(parent) = self.concepts.get_mut(&pending.to) {
                parent.narrower.insert(pending.from.clone());
            }
        }
        for pending in &self.pending_members {
            let known = self.concepts.contains_key(&pending.to)
                || self.containers.contains_key(&pending.to);
            if !known {
                return Err(err(
                    pending.line,
                    pending.column,
                    format!("unknown code `{}`", pending.to),
                ));
            }
        }
        // A list usually leaves its own scheme implicit; declare it.
        if !self.containers.contains_key(&header.scheme_id)
            && !self.concepts.contains_key(&header.scheme_id)
        {
            self.containers.insert(
                header.scheme_id.clone(),
                Container::new(&header.scheme_id, ContainerKind::Scheme),
            );
        }
        let mut initial = Snapshot::new(header.version_label);
        initial.concepts = self.concepts;
        initial.containers = self.containers;
        let initial = initial.seal(Some(&header.scheme_id));
        let mut ledger = Ledger::new(header.scheme_id, initial);
        ledger.initial_date = header.date;
        ledger.newsletters = self.newsletters;
        Ok(ledger)
    }
}

fn parse_code(field: &str, line: usize, column: usize) -> Result<Code, ParseError> {
    Code::new(field).map_err(|e| err(line, column, e.to_string()))
}

fn parse_date(field: &str, line: usize, column: usize) -> Result<NaiveDate, ParseError> {
    NaiveDate::parse_from_str(field, "%Y-%m-%d")
        .map_err(|_| err(line, column, format!("expected an ISO date (YYYY-MM-DD), found `{field}`")))
}

/// Parses a label from two adjacent fields: text at `text_index`, language
/// tag right after it.
fn parse_label(fields: &[&str], text_index: usize, line: usize) -> Result<Label, ParseError> {
    let text = fields[text_index];
    if text.is_empty() {
        return Err(err(
            line,
            field_col(fields, text_index),
            "preferred label must not be empty",
        ));
    }
    let tag_col = field_col(fields, text_index + 1);
    let lang = LanguageTag::parse(fields[text_index + 1]).map_err(|e| {
        err(
            line,
            tag_col + e.offset,
            format!("malformed language tag: {}", e.reason),
        )
    })?;
    Ok(Label::new(text, lang))
}

fn parse_notations(field: &str, line: usize, column: usize) -> Result<Vec<Notation>, ParseError> {
    if field == "-" {
        return Ok(Vec::new());
    }
    let mut notations = Vec::new();
    let mut offset = 0;
    for segment in field.split(',') {
        let segment_col = column + offset;
        let (kind, value) = segment.split_once('=').ok_or_else(|| {
            err(
                line,
                segment_col,
                format!("notation must be written kind=value, found `{segment}`"),
            )
        })?;
        let notation =
            Notation::new(kind, value).map_err(|e| err(line, segment_col, e.to_string()))?;
        notations.push(notation);
        offset += segment.len() + 1;
    }
    Ok(notations)
}

/// Parses a comma-joined code list into codes and their 1-based columns.
/// `distinct` additionally rejects repeats (event code lists are sets;
/// member lists may carry dirty duplicates).
fn parse_code_list(
    field: &str,
    line: usize,
    column: usize,
    distinct: bool,
) -> Result<Vec<(Code, usize)>, ParseError> {
    let mut codes: Vec<(Code, usize)> = Vec::new();
    let mut offset = 0;
    for segment in field.split(',') {
        let segment_col = column + offset;
        let code = parse_code(segment, line, segment_col)?;
        if distinct && codes.iter().any(|(c, _)| c == &code) {
            return Err(err(
                line,
                segment_col,
                format!("code `{code}` is listed twice"),
            ));
        }
        codes.push((code, segment_col));
        offset += segment.len() + 1;
    }
    Ok(codes)
}

// ---------------------------------------------------------------------------

//! The cross-version identity graph and its resolution queries.
//!
//! Every published version of a code list receives its own URI namespace —
//! `<base>first/` for the initial release and `<base>newsletter-<n>/` for
//! each amendment — so one code names a different resource in every
//! version. A [`VersionGraph`] holds the snapshots side by side with the
//! typed [`MappingEdge`]s connecting adjacent versions, and answers three
//! questions: what became of a code ([`VersionGraph::resolve_forward`]),
//! where did it come from ([`VersionGraph::resolve_backward`]), and which
//! resource did a code name on a given date ([`VersionGraph::valid_at`]).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::NaiveDate;
use thiserror::Error;

use crate::ledger::{apply_newsletter, EdgeTemplate, Ledger, LedgerError, MappingRelation};
use crate::rdf::model::Uri;
use crate::vocab::{Code, Snapshot};

// ---------------------------------------------------------------------------
// Graph types
// ---------------------------------------------------------------------------

/// One concept in one version of a scheme: a version namespace plus a code.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct VersionedUri {
    /// The version's namespace, an absolute URI ending in `/`.
    pub namespace: Uri,
    /// The concept's code within that version.
    pub code: Code,
}

impl VersionedUri {
    /// The full URI, namespace and code concatenated.
    pub fn full(&self) -> Uri {
        self.namespace
            .join(self.code.as_str())
            .expect("code characters are URI-safe")
    }
}

impl fmt::Display for VersionedUri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.namespace, self.code)
    }
}

/// A typed identity statement between concepts of two adjacent versions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MappingEdge {
    /// The concept in the earlier version.
    pub from: VersionedUri,
    /// The concept in the later version.
    pub to: VersionedUri,
    /// How the two relate.
    pub relation: MappingRelation,
}

/// One row of the graph's version table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VersionInfo {
    /// The version id: the initial release's label, then `newsletter-<n>`
    /// numbered positionally.
    pub id: String,
    /// The version's URI namespace.
    pub namespace: Uri,
    /// The version's effective date; the initial release may be undated,
    /// in which case it is treated as valid since forever.
    pub date: Option<NaiveDate>,
}

/// Snapshots of every version side by side with the mapping edges between
/// adjacent versions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VersionGraph {
    /// The version table, in publication order.
    pub versions: Vec<VersionInfo>,
    /// Each version's snapshot, keyed by version id.
    pub snapshots: BTreeMap<String, Snapshot>,
    /// All mapping edges; endpoints always lie in adjacent versions.
    pub edges: BTreeSet<MappingEdge>,
    /// An extra namespace aliasing the final version.
    pub current_alias: Uri,
}

/// Errors raised by resolution queries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VersionError {
    /// The version id is not in the version table.
    #[error("unknown version `{0}`")]
    UnknownVersion(String),
    /// The code does not exist in the named version's snapshot.
    #[error("code `{code}` does not exist in version `{version}`")]
    UnknownCode {
        /// The code asked about.
        code: Code,
        /// The version whose snapshot was consulted.
        version: String,
    },
    /// The two versions are ordered against the query's direction.
    #[error("cannot resolve from version `{from}` to version `{to}` in this direction")]
    WrongOrder {
        /// The version resolution starts from.
        from: String,
        /// The version resolution aims at.
        to: String,
    },
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

/// Builds the version graph of a ledger under the given base URI, applying
/// every newsletter in turn and materializing the resulting edge templates.
///
/// Version ids are the initial release's label followed by `newsletter-<n>`
/// in positional order; each version's namespace is `<base><id>/`, and
/// `<base>current/` aliases the last version. Deprecation markers do not
/// become edges — they surface as the successor snapshot's deprecated set.
pub fn build_version_graph(ledger: &Ledger, base_uri: &Uri) -> Result<VersionGraph, LedgerError> {
    let join = |segment: &str| -> Uri {
        base_uri
            .join(segment)
            .expect("version segments are URI-safe")
    };
    let mut versions: Vec<VersionInfo> = Vec::new();
    let mut snapshots: BTreeMap<String, Snapshot> = BTreeMap::new();
    let mut edges: BTreeSet<MappingEdge> = BTreeSet::new();

    let mut snapshot = ledger.initial.clone();
    let initial_id = snapshot.version.clone();
    versions.push(VersionInfo {
        id: initial_id.clone(),
        namespace: join(&format!("{initial_id}/")),
        date: ledger.initial_date,
    });
    snapshots.insert(initial_id, snapshot.clone());

    for (index, newsletter) in ledger.newsletters.iter().enumerate() {
        let (mut next, templates) = apply_newsletter(&snapshot, newsletter)?;
        let id = format!("newsletter-{}", index + 1);
        next.version = id.clone();
        let namespace = join(&format!("{id}/"));
        let previous = versions.last().expect("initial version pushed").namespace.clone();
        for template in templates {
            if let EdgeTemplate::Map {
                subject,
                object,
                relation,
            } = template
            {
                edges.insert(MappingEdge {
                    from: VersionedUri {
                        namespace: previous.clone(),
                        code: subject,
                    },
                    to: VersionedUri {
                        namespace: namespace.clone(),
                        code: object,
                    },
                    relation,
                });
            }
        }
        versions.push(VersionInfo {
            id: id.clone(),
            namespace,
            date: Some(newsletter.date),
        });
        snapshots.insert(id, next.clone());
        snapshot = next;
    }

    Ok(VersionGraph {
        versions,
        snapshots,
        edges,
        current_alias: join("current/"),
    })
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

impl VersionGraph {
    /// Position of a version id in the table. The literal id `current` is
    /// accepted as an alias for the last version (unless a version is
    /// actually named that).
    pub fn version_index(&self, id: &str) -> Option<usize> {
        self.versions
            .iter()
            .position(|v| v.id == id)
            .or_else(|| {
                (id == "current" && !self.versions.is_empty()).then(|| self.versions.len() - 1)
            })
    }

    /// The snapshot of a version id (accepting the `current` alias).
    pub fn snapshot(&self, id: &str) -> Option<&Snapshot> {
        let index = self.version_index(id)?;
        Some(&self.snapshots[&self.versions[index].id])
    }

    fn require_version(&self, id: &str) -> Result<usize, VersionError> {
        self.version_index(id)
            .ok_or_else(|| VersionError::UnknownVersion(id.to_string()))
    }

    fn require_code(&self, index: usize, code: &Code) -> Result<(), VersionError> {
        let id = &self.versions[index].id;
        if !self.snapshots[id].concepts.contains_key(code) {
            return Err(VersionError::UnknownCode {
                code: code.clone(),
                version: id.clone(),
            });
        }
        Ok(())
    }

    fn at_version(&self, index: usize, codes: BTreeSet<Code>) -> BTreeSet<VersionedUri> {
        codes
            .into_iter()
            .map(|code| VersionedUri {
                namespace: self.versions[index].namespace.clone(),
                code,
            })
            .collect()
    }

    /// What became of `code`: the concepts of `to_version` reachable from
    /// (`from_version`, `code`) by following edges forward through every
    /// intermediate version. The set is empty when the lineage ends in a
    /// dissolution.
    pub fn resolve_forward(
        &self,
        code: &Code,
        from_version: &str,
        to_version: &str,
    ) -> Result<BTreeSet<VersionedUri>, VersionError> {
        let from = self.require_version(from_version)?;
        let to = self.require_version(to_version)?;
        if from > to {
            return Err(VersionError::WrongOrder {
                from: self.versions[from].id.clone(),
                to: self.versions[to].id.clone(),
            });
        }
        self.require_code(from, code)?;
        let mut frontier = BTreeSet::from([code.clone()]);
        for step in from..to {
            let here = &self.versions[step].namespace;
            let there = &self.versions[step + 1].namespace;
            let mut next = BTreeSet::new();
            for edge in &self.edges {
                if &edge.from.namespace == here
                    && &edge.to.namespace == there
                    && frontier.contains(&edge.from.code)
                {
                    next.insert(edge.to.code.clone());
                }
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        Ok(self.at_version(to, frontier))
    }

    /// Where `code` came from: the concepts of `to_version` from which
    /// (`from_version`, `code`) is reachable, following edges in reverse.
    pub fn resolve_backward(
        &self,
        code: &Code,
        from_version: &str,
        to_version: &str,
    ) -> Result<BTreeSet<VersionedUri>, VersionError> {
        let from = self.require_version(from_version)?;
        let to = self.require_version(to_version)?;
        if to > from {
            return Err(VersionError::WrongOrder {
                from: self.versions[from].id.clone(),
                to: self.versions[to].id.clone(),
            });
        }
        self.require_code(from, code)?;
        let mut frontier = BTreeSet::from([code.clone()]);
        for step in ((to + 1)..=from).rev() {
            let here = &self.versions[step].namespace;
            let there = &self.versions[step - 1].namespace;
            let mut next = BTreeSet::new();
            for edge in &self.edges {
                if &edge.to.namespace == here
                    && &edge.from.namespace == there
                    && frontier.contains(&edge.to.code)
                {
                    next.insert(edge.from.code.clone());
                }
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        Ok(self.at_version(to, frontier))
    }

    /// The resource `code` named on `date`: the latest version effective on
    /// that date, if the code exists in its snapshot. Dates before a dated
    /// initial release yield nothing; an undated initial release counts as
    /// effective since forever. A query date equal to a version's date
    /// resolves to that version (a newsletter is effective on its
    /// publication date).
    pub fn valid_at(&self, code: &Code, date: NaiveDate) -> Option<VersionedUri> {
        let mut chosen = None;
        for (index, version) in self.versions.iter().enumerate() {
            let effective = match version.date {
                None => true,
                Some(d) => d <= date,
            };
            if effective {
                chosen = Some(index);
            }
        }
        let index = chosen?;
        let id = &self.versions[index].id;
        if !self.snapshots[id].concepts.contains_key(code) {
            return None;
        }
        Some(VersionedUri {
            namespace: self.versions[index].namespace.clone(),
            code: code.clone(),
        })
    }
}

// ---------------------------------------------------------------------------

//! Language tags for labels, including the notation-in-tag convention.
//!
//! Labels carry RFC 4646 style language tags (`en`, `de`, `zxx`). This module
//! implements only the subset needed for code lists: a primary subtag, generic
//! subtags, and at most one private-use section introduced by the singleton
//! `x`. On top of that sits the notation convention: a code-as-literal such as
//! `"FR"` can be tagged `x-notation-twoletter` (or `de-x-notation-twoletter`
//! when a base language is wanted), which marks the literal as a notation of
//! kind `twoletter` rather than a word of any language.
//!
//! Two deliberate deviations from RFC 4646, both required by the notation
//! convention: private-use subtags may be longer than eight characters
//! (`threeletter` is eleven), and no registry validation is performed.
//! Extension singletons other than `x` are rejected.

use std::fmt;

use thiserror::Error;

/// Maximum length of the primary subtag and of generic (pre-private) subtags.
const MAX_SUBTAG_LEN: usize = 8;

/// The subtag that introduces a notation kind inside a private-use section.
const NOTATION_MARKER: &str = "notation";

/// Error raised for text that is not a well-formed tag of the supported
/// subset. `offset` is the byte position in the original input where the
/// problem starts.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed language tag at byte {offset}: {reason}")]
pub struct MalformedTag {
    /// Byte offset into the input where the offending character or subtag starts.
    pub offset: usize,
    /// Human-readable description of what was expected.
    pub reason: &'static str,
}

/// A parsed, case-normalized language tag.
///
/// Tags compare by their canonical (lowercase) form: parsing `EN` and `en`
/// yields equal values, and [`fmt::Display`] renders the canonical form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LanguageTag {
    /// Primary subtag; the singleton `x` when the whole tag is private-use.
    primary: String,
    /// Remaining subtags in order, lowercase.
    subtags: Vec<String>,
    /// Position of the `x` singleton in the full subtag sequence (primary is
    /// position 0), if the tag has a private-use section.
    private_index: Option<usize>,
}

impl LanguageTag {
    /// Parses `input` into a normalized tag.
    ///
    /// Accepts a primary subtag of 2–8 alphanumerics (or the bare singleton
    /// `x` opening a wholly private tag), generic subtags of 1–8
    /// alphanumerics where a single character is only legal for `x`, and —
    /// after `x` — private-use subtags of any non-zero length. Anything else
    /// is a [`MalformedTag`] carrying the byte offset of the problem.
    pub fn parse(input: &str) -> Result<Self, MalformedTag> {
        if input.is_empty() {
            return Err(MalformedTag { offset: 0, reason: "empty tag" });
        }
        let mut primary = String::new();
        let mut subtags: Vec<String> = Vec::new();
        let mut private_index: Option<usize> = None;
        let mut position = 0; // full-sequence index of the next subtag
        let mut offset = 0; // byte offset of the current subtag
        // Split manually so every error can point at a byte.
        for part in input.split('-') {
            if part.is_empty() {
                return Err(MalformedTag { offset, reason: "empty subtag" });
            }
            if let Some(bad) = part.find(|c: char| !c.is_ascii_alphanumeric()) {
                return Err(MalformedTag {
                    offset: offset + bad,
                    reason: "subtags may only contain ASCII letters and digits",
                });
            }
            let lower = part.to_ascii_lowercase();
            let in_private = private_index.is_some();
            if position == 0 {
                if lower == "x" {
                    private_index = Some(0);
                } else if part.len() < 2 || part.len() > MAX_SUBTAG_LEN {
                    return Err(MalformedTag {
                        offset,
                        reason: "primary subtag must be 2-8 alphanumerics or the singleton `x`",
                    });
                }
                primary = lower;
            } else if !in_private && lower == "x" {
                private_index = Some(position);
                subtags.push(lower);
            } else if !in_private && part.len() == 1 {
                return Err(MalformedTag {
                    offset,
                    reason: "extension singletons other than `x` are not supported",
                });
            } else if !in_private && part.len() > MAX_SUBTAG_LEN {
                return Err(MalformedTag { offset, reason: "subtag longer than 8 characters" });
            } else {
                subtags.push(lower);
            }
            position += 1;
            offset += part.len() + 1;
        }
        // A private-use section must contain at least one subtag.
        if private_index == Some(position - 1) {
            let x_offset = input.len() - 1;
            return Err(MalformedTag {
                offset: x_offset,
                reason: "private-use section introduced by `x` is empty",
            });
        }
        Ok(LanguageTag { primary, subtags, private_index })
    }

    /// Builds the tag that carries a notation of `kind`: `x-notation-<kind>`
    /// on its own, or `<base>-x-notation-<kind>` when a base language tag is
    /// given. `kind` must be a non-empty lowercase alphanumeric token and the
    /// base must not already have a private-use section.
    pub fn for_notation(kind: &str, base: Option<&LanguageTag>) -> Result<Self, MalformedTag> {
        let prefix = match base {
            Some(tag) => {
                if let Some(index) = tag.private_index {
                    // Byte offset of the base's `x` singleton in the candidate text.
                    let offset = tag
                        .full_sequence()
                        .take(index)
                        .map(|s| s.len() + 1)
                        .sum();
                    return Err(MalformedTag {
                        offset,
                        reason: "base tag already has a private-use section",
                    });
                }
                format!("{tag}-")
            }
            None => String::new(),
        };
        if let Some(bad) = kind.find(|c: char| !(c.is_ascii_lowercase() || c.is_ascii_digit())) {
            return Err(MalformedTag {
                offset: prefix.len() + "x-notation-".len() + bad,
                reason: "notation kind must be a non-empty lowercase alphanumeric token",
            });
        }
        if kind.is_empty() {
            return Err(MalformedTag {
                offset: prefix.len() + "x-notation-".len(),
                reason: "notation kind must be a non-empty lowercase alphanumeric token",
            });
        }
        Self::parse(&format!("{prefix}x-notation-{kind}"))
    }

    /// The `zxx` tag ("no linguistic content"), used when a plain code is
    /// published as a label without pretending it belongs to a language.
    pub fn zxx() -> Self {
        LanguageTag { primary: "zxx".to_owned(), subtags: Vec::new(), private_index: None }
    }

    /// Primary subtag (lowercase).
    pub fn primary(&self) -> &str {
        &self.primary
    }

    /// Subtags after the primary, in order (lowercase).
    pub fn subtags(&self) -> &[String] {
        &self.subtags
    }

    /// Position of the `x` singleton in the full subtag sequence (the primary
    /// is position 0), if any.
    pub fn private_index(&self) -> Option<usize> {
        self.private_index
    }

    /// The private-use subtags following the `x` singleton, if any.
    pub fn private_chain(&self) -> Option<&[String]> {
        self.private_index.map(|index| &self.subtags[index..])
    }

    /// The notation kind carried by this tag, if the private-use chain is
    /// exactly `notation-<kind>`. A bare `x-notation` or a longer chain is
    /// not a notation tag.
    pub fn notation_kind(&self) -> Option<&str> {
        match self.private_chain() {
            Some([marker, kind]) if marker == NOTATION_MARKER => Some(kind),
            _ => None,
        }
    }

    /// All subtags including the primary, in order.
    fn full_sequence(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.primary.as_str()).chain(self.subtags.iter().map(String::as_str))
    }
}

impl fmt::Display for LanguageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.primary)?;
        for subtag in &self.subtags {
            write!(f, "-{subtag}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for LanguageTag {
    type Err = MalformedTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

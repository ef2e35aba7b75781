//! Deterministic Turtle output and the matching subset parser.
//!
//! The writer produces one canonical text for any triple set: `@prefix` lines
//! in prefix-map order, subject blocks sorted by (position of the subject's
//! namespace in the map, local name), predicates grouped with `;` (with
//! `rdf:type` first, written `a`), objects grouped with `,`, two-space
//! continuation indent, LF endings. A subject whose URI no prefix covers — or
//! whose local part will not serialize as a prefixed name — falls back to
//! `<…>` form.
//!
//! The parser accepts exactly the constructs the writer emits (plus `#`
//! comments and flexible whitespace) and rejects everything else — blank
//! nodes, typed literals, long strings, `@base` — with a line/column
//! position, so `parse(emit(t, p)) == (t, p)` holds for every triple set and
//! prefix map.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use thiserror::Error;

use super::model::{PrefixMap, Term, Triple, Uri};
use super::ns;
use crate::langtag::LanguageTag;

/// Error raised by [`parse_turtle_subset`], positioned in the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    /// 1-based line of the offending character.
    pub line: usize,
    /// 1-based column of the offending character.
    pub column: usize,
    /// What went wrong.
    pub message: String,
}

// ---------------------------------------------------------------------------
// Writer
// ---------------------------------------------------------------------------

/// True when `local` can follow a prefix in a prefixed name. The writer and
/// parser agree on this alphabet: letters, digits, hyphens and underscores
/// (the empty local name is fine — it denotes the namespace itself).
fn is_safe_local(local: &str) -> bool {
    local.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

/// Renders a URI as a prefixed name when a declared namespace covers it,
/// in `<…>` form otherwise.
fn render_uri(uri: &Uri, prefixes: &PrefixMap) -> String {
    match prefixes.best_match(uri) {
        Some((index, local)) if is_safe_local(local) => {
            let (prefix, _) = prefixes.iter().nth(index).expect("index from best_match");
            format!("{prefix}:{local}")
        }
        _ => format!("<{uri}>"),
    }
}

/// Renders a literal with the four supported escapes and an optional tag.
fn render_literal(text: &str, lang: Option<&LanguageTag>) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            other => out.push(other),
        }
    }
    out.push('"');
    if let Some(tag) = lang {
        out.push('@');
        out.push_str(&tag.to_string());
    }
    out
}

/// Serializes `triples` under `prefixes` into canonical Turtle.
///
/// The output is a pure function of the (set, map) value — insertion order
/// cannot leak into the bytes — and ends with a single newline unless both
/// inputs are empty.
pub fn emit_turtle(triples: &BTreeSet<Triple>, prefixes: &PrefixMap) -> String {
    let type_uri = ns::rdf_type();
    // subject sort key → (rendered subject, predicate key → rendered objects);
    // predicate key (0, "a") puts rdf:type first, everything else sorts by
    // its rendered text.
    let mut groups: BTreeMap<(usize, String), (String, BTreeMap<(u8, String), BTreeSet<String>>)> =
        BTreeMap::new();
    for triple in triples {
        let (key, rendered_subject) = match prefixes.best_match(&triple.subject) {
            Some((index, local)) if is_safe_local(local) => {
                let (prefix, _) = prefixes.iter().nth(index).expect("index from best_match");
                ((index, local.to_owned()), format!("{prefix}:{local}"))
            }
            _ => (
                (usize::MAX, triple.subject.as_str().to_owned()),
                format!("<{}>", triple.subject),
            ),
        };
        let predicate_key = if triple.predicate == type_uri {
            (0, "a".to_owned())
        } else {
            (1, render_uri(&triple.predicate, prefixes))
        };
        let rendered_object = match &triple.object {
            Term::Uri(uri) => render_uri(uri, prefixes),
            Term::Literal { text, lang } => render_literal(text, lang.as_ref()),
        };
        groups
            .entry(key)
            .or_insert_with(|| (rendered_subject, BTreeMap::new()))
            .1
            .entry(predicate_key)
            .or_default()
            .insert(rendered_object);
    }

    let mut blocks: Vec<String> = Vec::new();
    if !prefixes.is_empty() {
        let mut header = String::new();
        for (prefix, namespace) in prefixes.iter() {
            header.push_str(&format!("@prefix {prefix}: <{namespace}> .\n"));
        }
        blocks.push(header);
    }
    for (rendered_subject, predicates) in groups.values() {
        let mut statement = rendered_subject.clone();
        for (position, ((_, rendered_predicate), objects)) in predicates.iter().enumerate() {
            let objects = objects.iter().cloned().collect::<Vec<_>>().join(", ");
            if position == 0 {
                statement.push_str(&format!(" {rendered_predicate} {objects}"));
            } else {
                statement.push_str(&format!(" ;\n  {rendered_predicate} {objects}"));
            }
        }
        statement.push_str(" .\n");
        blocks.push(statement);
    }
    blocks.join("\n")
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

/// Parses text produced by [`emit_turtle`] back into its triple set and
/// prefix map. Constructs outside the subset fail with a positioned
/// [`ParseError`].
pub fn parse_turtle_subset(input: &str) -> Result<(BTreeSet<Triple>, PrefixMap), ParseError> {
    Parser::new(input).document()
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Parser {
    fn new(input: &str) -> Self {
        Parser { chars: input.chars().collect(), pos: 0, line: 1, column: 1 }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.column, message: message.into() }
    }

    fn error_at(&self, line: usize, column: usize, message: impl Into<String>) -> ParseError {
        ParseError { line, column, message: message.into() }
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn expect(&mut self, wanted: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(c) if c == wanted => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected `{wanted}`, found `{c}`"))),
            None => Err(self.error(format!("expected `{wanted}`, found end of input"))),
        }
    }

    fn document(&mut self) -> Result<(BTreeSet<Triple>, PrefixMap), ParseError> {
        let mut triples = BTreeSet::new();
        let mut prefixes = PrefixMap::new();
        self.skip_trivia();
        while self.peek().is_some() {
            if self.peek() == Some('@') {
                self.prefix_declaration(&mut prefixes)?;
            } else {
                self.statement(&prefixes, &mut triples)?;
            }
            self.skip_trivia();
        }
        Ok((triples, prefixes))
    }

    fn prefix_declaration(&mut self, prefixes: &mut PrefixMap) -> Result<(), ParseError> {
        let (line, column) = (self.line, self.column);
        self.bump(); // '@'
        let keyword = self.name_chars();
        if keyword != "prefix" {
            return Err(self.error_at(
                line,
                column,
                format!("unsupported directive `@{keyword}`; only `@prefix` is recognized"),
            ));
        }
        self.skip_trivia();
        let prefix = self.name_chars();
        self.expect(':')?;
        self.skip_trivia();
        let namespace = self.iri_ref()?;
        self.skip_trivia();
        self.expect('.')?;
        prefixes
            .add(prefix, namespace)
            .map_err(|e| self.error_at(line, column, e.to_string()))
    }

    fn statement(
        &mut self,
        prefixes: &PrefixMap,
        triples: &mut BTreeSet<Triple>,
    ) -> Result<(), ParseError> {
        if self.peek() == Some('"') {
            return Err(self.error("a literal cannot be the subject of a statement"));
        }
        let subject = self.iri(prefixes)?;
        loop {
            self.skip_trivia();
            let predicate = self.verb(prefixes)?;
            loop {
                self.skip_trivia();
                let object = self.object(prefixes)?;
                triples.insert(Triple::new(subject.clone(), predicate.clone(), object));
                self.skip_trivia();
                match self.peek() {
                    Some(',') => {
                        self.bump();
                    }
                    Some(';') => {
                        self.bump();
                        break;
                    }
                    Some('.') => {
                        self.bump();
                        return Ok(());
                    }
                    Some(c) => {
                        return Err(self.error(format!(
                            "expected `,`, `;` or `.` after an object, found `{c}`"
                        )))
                    }
                    None => {
                        return Err(
                            self.error("expected `,`, `;` or `.` after an object, found end of input")
                        )
                    }
                }
            }
        }
    }

    fn verb(&mut self, prefixes: &PrefixMap) -> Result<Uri, ParseError> {
        // Bare `a` abbreviates rdf:type; it is only `a` when not the start of
        // a longer name or a prefixed name.
        if self.peek() == Some('a') {
            let next = self.peek_at(1);
            let continues = matches!(
                next,
                Some(c) if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == ':'
            );
            if !continues {
                self.bump();
                return Ok(ns::rdf_type());
            }
        }
        self.iri(prefixes)
    }

    fn object(&mut self, prefixes: &PrefixMap) -> Result<Term, ParseError> {
        match self.peek() {
            Some('"') => self.literal(),
            _ => Ok(Term::Uri(self.iri(prefixes)?)),
        }
    }

    fn iri(&mut self, prefixes: &PrefixMap) -> Result<Uri, ParseError> {
        let (line, column) = (self.line, self.column);
        match self.peek() {
            Some('<') => self.iri_ref(),
            Some('[') => Err(self.error("blank nodes are not part of the subset")),
            Some('(') => Err(self.error("collections are not part of the subset")),
            Some('_') if self.peek_at(1) == Some(':') => {
                Err(self.error("blank node labels are not part of the subset"))
            }
            Some(c) if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == ':' => {
                let prefix = self.name_chars();
                if self.peek() != Some(':') {
                    return Err(self.error_at(
                        line,
                        column,
                        format!("`{prefix}` is not a term of the subset (expected a prefixed name)"),
                    ));
                }
                self.bump();
                let local = self.name_chars();
                let namespace = prefixes.namespace(&prefix).ok_or_else(|| {
                    self.error_at(line, column, format!("prefix `{prefix}` is not declared"))
                })?;
                namespace
                    .join(&local)
                    .map_err(|e| self.error_at(line, column, e.to_string()))
            }
            Some(c) => Err(self.error(format!("expected an IRI, found `{c}`"))),
            None => Err(self.error("expected an IRI, found end of input")),
        }
    }

    fn iri_ref(&mut self) -> Result<Uri, ParseError> {
        let (line, column) = (self.line, self.column);
        self.expect('<')?;
        let mut text = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some('\n') | None => {
                    return Err(self.error_at(line, column, "unterminated `<…>` IRI"))
                }
                Some(c) => text.push(c),
            }
        }
        Uri::new(text).map_err(|e| self.error_at(line, column, e.to_string()))
    }

    fn literal(&mut self) -> Result<Term, ParseError> {
        let (line, column) = (self.line, self.column);
        self.expect('"')?;
        if self.peek() == Some('"') && self.peek_at(1) == Some('"') {
            return Err(self.error_at(line, column, "multi-line strings are not part of the subset"));
        }
        let mut text = String::new();
        loop {
            match self.bump() {
                Some('"') => break,
                Some('\\') => match self.bump() {
                    Some('"') => text.push('"'),
                    Some('\\') => text.push('\\'),
                    Some('n') => text.push('\n'),
                    Some('t') => text.push('\t'),
                    Some(c) => {
                        return Err(self.error(format!("unsupported escape sequence `\\{c}`")))
                    }
                    None => return Err(self.error_at(line, column, "unterminated string literal")),
                },
                Some(c) => text.push(c),
                None => return Err(self.error_at(line, column, "unterminated string literal")),
            }
        }
        match self.peek() {
            Some('@') => {
                self.bump();
                let (tag_line, tag_column) = (self.line, self.column);
                let mut tag = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '-' {
                        tag.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                let lang = LanguageTag::parse(&tag).map_err(|e| {
                    self.error_at(tag_line, tag_column + e.offset, e.to_string())
                })?;
                Ok(Term::Literal { text, lang: Some(lang) })
            }
            Some('^') => Err(self.error("typed literals are not part of the subset")),
            _ => Ok(Term::Literal { text, lang: None }),
        }
    }

    /// Reads a run of name characters (letters, digits, `-`, `_`); possibly
    /// empty.
    fn name_chars(&mut self) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                out.push(c);
                self.bump();
            } else {
                break;
            }
        }
        out
    }
}

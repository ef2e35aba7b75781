//! Command-line interface: build, export, validate, and resolve.
//!
//! Four subcommands over one input format (the ledger TSV):
//!
//! * `build` parses a ledger, applies every newsletter, and prints a
//!   version table (id, namespace, date, concept count).
//! * `export` writes Turtle — per-version snapshots, the container
//!   grouping, the cross-version mappings, or all three — to a file or
//!   standard output, deterministically.
//! * `validate` checks every version's snapshot against the vocabulary
//!   invariants and lists violations as `<version> <kind> <code>` lines.
//! * `resolve` follows a code between two versions (forward or backward)
//!   or looks it up by date.
//!
//! Exit codes are a stable contract: `0` success, `1` domain violation,
//! `2` input error, `3` empty resolution. Diagnostics go to the error
//! stream; data goes to the output stream, so commands compose in
//! pipelines.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::ledger::{parse_ledger, Ledger};
use crate::rdf::encode::{
    encode_grouping, encode_mappings, encode_snapshot, EncodeError, NotationStyle, Spelling,
    UriStrategy,
};
use crate::rdf::model::{PrefixMap, Triple, Uri};
use crate::rdf::ns::{OWL, SKOS};
use crate::rdf::turtle::emit_turtle;
use crate::version::{build_version_graph, VersionGraph};
use crate::vocab::{Code, Snapshot};

// ---------------------------------------------------------------------------
// Exit codes
// ---------------------------------------------------------------------------

/// Success.
pub const EXIT_OK: u8 = 0;
/// The input parsed but breaks a domain invariant.
pub const EXIT_VIOLATION: u8 = 1;
/// The input could not be read or parsed, or a query referred to an
/// unknown code or version.
pub const EXIT_INPUT: u8 = 2;
/// A resolution query succeeded but produced no result.
pub const EXIT_EMPTY: u8 = 3;

// ---------------------------------------------------------------------------
// Argument grammar
// ---------------------------------------------------------------------------

/// Versioned SKOS code lists: build, export, validate, resolve.
#[derive(Debug, Parser)]
#[command(name = "skoslist", version, about)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a ledger, apply every newsletter, and print the version table.
    Build {
        /// Path of the ledger TSV file.
        ledger: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Write the ledger's statements as Turtle.
    Export {
        /// Path of the ledger TSV file.
        ledger: PathBuf,
        /// Which statements to write.
        #[arg(long, value_enum, default_value_t = What::All)]
        what: What,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Check every version snapshot against the vocabulary invariants.
    Validate {
        /// Path of the ledger TSV file.
        ledger: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Follow a code across versions, or look it up by date.
    Resolve {
        /// Path of the ledger TSV file.
        ledger: PathBuf,
        /// The code to resolve.
        code: String,
        /// Version the code is named in.
        #[arg(long, requires = "to", conflicts_with = "at")]
        from: Option<String>,
        /// Version to resolve into (accepts `current`).
        #[arg(long, requires = "from", conflicts_with = "at")]
        to: Option<String>,
        /// Date to look the code up at (YYYY-MM-DD).
        #[arg(long)]
        at: Option<String>,
        /// Follow edges in reverse; `--from` is then the later version.
        #[arg(long, requires = "from", conflicts_with = "at")]
        backward: bool,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

/// What `export` writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum What {
    /// Every version's concepts and containers.
    Snapshots,
    /// Only the container skeleton of the latest version.
    Grouping,
    /// Only the cross-version mapping statements.
    Mappings,
    /// Snapshots, grouping, and mappings in one document.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StyleArg {
    /// One dedicated property per notation kind.
    Property,
    /// Preferred labels with `x-notation-<kind>` language tags.
    Langtag,
    /// Preferred labels in the `zxx` language (one notation per concept).
    Zxx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpellingArg {
    /// `skos:notationPropery`, verbatim from the original proposal.
    Paper,
    /// `skos:notationProperty`.
    Corrected,
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
struct ConfigArgs {
    /// Base URI namespace of the scheme; must end with `/`.
    #[arg(long, default_value = "http://example.org/list/")]
    base_uri: String,
    /// How notations are written in exports.
    #[arg(long, value_enum, default_value_t = StyleArg::Property)]
    notation_style: StyleArg,
    /// Spelling of the scheme-level notation declaration relation.
    #[arg(long, value_enum, default_value_t = SpellingArg::Corrected)]
    spelling: SpellingArg,
    /// Write output to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Checked runtime configuration.
#[derive(Debug, Clone)]
pub struct CliConfig {
    /// Base URI namespace; always ends with `/`.
    pub base_uri: Uri,
    /// How notations are written.
    pub notation_style: NotationStyle,
    /// Spelling of the notation declaration relation.
    pub spelling: Spelling,
    /// Output file, if not standard output.
    pub output_path: Option<PathBuf>,
}

impl ConfigArgs {
    fn into_config(self) -> Result<CliConfig, String> {
        if !self.base_uri.ends_with('/') {
            return Err(format!("base URI `{}` must end with `/`", self.base_uri));
        }
        let base_uri = Uri::new(self.base_uri).map_err(|e| e.to_string())?;
        Ok(CliConfig {
            base_uri,
            notation_style: match self.notation_style {
                StyleArg::Property => NotationStyle::Property,
                StyleArg::Langtag => NotationStyle::Langtag,
                StyleArg::Zxx => NotationStyle::Zxx,
            },
            spelling: match self.spelling {
                SpellingArg::Paper => Spelling::Paper,
                SpellingArg::Corrected => Spelling::Corrected,
            },
            output_path: self.output,
        })
    }
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Parses the command line and runs one command, returning its exit code.
pub fn run() -> u8 {
    let cli = Cli::parse();
    match cli.command {
        Command::Build { ledger, config } => with_config(config, |c| cmd_build(&ledger, &c)),
        Command::Export { ledger, what, config } => {
            with_config(config, |c| cmd_export(&ledger, &c, what))
        }
        Command::Validate { ledger, config } => {
            with_config(config, |c| cmd_validate(&ledger, &c))
        }
        Command::Resolve { ledger, code, from, to, at, backward, config } => {
            with_config(config, |c| {
                cmd_resolve(&ledger, &c, &code, from.as_deref(), to.as_deref(), at.as_deref(), backward)
            })
        }
    }
}

fn with_config(args: ConfigArgs, command: impl FnOnce(CliConfig) -> u8) -> u8 {
    match args.into_config() {
        Ok(config) => command(config),
        Err(message) => {
            eprintln!("error: {message}");
            EXIT_INPUT
        }
    }
}

fn load(path: &Path, config: &CliConfig) -> Result<(Ledger, VersionGraph), u8> {
    let text = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(error) => {
            eprintln!("error: {}: {error}", path.display());
            return Err(EXIT_INPUT);
        }
    };
    let ledger = match parse_ledger(&text) {
        Ok(ledger) => ledger,
        Err(error) => {
            eprintln!("error: {}: {error}", path.display());
            return Err(EXIT_INPUT);
        }
    };
    let graph = match build_version_graph(&ledger, &config.base_uri) {
        Ok(graph) => graph,
        Err(error) => {
            eprintln!("error: {}: {error}", path.display());
            return Err(EXIT_INPUT);
        }
    };
    Ok((ledger, graph))
}

/// Violations of every version, as `<version> <kind> <code>` lines.
fn violation_lines(graph: &VersionGraph) -> Vec<String> {
    let mut lines = Vec::new();
    for info in &graph.versions {
        for violation in graph.snapshots[&info.id].validate() {
            lines.push(format!("{}\t{}\t{}", info.id, violation.kind(), violation.code()));
        }
    }
    lines
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_build(path: &Path, config: &CliConfig) -> u8 {
    let (_, graph) = match load(path, config) {
        Ok(loaded) => loaded,
        Err(code) => return code,
    };
    let violations = violation_lines(&graph);
    for line in &violations {
        eprintln!("{line}");
    }
    for info in &graph.versions {
        let date = info.date.map_or_else(|| "-".to_string(), |d| d.to_string());
        let count = graph.snapshots[&info.id].concepts.len();
        println!("{}\t{}\t{}\t{}", info.id, info.namespace, date, count);
    }
    if violations.is_empty() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}

fn cmd_validate(path: &Path, config: &CliConfig) -> u8 {
    let (_, graph) = match load(path, config) {
        Ok(loaded) => loaded,
        Err(code) => return code,
    };
    let violations = violation_lines(&graph);
    if violations.is_empty() {
        println!("OK");
        EXIT_OK
    } else {
        for line in violations {
            println!("{line}");
        }
        EXIT_VIOLATION
    }
}

fn cmd_export(path: &Path, config: &CliConfig, what: What) -> u8 {
    let (ledger, graph) = match load(path, config) {
        Ok(loaded) => loaded,
        Err(code) => return code,
    };
    let violations = violation_lines(&graph);
    if !violations.is_empty() {
        for line in violations {
            eprintln!("{line}");
        }
        return EXIT_VIOLATION;
    }
    let document = match render_export(&ledger, &graph, config, what) {
        Ok(document) => document,
        Err(error) => {
            eprintln!("error: {error}");
            return EXIT_VIOLATION;
        }
    };
    match &config.output_path {
        Some(file) => {
            if let Err(error) = fs::write(file, &document) {
                eprintln!("error: {}: {error}", file.display());
                return EXIT_INPUT;
            }
        }
        None => print!("{document}"),
    }
    EXIT_OK
}

fn cmd_resolve(
    path: &Path,
    config: &CliConfig,
    code: &str,
    from: Option<&str>,
    to: Option<&str>,
    at: Option<&str>,
    backward: bool,
) -> u8 {
    let (_, graph) = match load(path, config) {
        Ok(loaded) => loaded,
        Err(code) => return code,
    };
    let code = match Code::new(code) {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            return EXIT_INPUT;
        }
    };
    match (from, to, at) {
        (Some(from), Some(to), None) => {
            let outcome = if backward {
                graph.resolve_backward(&code, from, to)
            } else {
                graph.resolve_forward(&code, from, to)
            };
            match outcome {
                Ok(result) if result.is_empty() => EXIT_EMPTY,
                Ok(result) => {
                    for uri in result {
                        println!("{uri}");
                    }
                    EXIT_OK
                }
                Err(error) => {
                    eprintln!("error: {error}");
                    EXIT_INPUT
                }
            }
        }
        (None, None, Some(at)) => {
            let date = match NaiveDate::parse_from_str(at, "%Y-%m-%d") {
                Ok(date) => date,
                Err(_) => {
                    eprintln!("error: `{at}` is not a date (expected YYYY-MM-DD)");
                    return EXIT_INPUT;
                }
            };
            match graph.valid_at(&code, date) {
                Some(uri) => {
                    println!("{uri}");
                    EXIT_OK
                }
                None => EXIT_EMPTY,
            }
        }
        _ => {
            eprintln!("error: resolve needs either --from and --to, or --at");
            EXIT_INPUT
        }
    }
}

// ---------------------------------------------------------------------------
// Export assembly
// ---------------------------------------------------------------------------

/// Declares the unversioned layout's prefixes: the scheme id at the base
/// namespace, plus one prefix per namespace-owning container
/// (`<scheme>-<suffix>` at `<base><suffix>/`). Collisions with already
/// declared prefixes are skipped; the first declaration wins.
fn add_base_prefixes(prefixes: &mut PrefixMap, scheme: &Code, base: &Uri, snapshot: &Snapshot) {
    let _ = prefixes.add(scheme.as_str(), base.clone());
    for id in snapshot.containers.keys() {
        if let Some(suffix) = id.as_str().strip_prefix(&format!("{scheme}-")) {
            let namespace = base
                .join(&format!("{suffix}/"))
                .expect("code characters are URI-safe");
            let _ = prefixes.add(id.as_str(), namespace);
        }
    }
}

/// Declares one `<scheme>-v<k>` prefix per version, and optionally the
/// `<scheme>-current` alias.
fn add_version_prefixes(
    prefixes: &mut PrefixMap,
    scheme: &Code,
    graph: &VersionGraph,
    with_current: bool,
) {
    for (k, info) in graph.versions.iter().enumerate() {
        let _ = prefixes.add(format!("{scheme}-v{k}"), info.namespace.clone());
    }
    if with_current {
        let _ = prefixes.add(format!("{scheme}-current"), graph.current_alias.clone());
    }
}

/// The latest version's snapshot.
fn last_snapshot<'a>(graph: &'a VersionGraph) -> &'a Snapshot {
    let info = graph.versions.last().expect("a graph always has its initial version");
    &graph.snapshots[&info.id]
}

/// All versions' full snapshots. A single-release ledger is encoded in the
/// base namespace itself; once newsletters exist, every version is encoded
/// in its own version namespace.
fn snapshot_triples(
    ledger: &Ledger,
    graph: &VersionGraph,
    config: &CliConfig,
) -> Result<BTreeSet<Triple>, EncodeError> {
    let mut triples = BTreeSet::new();
    for info in &graph.versions {
        let snapshot = &graph.snapshots[&info.id];
        let namespace = if graph.versions.len() == 1 {
            &config.base_uri
        } else {
            &info.namespace
        };
        let strategy = UriStrategy::profile(snapshot, &ledger.scheme_id, namespace);
        triples.extend(encode_snapshot(
            snapshot,
            &strategy,
            config.notation_style,
            config.spelling,
        )?);
    }
    Ok(triples)
}

/// The latest version's container skeleton, in the base namespace.
fn grouping_triples(ledger: &Ledger, graph: &VersionGraph, config: &CliConfig) -> BTreeSet<Triple> {
    let snapshot = last_snapshot(graph);
    let strategy = UriStrategy::profile(snapshot, &ledger.scheme_id, &config.base_uri);
    encode_grouping(snapshot, &strategy)
}

fn render_export(
    ledger: &Ledger,
    graph: &VersionGraph,
    config: &CliConfig,
    what: What,
) -> Result<String, EncodeError> {
    let scheme = &ledger.scheme_id;
    let skos_ns = Uri::new(SKOS).expect("well-known URI");
    let owl_ns = Uri::new(OWL).expect("well-known URI");
    let mut prefixes = PrefixMap::new();
    prefixes.add("skos", skos_ns).expect("fresh prefix map");
    let triples = match what {
        What::Snapshots => {
            if graph.versions.len() == 1 {
                add_base_prefixes(&mut prefixes, scheme, &config.base_uri, last_snapshot(graph));
            } else {
                add_version_prefixes(&mut prefixes, scheme, graph, false);
            }
            snapshot_triples(ledger, graph, config)?
        }
        What::Grouping => {
            add_base_prefixes(&mut prefixes, scheme, &config.base_uri, last_snapshot(graph));
            grouping_triples(ledger, graph, config)
        }
        What::Mappings => {
            prefixes.add("owl", owl_ns).expect("distinct prefix names");
            add_version_prefixes(&mut prefixes, scheme, graph, true);
            encode_mappings(graph)
        }
        What::All => {
            prefixes.add("owl", owl_ns).expect("distinct prefix names");
            add_base_prefixes(&mut prefixes, scheme, &config.base_uri, last_snapshot(graph));
            if graph.versions.len() > 1 {
                add_version_prefixes(&mut prefixes, scheme, graph, true);
            }
            let mut triples = snapshot_triples(ledger, graph, config)?;
            triples.extend(grouping_triples(ledger, graph, config));
            triples.extend(encode_mappings(graph));
            triples
        }
    };
    Ok(emit_turtle(&triples, &prefixes))
}

// ---------------------------------------------------------------------------

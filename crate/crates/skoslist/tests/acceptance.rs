//! Acceptance suite: one test per release criterion, each printing a
//! `criterion <n>: PASS/FAIL` line (visible with `--nocapture`):
//!
//! 1. The Canada mapping export equals the 12-statement golden.
//! 2. The France grouping export equals the 14-triple nested-scheme golden.
//! 3. The notation goldens hold in both styles and both spellings.
//! 4. Resolution agrees with an independent closure over the emitted
//!    mapping triples, on the fixtures and on 100 random ledgers.
//! 5. The specific Canada resolutions hold exactly.
//! 6. Date lookups pick the right version, or nothing.
//! 7. 500+ random documents round-trip through the writer and parser.
//! 8. Each violation class is caught with exactly the expected kind.
//! 9. Exports are byte-identical across runs on every fixture.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{exit_code, fixture, skoslist, stderr, stdout};
use skoslist::langtag::LanguageTag;
use skoslist::ledger::{parse_ledger, ChangeEvent, Ledger, Newsletter};
use skoslist::rdf::encode::{
    encode_grouping, encode_mappings, encode_snapshot, NotationStyle, Spelling, UriStrategy,
};
use skoslist::rdf::model::{PrefixMap, Term, Triple, Uri};
use skoslist::rdf::ns::{owl, rdf_type, skos};
use skoslist::rdf::turtle::{emit_turtle, parse_turtle_subset};
use skoslist::version::{build_version_graph, VersionGraph};
use skoslist::vocab::{Code, Concept, Container, ContainerKind, Label, Snapshot};

// ---------------------------------------------------------------------------
// Harness
// ---------------------------------------------------------------------------

fn criterion(number: usize, name: &str, body: impl FnOnce()) {
    let outcome = catch_unwind(AssertUnwindSafe(body));
    match &outcome {
        Ok(()) => println!("criterion {number}: PASS — {name}"),
        Err(_) => println!("criterion {number}: FAIL — {name}"),
    }
    if let Err(payload) = outcome {
        resume_unwind(payload);
    }
}

fn uri(text: &str) -> Uri {
    Uri::new(text).unwrap()
}

fn code(text: &str) -> Code {
    Code::new(text).unwrap()
}

fn en_label(text: impl Into<String>) -> Label {
    Label::new(text, "en".parse::<LanguageTag>().unwrap())
}

fn triple_uri(s: &str, p: Uri, o: &str) -> Triple {
    Triple::new(uri(s), p, Term::Uri(uri(o)))
}

fn triple_lit(s: &str, p: Uri, text: &str, tag: Option<&str>) -> Triple {
    let object = match tag {
        Some(tag) => Term::tagged(text, tag.parse::<LanguageTag>().unwrap()),
        None => Term::literal(text),
    };
    Triple::new(uri(s), p, object)
}

fn export(name: &str, base: &str, extra: &[&str]) -> (BTreeSet<Triple>, PrefixMap) {
    let path = fixture(name);
    let mut args = vec!["export", path.to_str().unwrap(), "--base-uri", base];
    args.extend_from_slice(extra);
    let output = skoslist(&args);
    assert_eq!(exit_code(&output), 0, "{}", stderr(&output));
    parse_turtle_subset(&stdout(&output)).expect("the exported Turtle parses")
}

fn fixture_graph(name: &str, base: &str) -> VersionGraph {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    let ledger = parse_ledger(&text).unwrap();
    build_version_graph(&ledger, &uri(base)).unwrap()
}

const CANADA_BASE: &str = "http://iso.org/iso3166/2/";

// ---------------------------------------------------------------------------
// Criterion 1: Canada mapping golden
// ---------------------------------------------------------------------------

fn canada_mapping_golden() -> BTreeSet<Triple> {
    let v = |n: usize, c: &str| format!("{CANADA_BASE}newsletter-{n}/{c}");
    let v0 = |c: &str| format!("{CANADA_BASE}first/{c}");
    let same = owl("sameAs");
    let exact = skos("exactMatch");
    let narrow = skos("narrowMatch");
    [
        triple_uri(&v0("CA-NF"), same.clone(), &v(1, "CA-NF")),
        triple_uri(&v0("CA-NT"), narrow.clone(), &v(1, "CA-NT")),
        triple_uri(&v0("CA-NT"), narrow, &v(1, "CA-NU")),
        triple_uri(&v(1, "CA-NF"), exact.clone(), &v(2, "CA-NF")),
        triple_uri(&v(1, "CA-NT"), same.clone(), &v(2, "CA-NT")),
        triple_uri(&v(1, "CA-NU"), same.clone(), &v(2, "CA-NU")),
        triple_uri(&v(2, "CA-NF"), same.clone(), &v(3, "CA-NF")),
        triple_uri(&v(2, "CA-NT"), same.clone(), &v(3, "CA-NT")),
        triple_uri(&v(2, "CA-NU"), same.clone(), &v(3, "CA-NU")),
        triple_uri(&v(3, "CA-NF"), exact, &v(4, "CA-NL")),
        triple_uri(&v(3, "CA-NT"), same.clone(), &v(4, "CA-NT")),
        triple_uri(&v(3, "CA-NU"), same, &v(4, "CA-NU")),
    ]
    .into_iter()
    .collect()
}

#[test]
fn c1_canada_mapping_golden() {
    criterion(1, "Canada mapping export equals the 12-statement golden", || {
        let started = Instant::now();
        let (triples, _) = export("canada.tsv", CANADA_BASE, &["--what", "mappings"]);
        let elapsed = started.elapsed();
        assert_eq!(triples.len(), 12);
        let count = |predicate: Uri| triples.iter().filter(|t| t.predicate == predicate).count();
        assert_eq!(count(skos("exactMatch")), 2);
        assert_eq!(count(skos("narrowMatch")), 2);
        assert_eq!(count(owl("sameAs")), 8);
        assert_eq!(triples, canada_mapping_golden());
        assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    });
}

// ---------------------------------------------------------------------------
// Criterion 2: grouping golden
// ---------------------------------------------------------------------------

fn grouping_golden() -> BTreeSet<Triple> {
    let base = "http://iso.org/iso3166/";
    let scheme = "http://www.w3.org/2004/02/skos/core#ConceptScheme";
    let collection = "http://www.w3.org/2004/02/skos/core#Collection";
    let member = || skos("member");
    [
        triple_uri(base, rdf_type(), scheme),
        triple_uri(base, member(), "http://iso.org/iso3166/1/"),
        triple_uri(base, member(), "http://iso.org/iso3166/2/"),
        triple_uri("http://iso.org/iso3166/1/", rdf_type(), scheme),
        triple_uri("http://iso.org/iso3166/2/", rdf_type(), scheme),
        triple_uri("http://iso.org/iso3166/2/", member(), "http://iso.org/iso3166/2/FR"),
        triple_uri("http://iso.org/iso3166/2/FR", rdf_type(), scheme),
        triple_uri("http://iso.org/iso3166/2/FR", member(), "http://iso.org/iso3166/2/FR-regions"),
        triple_uri(
            "http://iso.org/iso3166/2/FR",
            member(),
            "http://iso.org/iso3166/2/FR-departements",
        ),
        triple_uri("http://iso.org/iso3166/2/FR-regions", rdf_type(), collection),
        triple_uri("http://iso.org/iso3166/2/FR-regions", member(), "http://iso.org/iso3166/FR-E"),
        triple_uri("http://iso.org/iso3166/2/FR-departements", rdf_type(), collection),
        triple_uri(
            "http://iso.org/iso3166/2/FR-departements",
            member(),
            "http://iso.org/iso3166/FR-35",
        ),
        triple_uri(
            "http://iso.org/iso3166/2/FR-departements",
            member(),
            "http://iso.org/iso3166/FR-56",
        ),
    ]
    .into_iter()
    .collect()
}

#[test]
fn c2_grouping_golden() {
    criterion(2, "France grouping export equals the 14-triple golden", || {
        let started = Instant::now();
        let (triples, _) =
            export("france-grouping.tsv", "http://iso.org/iso3166/", &["--what", "grouping"]);
        let elapsed = started.elapsed();
        let types = triples.iter().filter(|t| t.predicate == rdf_type()).count();
        let members = triples.iter().filter(|t| t.predicate == skos("member")).count();
        assert_eq!((types, members), (6, 8));
        assert_eq!(triples, grouping_golden());
        assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    });
}

// ---------------------------------------------------------------------------
// Criterion 3: notation goldens
// ---------------------------------------------------------------------------

fn property_golden(relation: &str) -> BTreeSet<Triple> {
    let base = "http://iso.org/iso3166/";
    let fr = "http://iso.org/iso3166/FR";
    [
        triple_uri(base, rdf_type(), "http://www.w3.org/2004/02/skos/core#ConceptScheme"),
        triple_uri(base, skos(relation), "http://iso.org/iso3166/twoLetterCode"),
        triple_uri(base, skos(relation), "http://iso.org/iso3166/threeLetterCode"),
        triple_uri(base, skos(relation), "http://iso.org/iso3166/numericalCode"),
        triple_uri(fr, rdf_type(), "http://www.w3.org/2004/02/skos/core#Concept"),
        triple_lit(fr, skos("prefLabel"), "France", Some("en")),
        triple_lit(fr, uri("http://iso.org/iso3166/twoLetterCode"), "FR", None),
        triple_lit(fr, uri("http://iso.org/iso3166/threeLetterCode"), "FRA", None),
        triple_lit(fr, uri("http://iso.org/iso3166/numericalCode"), "250", None),
    ]
    .into_iter()
    .collect()
}

fn langtag_golden() -> BTreeSet<Triple> {
    let base = "http://iso.org/iso3166/";
    let fr = "http://iso.org/iso3166/FR";
    [
        triple_uri(base, rdf_type(), "http://www.w3.org/2004/02/skos/core#ConceptScheme"),
        triple_uri(fr, rdf_type(), "http://www.w3.org/2004/02/skos/core#Concept"),
        triple_lit(fr, skos("prefLabel"), "France", Some("en")),
        triple_lit(fr, skos("prefLabel"), "FR", Some("x-notation-twoletter")),
        triple_lit(fr, skos("prefLabel"), "FRA", Some("x-notation-threeletter")),
        triple_lit(fr, skos("prefLabel"), "250", Some("x-notation-numerical")),
    ]
    .into_iter()
    .collect()
}

#[test]
fn c3_notation_goldens() {
    criterion(3, "notation goldens hold in both styles and spellings", || {
        let base = "http://iso.org/iso3166/";
        let (corrected, _) = export("france-concepts.tsv", base, &["--what", "snapshots"]);
        assert_eq!(corrected, property_golden("notationProperty"));
        let (paper, _) = export(
            "france-concepts.tsv",
            base,
            &["--what", "snapshots", "--spelling", "paper"],
        );
        assert_eq!(paper, property_golden("notationPropery"));
        let (langtag, _) = export(
            "france-concepts.tsv",
            base,
            &["--what", "snapshots", "--notation-style", "langtag"],
        );
        assert_eq!(langtag, langtag_golden());
        // Every notation tag in the langtag export is a well-formed
        // private-use tag naming its kind.
        let kinds: BTreeSet<&str> = langtag
            .iter()
            .filter_map(|t| match &t.object {
                Term::Literal { lang: Some(lang), .. } => lang.notation_kind(),
                _ => None,
            })
            .collect();
        let expected: BTreeSet<&str> = ["twoletter", "threeletter", "numerical"].into();
        assert_eq!(kinds, expected);
    });
}

// ---------------------------------------------------------------------------
// Criterion 4: resolution agrees with a closure over the emitted triples
// ---------------------------------------------------------------------------

/// Mapping triples regrouped as code pairs per adjacent version pair:
/// `layers[k]` holds `(code in version k, code in version k+1)`.
fn mapping_layers(triples: &BTreeSet<Triple>, namespaces: &[String]) -> Vec<Vec<(String, String)>> {
    let locate = |text: &str| -> Option<(usize, String)> {
        for (index, namespace) in namespaces.iter().enumerate() {
            if let Some(rest) = text.strip_prefix(namespace.as_str()) {
                if !rest.is_empty() && !rest.contains('/') {
                    return Some((index, rest.to_string()));
                }
            }
        }
        None
    };
    let mut layers = vec![Vec::new(); namespaces.len().saturating_sub(1)];
    for triple in triples {
        let Term::Uri(object) = &triple.object else { continue };
        let Some((from, from_code)) = locate(triple.subject.as_str()) else { continue };
        let Some((to, to_code)) = locate(object.as_str()) else { continue };
        assert_eq!(to, from + 1, "mapping triples connect adjacent versions only");
        layers[from].push((from_code, to_code));
    }
    layers
}

/// Breadth-first closure over the layers, forward (`from <= to`) or
/// backward (`to <= from`); returns plain codes in the target version.
fn closure(
    layers: &[Vec<(String, String)>],
    from: usize,
    to: usize,
    start: &str,
    backward: bool,
) -> BTreeSet<String> {
    let mut frontier = BTreeSet::from([start.to_string()]);
    if !backward {
        for layer in &layers[from..to] {
            frontier = layer
                .iter()
                .filter(|(a, _)| frontier.contains(a))
                .map(|(_, b)| b.clone())
                .collect();
            if frontier.is_empty() {
                break;
            }
        }
    } else {
        for layer in layers[to..from].iter().rev() {
            frontier = layer
                .iter()
                .filter(|(_, b)| frontier.contains(b))
                .map(|(a, _)| a.clone())
                .collect();
            if frontier.is_empty() {
                break;
            }
        }
    }
    frontier
}

/// Checks every (code, version pair) resolution of `graph`, both
/// directions, against the closure oracle.
fn assert_resolution_matches_oracle(graph: &VersionGraph, context: &str) {
    let triples = encode_mappings(graph);
    let namespaces: Vec<String> = graph
        .versions
        .iter()
        .map(|v| v.namespace.as_str().to_string())
        .collect();
    let layers = mapping_layers(&triples, &namespaces);
    for (from, from_info) in graph.versions.iter().enumerate() {
        let codes: Vec<Code> = graph.snapshots[&from_info.id].concepts.keys().cloned().collect();
        for (to, to_info) in graph.versions.iter().enumerate() {
            for c in &codes {
                let (outcome, want) = if to >= from {
                    (
                        graph.resolve_forward(c, &from_info.id, &to_info.id),
                        closure(&layers, from, to, c.as_str(), false),
                    )
                } else {
                    (
                        graph.resolve_backward(c, &from_info.id, &to_info.id),
                        closure(&layers, from, to, c.as_str(), true),
                    )
                };
                let got: BTreeSet<String> = outcome
                    .unwrap_or_else(|e| panic!("{context}: {e}"))
                    .iter()
                    .map(|u| u.full().as_str().to_string())
                    .collect();
                let want: BTreeSet<String> = want
                    .into_iter()
                    .map(|code| format!("{}{code}", namespaces[to]))
                    .collect();
                assert_eq!(
                    got, want,
                    "{context}: `{c}` from `{}` to `{}`",
                    from_info.id, to_info.id
                );
            }
        }
    }
}

// --- random ledgers --------------------------------------------------------

const CODE_CAP: usize = 20;

/// A random but well-formed ledger: up to 8 versions, up to 20 codes, with
/// events drawn from all six change kinds under their arity rules.
fn random_ledger(rng: &mut ChaCha8Rng) -> Ledger {
    let scheme = code("lista");
    let mut minted = 0usize;
    let fresh = |minted: &mut usize| -> Code {
        let next = code(&format!("c{:02}", *minted));
        *minted += 1;
        next
    };
    let mut alive: BTreeSet<Code> = BTreeSet::new();
    let mut snapshot = Snapshot::new("first")
        .add_container(Container::new(&scheme, ContainerKind::Scheme))
        .unwrap();
    for _ in 0..rng.gen_range(1..=6) {
        let c = fresh(&mut minted);
        snapshot = snapshot
            .add_concept(Concept::new(&c).with_pref_label(en_label(format!("Concept {c}"))))
            .unwrap();
        alive.insert(c);
    }
    let snapshot = snapshot.seal(Some(&scheme));
    let mut ledger = Ledger::new(scheme, snapshot)
        .with_initial_date(NaiveDate::from_ymd_opt(2000, 1, 1).unwrap());
    let mut date = NaiveDate::from_ymd_opt(2000, 1, 1).unwrap();
    for n in 1..=rng.gen_range(0..=7) {
        date = date + chrono::Days::new(rng.gen_range(1..=365));
        let mut newsletter = Newsletter::new(format!("I-{n}"), date);
        let mut touched: BTreeSet<Code> = BTreeSet::new();
        for _ in 0..rng.gen_range(1..=3) {
            let free: Vec<Code> = alive.iter().filter(|c| !touched.contains(*c)).cloned().collect();
            let mut kinds: Vec<&str> = Vec::new();
            if minted < CODE_CAP {
                kinds.push("create");
            }
            if !free.is_empty() {
                kinds.extend(["dissolve", "rename"]);
                if minted < CODE_CAP {
                    kinds.push("recode");
                }
                if minted + 2 <= CODE_CAP {
                    kinds.push("split");
                }
                if free.len() >= 2 {
                    kinds.push("merge");
                }
            }
            let Some(kind) = kinds.choose(rng) else { break };
            let event = match *kind {
                "create" => {
                    let c = fresh(&mut minted);
                    ChangeEvent::creation(vec![c.clone()], [en_label(format!("Concept {c}"))])
                        .unwrap()
                }
                "dissolve" => ChangeEvent::dissolution(free.choose(rng).unwrap().clone()),
                "rename" => {
                    let c = free.choose(rng).unwrap().clone();
                    ChangeEvent::rename(c.clone(), [en_label(format!("Renamed {c}"))]).unwrap()
                }
                "recode" => {
                    let old = free.choose(rng).unwrap().clone();
                    ChangeEvent::recode(old, fresh(&mut minted)).unwrap()
                }
                "split" => {
                    let old = free.choose(rng).unwrap().clone();
                    let mut parts = Vec::new();
                    if rng.gen_bool(0.3) {
                        parts.push(old.clone());
                    }
                    let wanted = rng.gen_range(2..=3) - parts.len();
                    let allowed = (CODE_CAP - minted).min(wanted).max(2 - parts.len());
                    for _ in 0..allowed {
                        parts.push(fresh(&mut minted));
                    }
                    ChangeEvent::split(old, parts).unwrap()
                }
                "merge" => {
                    let mut pool = free.clone();
                    pool.shuffle(rng);
                    let subjects: Vec<Code> =
                        pool.into_iter().take(rng.gen_range(2..=3.min(free.len()))).collect();
                    let object = if minted < CODE_CAP && rng.gen_bool(0.7) {
                        fresh(&mut minted)
                    } else {
                        subjects.choose(rng).unwrap().clone()
                    };
                    ChangeEvent::merge(subjects, object).unwrap()
                }
                _ => unreachable!(),
            };
            for subject in &event.subjects {
                if !event.objects.contains(subject) {
                    alive.remove(subject);
                }
            }
            alive.extend(event.objects.iter().cloned());
            touched.extend(event.touched().into_iter().cloned());
            newsletter = newsletter.with_event(event).expect("generated events respect the rules");
        }
        ledger = ledger.push_newsletter(newsletter).expect("generated dates increase");
    }
    ledger
}

#[test]
fn c4_resolution_matches_the_closure_oracle() {
    criterion(4, "resolution agrees with the mapping-triple closure oracle", || {
        assert_resolution_matches_oracle(
            &fixture_graph("canada.tsv", CANADA_BASE),
            "canada",
        );
        assert_resolution_matches_oracle(
            &fixture_graph("czechoslovakia.tsv", "http://iso.org/iso3166/1/"),
            "czechoslovakia",
        );
        let base = uri("http://example.org/random/");
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ledger = random_ledger(&mut rng);
            let graph = build_version_graph(&ledger, &base)
                .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            assert_resolution_matches_oracle(&graph, &format!("seed {seed}"));
        }
    });
}

// ---------------------------------------------------------------------------
// Criterion 5: specific resolutions
// ---------------------------------------------------------------------------

#[test]
fn c5_specific_resolutions() {
    criterion(5, "the named Canada resolutions hold exactly", || {
        let graph = fixture_graph("canada.tsv", CANADA_BASE);
        let full = |result: BTreeSet<skoslist::version::VersionedUri>| -> BTreeSet<String> {
            result.iter().map(|u| u.full().as_str().to_string()).collect()
        };
        let got = full(graph.resolve_forward(&code("CA-NF"), "first", "newsletter-4").unwrap());
        let want: BTreeSet<String> =
            [format!("{CANADA_BASE}newsletter-4/CA-NL")].into_iter().collect();
        assert_eq!(got, want);
        let got = full(graph.resolve_forward(&code("CA-NT"), "first", "current").unwrap());
        let want: BTreeSet<String> = [
            format!("{CANADA_BASE}newsletter-4/CA-NT"),
            format!("{CANADA_BASE}newsletter-4/CA-NU"),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, want);
        let got = full(graph.resolve_backward(&code("CA-NU"), "newsletter-4", "first").unwrap());
        let want: BTreeSet<String> = [format!("{CANADA_BASE}first/CA-NT")].into_iter().collect();
        assert_eq!(got, want);
    });
}

// ---------------------------------------------------------------------------
// Criterion 6: date lookups
// ---------------------------------------------------------------------------

#[test]
fn c6_date_lookups() {
    criterion(6, "date lookups pick the effective version, or nothing", || {
        let graph = fixture_graph("canada.tsv", CANADA_BASE);
        let date = |text: &str| NaiveDate::parse_from_str(text, "%Y-%m-%d").unwrap();

        let hit = graph.valid_at(&code("CA-NF"), date("2002-06-01")).expect("CA-NF exists then");
        assert_eq!(hit.full().as_str(), format!("{CANADA_BASE}newsletter-2/CA-NF"));
        let labels: Vec<&str> = graph.snapshot("newsletter-2").unwrap().concepts[&code("CA-NF")]
            .pref_labels
            .iter()
            .map(|l| l.text.as_str())
            .collect();
        assert_eq!(labels, ["Newfoundland and Labrador"]);

        assert_eq!(graph.valid_at(&code("CA-NF"), date("2003-01-01")), None);

        let hit = graph.valid_at(&code("CA-NL"), date("2003-01-01")).expect("CA-NL exists then");
        assert_eq!(hit.full().as_str(), format!("{CANADA_BASE}newsletter-4/CA-NL"));
    });
}

// ---------------------------------------------------------------------------
// Criterion 7: round-trip property
// ---------------------------------------------------------------------------

const RANDOM_NAMESPACES: [&str; 4] = [
    "http://a.example/ns/",
    "http://b.example/voc#",
    "urn:tag:codes:",
    "http://c.example/deep/path/",
];
const RANDOM_LOCALS: [&str; 8] =
    ["", "a", "FR", "code-1", "x_y", "code~x", "a/b", "Ünïcode"];
const RANDOM_TEXTS: [&str; 7] = [
    "plain",
    "",
    "with \"quotes\"",
    "line\nbreak",
    "tab\there",
    "back\\slash",
    "café 北京, y; más",
];
const RANDOM_TAGS: [&str; 6] =
    ["en", "fr", "en-us", "zxx", "x-notation-twoletter", "de-ch-1996"];

fn random_uri(rng: &mut ChaCha8Rng) -> Uri {
    let namespace = RANDOM_NAMESPACES.choose(rng).unwrap();
    let local = RANDOM_LOCALS.choose(rng).unwrap();
    uri(&format!("{namespace}{local}"))
}

fn random_document(rng: &mut ChaCha8Rng) -> (BTreeSet<Triple>, PrefixMap) {
    let mut prefixes = PrefixMap::new();
    for (index, namespace) in RANDOM_NAMESPACES.iter().enumerate() {
        if rng.gen_bool(0.7) {
            prefixes.add(format!("p{index}"), uri(namespace)).unwrap();
        }
    }
    let mut triples = BTreeSet::new();
    for _ in 0..rng.gen_range(0..=25) {
        let subject = random_uri(rng);
        let predicate = if rng.gen_bool(0.2) { rdf_type() } else { random_uri(rng) };
        let object = if rng.gen_bool(0.5) {
            Term::Uri(random_uri(rng))
        } else {
            let text = *RANDOM_TEXTS.choose(rng).unwrap();
            if rng.gen_bool(0.5) {
                Term::literal(text)
            } else {
                let tag = RANDOM_TAGS.choose(rng).unwrap().parse::<LanguageTag>().unwrap();
                Term::tagged(text, tag)
            }
        };
        triples.insert(Triple::new(subject, predicate, object));
    }
    (triples, prefixes)
}

/// The whole export document of a random ledger, as `export --what all`
/// assembles it.
fn random_export_document(rng: &mut ChaCha8Rng) -> (BTreeSet<Triple>, PrefixMap) {
    let ledger = random_ledger(rng);
    let base = uri("http://example.org/random/");
    let graph = build_version_graph(&ledger, &base).unwrap();
    let mut prefixes = PrefixMap::new();
    prefixes.add("skos", uri("http://www.w3.org/2004/02/skos/core#")).unwrap();
    prefixes.add("owl", uri("http://www.w3.org/2002/07/owl#")).unwrap();
    prefixes.add("lista", base.clone()).unwrap();
    for (k, info) in graph.versions.iter().enumerate() {
        prefixes.add(format!("lista-v{k}"), info.namespace.clone()).unwrap();
    }
    let mut triples = BTreeSet::new();
    for info in &graph.versions {
        let snapshot = &graph.snapshots[&info.id];
        let strategy = UriStrategy::profile(snapshot, &code("lista"), &info.namespace);
        triples.extend(
            encode_snapshot(snapshot, &strategy, NotationStyle::Property, Spelling::Corrected)
                .unwrap(),
        );
    }
    let last = &graph.versions.last().unwrap().id;
    let strategy = UriStrategy::profile(&graph.snapshots[last], &code("lista"), &base);
    triples.extend(encode_grouping(&graph.snapshots[last], &strategy));
    triples.extend(encode_mappings(&graph));
    (triples, prefixes)
}

#[test]
fn c7_round_trip_property() {
    criterion(7, "500+ random documents round-trip through writer and parser", || {
        let mut checked = 0usize;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let (triples, prefixes) = random_document(&mut rng);
            let text = emit_turtle(&triples, &prefixes);
            let (parsed_triples, parsed_prefixes) =
                parse_turtle_subset(&text).unwrap_or_else(|e| panic!("{e}\n---\n{text}"));
            assert_eq!(parsed_triples, triples, "\n---\n{text}");
            assert_eq!(parsed_prefixes, prefixes, "\n---\n{text}");
            checked += 1;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let (triples, prefixes) = random_export_document(&mut rng);
            let text = emit_turtle(&triples, &prefixes);
            let (parsed_triples, parsed_prefixes) =
                parse_turtle_subset(&text).unwrap_or_else(|e| panic!("{e}\n---\n{text}"));
            assert_eq!(parsed_triples, triples, "\n---\n{text}");
            assert_eq!(parsed_prefixes, prefixes, "\n---\n{text}");
            checked += 1;
        }
        assert!(checked >= 500);
    });
}

// ---------------------------------------------------------------------------
// Criterion 8: validator catch suite
// ---------------------------------------------------------------------------

fn validate_kinds(name: &str) -> Vec<(String, String)> {
    let path = fixture(name);
    let output = skoslist(&["validate", path.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 1, "{name} must fail validation");
    stdout(&output)
        .lines()
        .map(|line| {
            let fields: Vec<&str> = line.split('\t').collect();
            assert_eq!(fields.len(), 3, "violation lines are version<TAB>kind<TAB>code");
            (fields[1].to_string(), fields[2].to_string())
        })
        .collect()
}

#[test]
fn c8_validator_catch_suite() {
    criterion(8, "each violation class is caught with the expected kind", || {
        assert_eq!(
            validate_kinds("bad-duplicate-preflabel.tsv"),
            [("DuplicatePrefLabel".to_string(), "FR".to_string())]
        );
        assert_eq!(
            validate_kinds("bad-self-hierarchy.tsv"),
            [("SelfHierarchy".to_string(), "FR-E".to_string())]
        );
        assert_eq!(
            validate_kinds("bad-membership-cycle.tsv"),
            [
                ("MembershipCycle".to_string(), "region-a".to_string()),
                ("MembershipCycle".to_string(), "region-b".to_string()),
            ]
        );
        assert_eq!(
            validate_kinds("bad-duplicate-code.tsv"),
            [("DuplicateCode".to_string(), "FR".to_string())]
        );

        // A broken inverse cannot come out of the ledger builders, which
        // maintain the invariant; seed it directly into snapshot state.
        let mut snapshot = Snapshot::new("first");
        let (a, b) = (code("aa"), code("bb"));
        let mut parent = Concept::new(&a);
        parent.narrower.insert(b.clone());
        snapshot.concepts.insert(a.clone(), parent);
        snapshot.concepts.insert(b.clone(), Concept::new(&b));
        let kinds: Vec<&str> = snapshot.validate().iter().map(|v| v.kind()).collect();
        assert_eq!(kinds, ["BrokenInverse"]);

        // The zxx style cannot carry several notations per concept.
        let path = fixture("france-concepts.tsv");
        let output = skoslist(&[
            "export",
            path.to_str().unwrap(),
            "--what",
            "snapshots",
            "--notation-style",
            "zxx",
        ]);
        assert_eq!(exit_code(&output), 1);
        assert!(stderr(&output).contains("zxx cannot represent"), "{}", stderr(&output));
    });
}

// ---------------------------------------------------------------------------
// Criterion 9: determinism
// ---------------------------------------------------------------------------

#[test]
fn c9_exports_are_deterministic() {
    criterion(9, "export --what all is byte-identical across runs, per fixture", || {
        let dir = fixture("");
        let mut names: Vec<String> = std::fs::read_dir(&dir)
            .unwrap()
            .map(|entry| entry.unwrap().file_name().to_string_lossy().into_owned())
            .filter(|name| name.ends_with(".tsv"))
            .collect();
        names.sort();
        assert!(!names.is_empty());
        for name in names {
            let path = fixture(&name);
            let args = ["export", path.to_str().unwrap(), "--what", "all"];
            let first = skoslist(&args);
            let second = skoslist(&args);
            assert_eq!(first.stdout, second.stdout, "{name}: stdout differs between runs");
            assert_eq!(first.stderr, second.stderr, "{name}: stderr differs between runs");
            assert_eq!(
                exit_code(&first),
                exit_code(&second),
                "{name}: exit codes differ between runs"
            );
            if !name.starts_with("bad-") {
                assert_eq!(exit_code(&first), 0, "{name}: {}", stderr(&first));
                assert!(!first.stdout.is_empty(), "{name}: export wrote nothing");
            }
        }
    });
}

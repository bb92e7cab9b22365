//! Reading ontologies into labeled statements, and reading/writing alignment files.
//!
//! Every node of a parsed ontology carries a human-readable label, since the
//! triple factory keys entities on text rather than IRIs. Labels come from the
//! first `rdfs:label` in file order (English first, then untagged, then any
//! other language); without one, the IRI fragment or last path segment is used.

mod alignment_format;
mod turtle;

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use alignment_format::{
    load_reference, parse_reference, read_alignment, render_alignment, write_alignment,
    AlignmentFormat, RefPair, ReferenceAlignment, TSV_HEADER,
};
pub use turtle::BlankNodePolicy;

use turtle::{RawObject, RDF_TYPE};

pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
pub const OWL_CLASS: &str = "http://www.w3.org/2002/07/owl#Class";
pub use turtle::RDF_TYPE as RDF_TYPE_IRI;

/// Which ontology of the pair a document came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Source,
    Target,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Source => "source",
            Side::Target => "target",
        })
    }
}

/// One parsed triple with a resolved label for each position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub subject_iri: String,
    pub subject_label: String,
    pub predicate_iri: String,
    pub predicate_label: String,
    /// `None` when the object is a literal.
    pub object_iri: Option<String>,
    pub object_label: String,
}

impl Statement {
    pub fn object_is_literal(&self) -> bool {
        self.object_iri.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OntologyDocument {
    statements: Vec<Statement>,
    class_entities: BTreeSet<String>,
    side: Side,
}

impl OntologyDocument {
    pub fn new(side: Side) -> Self {
        OntologyDocument {
            statements: Vec::new(),
            class_entities: BTreeSet::new(),
            side,
        }
    }

    pub fn statements(&self) -> &[Statement] {
        &self.statements
    }

    /// IRIs that appear in a class assertion, as subject or object.
    pub fn class_entities(&self) -> &BTreeSet<String> {
        &self.class_entities
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    pub blank_nodes: BlankNodePolicy,
}

/// Parses an N-Triples or Turtle-subset file.
pub fn parse_ontology(path: impl AsRef<Path>, side: Side) -> Result<OntologyDocument> {
    parse_ontology_with(path, side, ParseOptions::default())
}

pub fn parse_ontology_with(
    path: impl AsRef<Path>,
    side: Side,
    options: ParseOptions,
) -> Result<OntologyDocument> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_ontology_str(&text, side, options)
}

pub fn parse_ontology_str(
    text: &str,
    side: Side,
    options: ParseOptions,
) -> Result<OntologyDocument> {
    let raw = turtle::parse(text, options.blank_nodes)?;

    let labels = collect_labels(&raw);
    let label_of = |iri: &str| -> String {
        labels
            .get(iri)
            .cloned()
            .unwrap_or_else(|| fallback_label(iri))
    };

    let mut class_entities = BTreeSet::new();
    let mut statements = Vec::with_capacity(raw.len());
    for t in raw {
        match (&t.object, t.predicate.as_str()) {
            (RawObject::Iri(o), RDF_TYPE) if o == OWL_CLASS => {
                class_entities.insert(t.subject.clone());
            }
            (RawObject::Iri(o), RDFS_SUBCLASS_OF) => {
                class_entities.insert(t.subject.clone());
                class_entities.insert(o.clone());
            }
            _ => {}
        }
        let (object_iri, object_label) = match t.object {
            RawObject::Iri(iri) => {
                let label = label_of(&iri);
                (Some(iri), label)
            }
            RawObject::Literal { lexical, .. } => (None, literal_label(lexical)),
        };
        statements.push(Statement {
            subject_label: label_of(&t.subject),
            subject_iri: t.subject,
            predicate_label: label_of(&t.predicate),
            predicate_iri: t.predicate,
            object_iri,
            object_label,
        });
    }

    Ok(OntologyDocument {
        statements,
        class_entities,
        side,
    })
}

#[derive(PartialEq, Eq, PartialOrd, Ord, Clone, Copy)]
enum LabelRank {
    English,
    Untagged,
    Other,
}

fn collect_labels(raw: &[turtle::RawTriple]) -> HashMap<String, String> {
    let mut best: HashMap<&str, (LabelRank, &str)> = HashMap::new();
    for t in raw.iter().filter(|t| t.predicate == RDFS_LABEL) {
        let RawObject::Literal { lexical, lang } = &t.object else {
            continue;
        };
        if lexical.trim().is_empty() {
            continue;
        }
        let rank = match lang.as_deref() {
            Some(l) if l == "en" || l.starts_with("en-") => LabelRank::English,
            None => LabelRank::Untagged,
            Some(_) => LabelRank::Other,
        };
        best.entry(t.subject.as_str())
            .and_modify(|cur| {
                // Strictly better rank only, so the first label of a rank wins.
                if rank < cur.0 {
                    *cur = (rank, lexical);
                }
            })
            .or_insert((rank, lexical));
    }
    best.into_iter()
        .map(|(iri, (_, label))| (iri.to_string(), label.to_string()))
        .collect()
}

/// Label for an IRI without `rdfs:label`: the fragment, else the last path segment.
pub fn fallback_label(iri: &str) -> String {
    if let Some((_, frag)) = iri.rsplit_once('#') {
        if !frag.trim().is_empty() {
            return frag.to_string();
        }
    }
    let stem = iri.split('#').next().unwrap_or(iri);
    let segment = stem
        .rsplit(['/', ':'])
        .find(|s| !s.trim().is_empty())
        .unwrap_or(stem);
    if segment.trim().is_empty() {
        iri.to_string()
    } else {
        segment.to_string()
    }
}

fn literal_label(lexical: String) -> String {
    if lexical.trim().is_empty() {
        "\"\"".to_string()
    } else {
        lexical
    }
}

/// Lowercases, trims and collapses internal whitespace runs to one space.
pub fn normalize_label(label: &str) -> String {
    label
        .split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    const X: &str = "http://x.org/onto#";

    fn parse(text: &str) -> Result<OntologyDocument> {
        parse_ontology_str(text, Side::Source, ParseOptions::default())
    }

    #[test]
    fn empty_input_has_no_statements() {
        let doc = parse("").unwrap();
        assert!(doc.is_empty());
        assert!(doc.class_entities().is_empty());
        let doc = parse("# only a comment\n\n").unwrap();
        assert!(doc.is_empty());
    }

    #[test]
    fn label_and_class_membership() {
        let text = format!(
            "<{X}A> <{RDFS_LABEL}> \"Alpha\" .\n\
             <{X}A> <{RDF_TYPE}> <{OWL_CLASS}> .\n\
             <{X}A> <{X}partOf> <{X}B> .\n"
        );
        let doc = parse(&text).unwrap();
        assert_eq!(doc.statements().len(), 3);
        assert!(doc.statements().iter().all(|s| s.subject_label == "Alpha"));
        assert_eq!(
            doc.class_entities().iter().collect::<Vec<_>>(),
            vec![&format!("{X}A")]
        );
        // the literal object of the label statement is text with the same form
        assert_eq!(doc.statements()[0].object_label, "Alpha");
        assert!(doc.statements()[0].object_is_literal());
        assert_eq!(doc.statements()[1].predicate_label, "type");
        assert_eq!(doc.statements()[1].object_label, "Class");
    }

    #[test]
    fn fragment_fallback() {
        let text = "<http://x.org/onto#LeftKidney> <http://x.org/onto#partOf> <http://x.org/body/Torso> .";
        let doc = parse(text).unwrap();
        let s = &doc.statements()[0];
        assert_eq!(s.subject_label, "LeftKidney");
        assert_eq!(s.predicate_label, "partOf");
        assert_eq!(s.object_label, "Torso");
    }

    #[test]
    fn fallback_edge_cases() {
        assert_eq!(fallback_label("http://x.org/a/b/"), "b");
        assert_eq!(fallback_label("http://x.org/a#"), "a");
        assert_eq!(fallback_label("urn:isbn:123"), "123");
    }

    #[test]
    fn english_label_preferred_then_untagged() {
        let text = format!(
            "<{X}A> <{RDFS_LABEL}> \"Alpha-de\"@de .\n\
             <{X}A> <{RDFS_LABEL}> \"Alpha plain\" .\n\
             <{X}A> <{RDFS_LABEL}> \"Alpha en\"@en .\n\
             <{X}A> <{RDFS_LABEL}> \"Alpha en 2\"@en .\n\
             <{X}B> <{RDFS_LABEL}> \"Beta-fr\"@fr .\n\
             <{X}B> <{RDFS_LABEL}> \"Beta plain\" .\n\
             <{X}C> <{RDFS_LABEL}> \"Gamma-fr\"@fr .\n"
        );
        let doc = parse(&text).unwrap();
        let label = |iri: &str| {
            doc.statements()
                .iter()
                .find(|s| s.subject_iri == iri)
                .unwrap()
                .subject_label
                .clone()
        };
        assert_eq!(label(&format!("{X}A")), "Alpha en");
        assert_eq!(label(&format!("{X}B")), "Beta plain");
        assert_eq!(label(&format!("{X}C")), "Gamma-fr");
    }

    #[test]
    fn turtle_subset() {
        let text = r#"
            @prefix : <http://x.org/onto#> .
            @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
            PREFIX owl: <http://www.w3.org/2002/07/owl#>
            :Heart a owl:Class ;
                rdfs:label "Heart"@en, "Herz"@de ;
                rdfs:subClassOf :Organ .
            :Organ rdfs:comment """multi
line""" ; :weight 12.5 ; :flag true .
        "#;
        let doc = parse(text).unwrap();
        assert_eq!(doc.statements().len(), 7);
        let classes: Vec<_> = doc.class_entities().iter().cloned().collect();
        assert_eq!(classes, vec![format!("{X}Heart"), format!("{X}Organ")]);
        let weight = doc
            .statements()
            .iter()
            .find(|s| s.predicate_label == "weight")
            .unwrap();
        assert_eq!(weight.object_label, "12.5");
        assert_eq!(doc.statements()[4].object_label, "multi\nline");
    }

    #[test]
    fn base_resolution() {
        let text = "@base <http://x.org/onto> .\n<#A> <#p> <#B> .";
        let doc = parse(text).unwrap();
        assert_eq!(doc.statements()[0].subject_iri, format!("{X}A"));
    }

    #[test]
    fn syntax_error_reports_line() {
        let text = format!("<{X}A> <{X}p> <{X}B> .\n<{X}A> <{X}p> .\n");
        match parse(&text) {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse("<http://x.org/a> <http://x.org/p> <http://x.org/b>") {
            Err(Error::Syntax { .. }) => {}
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse("<relative> <http://x.org/p> <http://x.org/b> .") {
            Err(Error::Syntax { line: 1, .. }) => {}
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn blank_nodes_are_unsupported_or_skipped() {
        let text = format!("<{X}A> <{X}p> <{X}B> .\n_:b0 <{X}p> <{X}B> .\n");
        match parse(&text) {
            Err(Error::Unsupported { line, construct }) => {
                assert_eq!(line, 2);
                assert!(construct.contains("blank node"));
            }
            other => panic!("expected unsupported, got {other:?}"),
        }
        let doc = parse_ontology_str(
            &text,
            Side::Target,
            ParseOptions {
                blank_nodes: BlankNodePolicy::Skip,
            },
        )
        .unwrap();
        assert_eq!(doc.statements().len(), 1);
        assert_eq!(doc.side(), Side::Target);
        assert!(matches!(
            parse("<http://x.org/a> <http://x.org/p> ( 1 2 ) ."),
            Err(Error::Unsupported { .. })
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            parse_ontology("/definitely/not/here.nt", Side::Source),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_label("  Left \t Kidney\n"), "left kidney");
        assert_eq!(normalize_label("LeftKidney"), "leftkidney");
    }

    #[test]
    fn escapes_in_literals() {
        let text = format!("<{X}A> <{RDFS_LABEL}> \"Say \\\"hi\\\" \\u00e9\" .");
        let doc = parse(&text).unwrap();
        assert_eq!(doc.statements()[0].object_label, "Say \"hi\" é");
    }
}

//! Alignment files: a tab-separated format and a minimal OAEI Alignment-format
//! XML subset (`entity1`, `entity2`, `relation`, `measure` per `Cell`).

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use quick_xml::escape::escape;
use quick_xml::events::Event;
use quick_xml::Reader;

use crate::aligner::{Alignment, Mapping};
use crate::error::{Error, Result};

pub const TSV_HEADER: &str = "source_iri\ttarget_iri\trelation\tconfidence";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignmentFormat {
    Tsv,
    Xml,
}

impl AlignmentFormat {
    /// `.rdf`/`.xml` select XML, anything else TSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("xml") || ext.eq_ignore_ascii_case("rdf") => {
                AlignmentFormat::Xml
            }
            _ => AlignmentFormat::Tsv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RefPair {
    pub source: String,
    pub target: String,
    pub relation: String,
}

/// Gold-standard correspondences, deduplicated on (source, target).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReferenceAlignment {
    pairs: Vec<RefPair>,
    index: HashSet<(String, String)>,
}

impl ReferenceAlignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a pair; returns false when (source, target) was already present.
    pub fn insert(&mut self, pair: RefPair) -> bool {
        if !self
            .index
            .insert((pair.source.clone(), pair.target.clone()))
        {
            return false;
        }
        self.pairs.push(pair);
        true
    }

    pub fn pairs(&self) -> &[RefPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, source: &str, target: &str) -> bool {
        self.index
            .contains(&(source.to_string(), target.to_string()))
    }

    pub fn pair_set(&self) -> HashSet<(String, String)> {
        self.index.clone()
    }
}

impl FromIterator<RefPair> for ReferenceAlignment {
    fn from_iter<I: IntoIterator<Item = RefPair>>(iter: I) -> Self {
        let mut r = ReferenceAlignment::new();
        for p in iter {
            r.insert(p);
        }
        r
    }
}

/// Loads a reference alignment; XML is detected by a leading `<`.
pub fn load_reference(path: impl AsRef<Path>) -> Result<ReferenceAlignment> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_reference(&text)
}

pub fn parse_reference(text: &str) -> Result<ReferenceAlignment> {
    let cells = parse_cells(text)?;
    Ok(cells
        .into_iter()
        .map(|c| RefPair {
            source: c.source,
            target: c.target,
            relation: c.relation,
        })
        .collect())
}

/// Reads an alignment file back into mappings, keeping confidences.
pub fn read_alignment(path: impl AsRef<Path>) -> Result<Vec<Mapping>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_cells(&text)?
        .into_iter()
        .map(|c| Mapping {
            source_iri: c.source,
            target_iri: c.target,
            relation: c.relation,
            confidence: c.confidence.unwrap_or(1.0),
        })
        .collect())
}

pub fn write_alignment(
    alignment: &Alignment,
    path: impl AsRef<Path>,
    format: AlignmentFormat,
) -> Result<()> {
    let path = path.as_ref();
    let text = render_alignment(&alignment.mappings, format);
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn render_alignment(mappings: &[Mapping], format: AlignmentFormat) -> String {
    match format {
        AlignmentFormat::Tsv => render_tsv(mappings),
        AlignmentFormat::Xml => render_xml(mappings),
    }
}

fn render_tsv(mappings: &[Mapping]) -> String {
    let mut out = String::with_capacity(64 * (mappings.len() + 1));
    out.push_str(TSV_HEADER);
    out.push('\n');
    for m in mappings {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            m.source_iri, m.target_iri, m.relation, m.confidence
        );
    }
    out
}

fn render_xml(mappings: &[Mapping]) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n");
    out.push_str(
        "<rdf:RDF xmlns=\"http://knowledgeweb.semanticweb.org/heterogeneity/alignment#\"\n         \
         xmlns:rdf=\"http://www.w3.org/1999/02/22-rdf-syntax-ns#\">\n",
    );
    out.push_str("<Alignment>\n  <xml>yes</xml>\n  <level>0</level>\n  <type>11</type>\n");
    for m in mappings {
        let _ = write!(
            out,
            "  <map>\n    <Cell>\n      <entity1 rdf:resource=\"{}\"/>\n      \
             <entity2 rdf:resource=\"{}\"/>\n      <relation>{}</relation>\n      \
             <measure rdf:datatype=\"http://www.w3.org/2001/XMLSchema#double\">{}</measure>\n    \
             </Cell>\n  </map>\n",
            escape(m.source_iri.as_str()),
            escape(m.target_iri.as_str()),
            escape(m.relation.as_str()),
            m.confidence
        );
    }
    out.push_str("</Alignment>\n</rdf:RDF>\n");
    out
}

struct Cell {
    source: String,
    target: String,
    relation: String,
    confidence: Option<f64>,
}

fn parse_cells(text: &str) -> Result<Vec<Cell>> {
    if text.trim_start().starts_with('<') {
        parse_xml(text)
    } else {
        parse_tsv(text)
    }
}

fn parse_tsv(text: &str) -> Result<Vec<Cell>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let row = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if row == 1 && fields[0] == "source_iri" {
            continue;
        }
        if fields.len() < 2 || fields.len() > 4 {
            return Err(Error::MalformedRow {
                row,
                message: format!("expected 2 to 4 tab-separated fields, found {}", fields.len()),
            });
        }
        if fields[0].is_empty() || fields[1].is_empty() {
            return Err(Error::MalformedRow {
                row,
                message: "empty IRI".to_string(),
            });
        }
        let relation = match fields.get(2) {
            Some(r) if !r.is_empty() => r.to_string(),
            _ => "=".to_string(),
        };
        let confidence = match fields.get(3) {
            Some(c) if !c.is_empty() => Some(c.parse::<f64>().map_err(|_| Error::MalformedRow {
                row,
                message: format!("confidence '{c}' is not a number"),
            })?),
            _ => None,
        };
        out.push(Cell {
            source: fields[0].to_string(),
            target: fields[1].to_string(),
            relation,
            confidence,
        });
    }
    Ok(out)
}

#[derive(Clone, Copy)]
enum TextField {
    Relation,
    Measure,
}

fn parse_xml(text: &str) -> Result<Vec<Cell>> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);

    let mut out = Vec::new();
    let mut in_cell = false;
    let mut entity1: Option<String> = None;
    let mut entity2: Option<String> = None;
    let mut relation: Option<String> = None;
    let mut measure: Option<f64> = None;
    let mut field: Option<TextField> = None;

    let xml_err = |e: &dyn std::fmt::Display, pos: u64| {
        Error::MalformedXml(format!("{e} at byte {pos}"))
    };

    loop {
        let event = reader
            .read_event()
            .map_err(|e| xml_err(&e, reader.buffer_position()))?;
        match event {
            Event::Start(e) | Event::Empty(e) => {
                let name = e.local_name();
                match name.as_ref() {
                    b"Cell" => {
                        in_cell = true;
                        entity1 = None;
                        entity2 = None;
                        relation = None;
                        measure = None;
                    }
                    b"entity1" | b"entity2" if in_cell => {
                        let mut resource = None;
                        for attr in e.attributes() {
                            let attr = attr.map_err(|e| xml_err(&e, reader.buffer_position()))?;
                            if attr.key.local_name().as_ref() == b"resource" {
                                let v = attr
                                    .unescape_value()
                                    .map_err(|e| xml_err(&e, reader.buffer_position()))?;
                                resource = Some(v.trim().to_string());
                            }
                        }
                        let resource = resource.ok_or_else(|| {
                            Error::MalformedXml(format!(
                                "cell {} has an entity without rdf:resource",
                                out.len() + 1
                            ))
                        })?;
                        if name.as_ref() == b"entity1" {
                            entity1 = Some(resource);
                        } else {
                            entity2 = Some(resource);
                        }
                    }
                    b"relation" if in_cell => field = Some(TextField::Relation),
                    b"measure" if in_cell => field = Some(TextField::Measure),
                    _ => {}
                }
            }
            Event::Text(t) => {
                if let Some(f) = field {
                    let value = t
                        .unescape()
                        .map_err(|e| xml_err(&e, reader.buffer_position()))?
                        .trim()
                        .to_string();
                    match f {
                        TextField::Relation => relation = Some(value),
                        TextField::Measure => {
                            measure = Some(value.parse().map_err(|_| {
                                Error::MalformedXml(format!(
                                    "cell {}: measure '{value}' is not a number",
                                    out.len() + 1
                                ))
                            })?)
                        }
                    }
                }
            }
            Event::End(e) => {
                field = None;
                if e.local_name().as_ref() == b"Cell" {
                    in_cell = false;
                    let (Some(source), Some(target)) = (entity1.take(), entity2.take()) else {
                        return Err(Error::MalformedXml(format!(
                            "cell {} is missing entity1 or entity2",
                            out.len() + 1
                        )));
                    };
                    out.push(Cell {
                        source,
                        target,
                        relation: relation
                            .take()
                            .filter(|r| !r.is_empty())
                            .unwrap_or_else(|| "=".to_string()),
                        confidence: measure.take(),
                    });
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    Ok(out)
}

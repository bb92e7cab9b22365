//! Paired synthetic ontologies with a known reference alignment.
//!
//! The source is a random concept graph: a `subClassOf` spanning tree whose
//! parents are picked by preferential attachment, topped up with extra edges
//! (also preferential) over `num_relations` relation labels until there are
//! about `density · num_concepts` edges. Every concept is typed `owl:Class`.
//! The target repeats the same edges under its own namespace. A random
//! `anchor_fraction` of target concepts keep the source label; the rest are
//! renamed, either with a suffix or with a random string.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ontology_io::{
    RefPair, ReferenceAlignment, OWL_CLASS, RDFS_SUBCLASS_OF, RDF_TYPE_IRI, TSV_HEADER,
};

pub const SOURCE_NS: &str = "http://example.org/source#";
pub const TARGET_NS: &str = "http://example.org/target#";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RenameScheme {
    /// `Concept007` becomes `Concept007Alt`.
    #[default]
    Suffix,
    /// A random lowercase string unrelated to the source label.
    Scramble,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSpec {
    pub num_concepts: usize,
    /// Relation labels, `subClassOf` included.
    pub num_relations: usize,
    /// Target edges per concept.
    pub density: f64,
    pub anchor_fraction: f64,
    pub rename_scheme: RenameScheme,
    pub seed: u64,
}

impl Default for BenchSpec {
    fn default() -> Self {
        BenchSpec {
            num_concepts: 50,
            num_relations: 3,
            density: 3.0,
            anchor_fraction: 0.3,
            rename_scheme: RenameScheme::Suffix,
            seed: 7,
        }
    }
}

impl BenchSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidBench(m));
        if self.num_concepts == 0 {
            return bad("num_concepts must be at least 1".into());
        }
        if self.num_relations == 0 {
            return bad("num_relations must be at least 1".into());
        }
        if !(self.density.is_finite() && self.density > 0.0) {
            return bad(format!("density must be positive, got {}", self.density));
        }
        if !(0.0..=1.0).contains(&self.anchor_fraction) {
            return bad(format!("anchor_fraction must lie in [0, 1], got {}", self.anchor_fraction));
        }
        if self.num_anchors() == 0 {
            return bad("anchor_fraction leaves no anchor concept".into());
        }
        Ok(())
    }

    /// `round(anchor_fraction · num_concepts)`, halves away from zero.
    pub fn num_anchors(&self) -> usize {
        (self.anchor_fraction * self.num_concepts as f64).round() as usize
    }
}

/// Generated pair, held in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Bench {
    pub source_ntriples: String,
    pub target_ntriples: String,
    pub reference: ReferenceAlignment,
    /// Concept indices whose target label equals the source label.
    pub anchors: BTreeSet<usize>,
    pub source_labels: Vec<String>,
    pub target_labels: Vec<String>,
    /// `(head, relation, tail)` over concept and relation indices.
    pub edges: Vec<(usize, usize, usize)>,
}

impl Bench {
    pub fn source_iri(&self, concept: usize) -> String {
        format!("{SOURCE_NS}{}", self.source_labels[concept])
    }

    pub fn target_iri(&self, concept: usize) -> String {
        format!("{TARGET_NS}{}", self.target_labels[concept])
    }

    pub fn reference_tsv(&self) -> String {
        let mut out = format!("{TSV_HEADER}\n");
        for p in self.reference.pairs() {
            let _ = writeln!(out, "{}\t{}\t{}\t1.0", p.source, p.target, p.relation);
        }
        out
    }
}

/// Paths written by [`write_bench`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchFiles {
    pub source: PathBuf,
    pub target: PathBuf,
    pub reference: PathBuf,
}

fn pick_weighted<R: Rng>(weights: &[usize], rng: &mut R) -> usize {
    let total: usize = weights.iter().sum();
    let mut x = rng.random_range(0..total);
    for (i, w) in weights.iter().enumerate() {
        if x < *w {
            return i;
        }
        x -= w;
    }
    unreachable!("weights are positive")
}

fn relation_iri(ns: &str, r: usize) -> String {
    if r == 0 {
        RDFS_SUBCLASS_OF.to_string()
    } else {
        format!("{ns}relatedTo{r}")
    }
}

fn scrambled<R: Rng>(rng: &mut R, taken: &HashSet<String>) -> String {
    loop {
        let s: String = (0..10).map(|_| rng.random_range(b'a'..=b'z') as char).collect();
        if !taken.contains(&s) {
            return s;
        }
    }
}

pub fn generate(spec: &BenchSpec) -> Result<Bench> {
    spec.validate()?;
    let n = spec.num_concepts;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    // Preferential attachment weight = degree + 1.
    let mut weight = vec![1usize; n];
    for child in 1..n {
        let parent = pick_weighted(&weight[..child], &mut rng);
        edges.push((child, 0, parent));
        seen.insert((child, 0, parent));
        weight[child] += 1;
        weight[parent] += 1;
    }
    let wanted = (spec.density * n as f64).round() as usize;
    let mut attempts = 0;
    while edges.len() < wanted && n > 1 && attempts < 20 * wanted {
        attempts += 1;
        let head = rng.random_range(0..n);
        let tail = pick_weighted(&weight, &mut rng);
        let rel = rng.random_range(0..spec.num_relations);
        if head == tail || !seen.insert((head, rel, tail)) {
            continue;
        }
        edges.push((head, rel, tail));
        weight[head] += 1;
        weight[tail] += 1;
    }

    let source_labels: Vec<String> = (0..n).map(|i| format!("Concept{i:04}")).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let anchors: BTreeSet<usize> = order[..spec.num_anchors()].iter().copied().collect();
    let mut taken: HashSet<String> = source_labels.iter().map(|l| l.to_lowercase()).collect();
    let target_labels: Vec<String> = (0..n)
        .map(|i| {
            if anchors.contains(&i) {
                return source_labels[i].clone();
            }
            let label = match spec.rename_scheme {
                RenameScheme::Suffix => format!("{}Alt", source_labels[i]),
                RenameScheme::Scramble => scrambled(&mut rng, &taken),
            };
            taken.insert(label.to_lowercase());
            label
        })
        .collect();

    let render = |ns: &str, labels: &[String]| {
        let mut out = String::new();
        for l in labels {
            let _ = writeln!(out, "<{ns}{l}> <{RDF_TYPE_IRI}> <{OWL_CLASS}> .");
        }
        for &(h, r, t) in &edges {
            let _ = writeln!(out, "<{ns}{}> <{}> <{ns}{}> .", labels[h], relation_iri(ns, r), labels[t]);
        }
        out
    };
    let source_ntriples = render(SOURCE_NS, &source_labels);
    let target_ntriples = render(TARGET_NS, &target_labels);
    let reference = (0..n)
        .map(|i| RefPair {
            source: format!("{SOURCE_NS}{}", source_labels[i]),
            target: format!("{TARGET_NS}{}", target_labels[i]),
            relation: "=".to_string(),
        })
        .collect();
    Ok(Bench {
        source_ntriples,
        target_ntriples,
        reference,
        anchors,
        source_labels,
        target_labels,
        edges,
    })
}

/// Writes `source.nt`, `target.nt` and `reference.tsv` into `dir`.
pub fn write_bench(spec: &BenchSpec, dir: impl AsRef<Path>) -> Result<(Bench, BenchFiles)> {
    let bench = generate(spec)?;
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = BenchFiles {
        source: dir.join("source.nt"),
        target: dir.join("target.nt"),
        reference: dir.join("reference.tsv"),
    };
    for (path, text) in [
        (&files.source, &bench.source_ntriples),
        (&files.target, &bench.target_ntriples),
        (&files.reference, &bench.reference_tsv()),
    ] {
        fs::write(path, text).map_err(|e| Error::io(path, e))?;
    }
    Ok((bench, files))
}

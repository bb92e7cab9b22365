//! The merged triple store both ontologies are embedded from.
//!
//! Entities and relations are keyed on normalized label text, so a label that
//! occurs in both ontologies becomes a single entity with a single embedding.
//! That sharing is what ties the two graphs together during training. The
//! catalog remembers which IRIs on each side produced a given entity, so
//! mappings can be reported as IRI pairs afterwards.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::ontology_io::{normalize_label, OntologyDocument, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdTriple {
    pub head: usize,
    pub relation: usize,
    pub tail: usize,
}

impl IdTriple {
    pub const fn new(head: usize, relation: usize, tail: usize) -> Self {
        IdTriple {
            head,
            relation,
            tail,
        }
    }
}

/// Dense text <-> id maps for entities and relations.
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    entities: Vec<String>,
    entity_ids: HashMap<String, usize>,
    relations: Vec<String>,
    relation_ids: HashMap<String, usize>,
}

impl Vocabulary {
    fn intern(texts: &mut Vec<String>, ids: &mut HashMap<String, usize>, text: &str) -> usize {
        if let Some(&id) = ids.get(text) {
            return id;
        }
        let id = texts.len();
        texts.push(text.to_string());
        ids.insert(text.to_string(), id);
        id
    }

    pub fn intern_entity(&mut self, text: &str) -> usize {
        Self::intern(&mut self.entities, &mut self.entity_ids, text)
    }

    pub fn intern_relation(&mut self, text: &str) -> usize {
        Self::intern(&mut self.relations, &mut self.relation_ids, text)
    }

    pub fn entity_id(&self, text: &str) -> Option<usize> {
        self.entity_ids.get(text).copied()
    }

    pub fn relation_id(&self, text: &str) -> Option<usize> {
        self.relation_ids.get(text).copied()
    }

    pub fn entity_text(&self, id: usize) -> &str {
        &self.entities[id]
    }

    pub fn relation_text(&self, id: usize) -> &str {
        &self.relations[id]
    }

    pub fn num_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }
}

/// Returns true for catalog entries that stand for a literal rather than an IRI.
pub fn is_literal_marker(iri: &str) -> bool {
    iri.starts_with('"')
}

fn literal_marker(lexical: &str) -> String {
    format!("\"{}\"", lexical.replace('\\', "\\\\").replace('"', "\\\""))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CatalogEntry {
    /// Sorted, duplicate-free. Literal nodes are recorded as quoted markers.
    pub source_iris: Vec<String>,
    pub target_iris: Vec<String>,
    pub is_class_source: bool,
    pub is_class_target: bool,
}

impl CatalogEntry {
    pub fn iris(&self, side: Side) -> &[String] {
        match side {
            Side::Source => &self.source_iris,
            Side::Target => &self.target_iris,
        }
    }

    /// First IRI on `side` that is not a literal marker.
    pub fn primary_iri(&self, side: Side) -> Option<&str> {
        self.iris(side)
            .iter()
            .map(String::as_str)
            .find(|i| !is_literal_marker(i))
    }

    pub fn is_class(&self, side: Side) -> bool {
        match side {
            Side::Source => self.is_class_source,
            Side::Target => self.is_class_target,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct EntityCatalog {
    entries: Vec<CatalogEntry>,
}

impl EntityCatalog {
    pub fn entry(&self, id: usize) -> &CatalogEntry {
        &self.entries[id]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &CatalogEntry)> {
        self.entries.iter().enumerate()
    }
}

#[derive(Debug, Clone)]
pub struct TripleFactory {
    triples: Vec<IdTriple>,
    vocabulary: Vocabulary,
    catalog: EntityCatalog,
    source_entity_ids: BTreeSet<usize>,
    target_entity_ids: BTreeSet<usize>,
}

#[derive(Default)]
struct CatalogBuilder {
    source: BTreeSet<String>,
    target: BTreeSet<String>,
    class_source: bool,
    class_target: bool,
}

/// Builds the union triple store over both ontologies.
pub fn build_factory(source: &OntologyDocument, target: &OntologyDocument) -> Result<TripleFactory> {
    if source.is_empty() && target.is_empty() {
        return Err(Error::EmptyFactory);
    }
    let mut vocabulary = Vocabulary::default();
    let mut builders: Vec<CatalogBuilder> = Vec::new();
    let mut seen = HashSet::new();
    let mut triples = Vec::new();
    let mut side_ids = [BTreeSet::new(), BTreeSet::new()];

    for doc in [source, target] {
        let side = doc.side();
        let slot = match side {
            Side::Source => 0,
            Side::Target => 1,
        };
        let mut note = |vocab: &mut Vocabulary, label: &str, iri: String| -> usize {
            let id = vocab.intern_entity(&normalize_label(label));
            if id == builders.len() {
                builders.push(CatalogBuilder::default());
            }
            let is_class = doc.class_entities().contains(&iri);
            let b = &mut builders[id];
            match side {
                Side::Source => {
                    b.class_source |= is_class;
                    b.source.insert(iri);
                }
                Side::Target => {
                    b.class_target |= is_class;
                    b.target.insert(iri);
                }
            }
            side_ids[slot].insert(id);
            id
        };
        for st in doc.statements() {
            let head = note(&mut vocabulary, &st.subject_label, st.subject_iri.clone());
            let relation = vocabulary.intern_relation(&normalize_label(&st.predicate_label));
            let object_iri = match &st.object_iri {
                Some(iri) => iri.clone(),
                None => literal_marker(&st.object_label),
            };
            let tail = note(&mut vocabulary, &st.object_label, object_iri);
            let t = IdTriple::new(head, relation, tail);
            if seen.insert(t) {
                triples.push(t);
            }
        }
    }

    let catalog = EntityCatalog {
        entries: builders
            .into_iter()
            .map(|b| CatalogEntry {
                source_iris: b.source.into_iter().collect(),
                target_iris: b.target.into_iter().collect(),
                is_class_source: b.class_source,
                is_class_target: b.class_target,
            })
            .collect(),
    };
    let [source_entity_ids, target_entity_ids] = side_ids;
    Ok(TripleFactory {
        triples,
        vocabulary,
        catalog,
        source_entity_ids,
        target_entity_ids,
    })
}

impl TripleFactory {
    /// Builds a factory directly from id triples, with synthetic labels
    /// `e<i>`/`r<j>` and source-side IRIs `urn:kgalign:e<i>`.
    ///
    /// Useful for fixtures that have no ontology files behind them.
    pub fn from_id_triples(
        num_entities: usize,
        num_relations: usize,
        triples: &[IdTriple],
    ) -> Result<Self> {
        if triples.is_empty() {
            return Err(Error::EmptyFactory);
        }
        let mut vocabulary = Vocabulary::default();
        for i in 0..num_entities {
            vocabulary.intern_entity(&format!("e{i}"));
        }
        for j in 0..num_relations {
            vocabulary.intern_relation(&format!("r{j}"));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for &t in triples {
            if t.head >= num_entities || t.tail >= num_entities {
                return Err(Error::IdOutOfRange {
                    what: "entity",
                    id: t.head.max(t.tail),
                    size: num_entities,
                });
            }
            if t.relation >= num_relations {
                return Err(Error::IdOutOfRange {
                    what: "relation",
                    id: t.relation,
                    size: num_relations,
                });
            }
            if seen.insert(t) {
                out.push(t);
            }
        }
        let catalog = EntityCatalog {
            entries: (0..num_entities)
                .map(|i| CatalogEntry {
                    source_iris: vec![format!("urn:kgalign:e{i}")],
                    is_class_source: true,
                    ..CatalogEntry::default()
                })
                .collect(),
        };
        Ok(TripleFactory {
            triples: out,
            vocabulary,
            catalog,
            source_entity_ids: (0..num_entities).collect(),
            target_entity_ids: BTreeSet::new(),
        })
    }

    pub fn triples(&self) -> &[IdTriple] {
        &self.triples
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn catalog(&self) -> &EntityCatalog {
        &self.catalog
    }

    pub fn num_entities(&self) -> usize {
        self.vocabulary.num_entities()
    }

    pub fn num_relations(&self) -> usize {
        self.vocabulary.num_relations()
    }

    pub fn entity_ids(&self, side: Side) -> &BTreeSet<usize> {
        match side {
            Side::Source => &self.source_entity_ids,
            Side::Target => &self.target_entity_ids,
        }
    }

    /// Writes `triples.tsv`, `entities.tsv` and `relations.tsv` into `dir`.
    pub fn write_dump(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut triples = String::from("h_id\tr_id\tt_id\n");
        for t in &self.triples {
            let _ = writeln!(triples, "{}\t{}\t{}", t.head, t.relation, t.tail);
        }
        let vocab_tsv = |texts: &mut dyn Iterator<Item = (usize, &str)>| {
            let mut s = String::from("id\ttext\n");
            for (id, text) in texts {
                let _ = writeln!(s, "{id}\t{}", text.replace(['\t', '\n'], " "));
            }
            s
        };
        let entities = vocab_tsv(
            &mut (0..self.num_entities()).map(|i| (i, self.vocabulary.entity_text(i))),
        );
        let relations = vocab_tsv(
            &mut (0..self.num_relations()).map(|i| (i, self.vocabulary.relation_text(i))),
        );
        for (name, body) in [
            ("triples.tsv", triples),
            ("entities.tsv", entities),
            ("relations.tsv", relations),
        ] {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

/// Positives with `k` corruptions each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeBatch {
    pub positives: Vec<IdTriple>,
    pub negatives: Vec<Vec<IdTriple>>,
}

/// Corrupts head or tail (fair coin) of every positive `k` times, drawing the
/// replacement uniformly among entities other than the one being replaced.
/// Corruptions are not filtered against the known triples.
pub fn sample_negatives<R: Rng + ?Sized>(
    num_entities: usize,
    positives: &[IdTriple],
    k: usize,
    rng: &mut R,
) -> Result<NegativeBatch> {
    if k == 0 {
        return Err(Error::InvalidConfig("number of negatives must be at least 1".into()));
    }
    if positives.is_empty() {
        return Err(Error::InvalidConfig("cannot sample negatives for an empty batch".into()));
    }
    if num_entities < 2 {
        return Err(Error::CannotCorrupt);
    }
    let negatives = positives
        .iter()
        .map(|&p| {
            (0..k)
                .map(|_| {
                    let corrupt_head = rng.random_bool(0.5);
                    let original = if corrupt_head { p.head } else { p.tail };
                    let replacement = loop {
                        let e = rng.random_range(0..num_entities);
                        if e != original {
                            break e;
                        }
                    };
                    if corrupt_head {
                        IdTriple { head: replacement, ..p }
                    } else {
                        IdTriple { tail: replacement, ..p }
                    }
                })
                .collect()
        })
        .collect();
    Ok(NegativeBatch {
        positives: positives.to_vec(),
        negatives,
    })
}

/// One epoch: a seeded shuffle of all triples cut into consecutive chunks.
pub fn batches<R: Rng + ?Sized>(
    factory: &TripleFactory,
    batch_size: usize,
    rng: &mut R,
) -> Vec<Vec<IdTriple>> {
    let batch_size = batch_size.max(1);
    let mut order = factory.triples.clone();
    order.shuffle(rng);
    order.chunks(batch_size).map(<[IdTriple]>::to_vec).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology_io::{parse_ontology_str, ParseOptions};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn doc(text: &str, side: Side) -> OntologyDocument {
        parse_ontology_str(text, side, ParseOptions::default()).unwrap()
    }

    const SUB: &str = "<http://www.w3.org/2000/01/rdf-schema#subClassOf>";

    #[test]
    fn identical_triples_merge() {
        let s = doc(&format!("<http://s#Alpha> {SUB} <http://s#Beta> ."), Side::Source);
        let t = doc(&format!("<http://t#Alpha> {SUB} <http://t#Beta> ."), Side::Target);
        let f = build_factory(&s, &t).unwrap();
        assert_eq!(f.triples().len(), 1);
        assert_eq!(f.num_entities(), 2);
        assert_eq!(f.entity_ids(Side::Source).len(), 2);
        assert_eq!(f.entity_ids(Side::Target).len(), 2);
    }

    #[test]
    fn shared_label_gets_both_iris() {
        let s = doc(&format!("<http://s#alpha> {SUB} <http://s#beta> ."), Side::Source);
        let t = doc(&format!("<http://t#Alpha> {SUB} <http://t#gamma> ."), Side::Target);
        let f = build_factory(&s, &t).unwrap();
        assert_eq!(f.triples().len(), 2);
        assert_eq!(f.num_entities(), 3);
        assert_eq!(f.num_relations(), 1);
        let alpha = f.vocabulary().entity_id("alpha").unwrap();
        assert!(f.entity_ids(Side::Source).contains(&alpha));
        assert!(f.entity_ids(Side::Target).contains(&alpha));
        let e = f.catalog().entry(alpha);
        assert_eq!(e.source_iris, vec!["http://s#alpha"]);
        assert_eq!(e.target_iris, vec!["http://t#Alpha"]);
        assert!(e.is_class_source && e.is_class_target);
    }

    #[test]
    fn both_empty_is_an_error() {
        let s = doc("", Side::Source);
        let t = doc("", Side::Target);
        assert!(matches!(build_factory(&s, &t), Err(Error::EmptyFactory)));
    }

    #[test]
    fn literals_become_text_nodes() {
        let s = doc(
            "<http://s#A> <http://www.w3.org/2000/01/rdf-schema#comment> \"Some Note\" .",
            Side::Source,
        );
        let t = doc("", Side::Target);
        let f = build_factory(&s, &t).unwrap();
        let id = f.vocabulary().entity_id("some note").unwrap();
        let e = f.catalog().entry(id);
        assert_eq!(e.source_iris, vec!["\"Some Note\""]);
        assert_eq!(e.primary_iri(Side::Source), None);
    }

    #[test]
    fn label_literal_collapses_to_self_loop() {
        let s = doc(
            "<http://s#X1> <http://www.w3.org/2000/01/rdf-schema#label> \"Heart\" .",
            Side::Source,
        );
        let f = build_factory(&s, &doc("", Side::Target)).unwrap();
        assert_eq!(f.num_entities(), 1);
        let t = f.triples()[0];
        assert_eq!(t.head, t.tail);
        assert_eq!(f.catalog().entry(0).primary_iri(Side::Source), Some("http://s#X1"));
    }

    #[test]
    fn negatives_counts() {
        let f = TripleFactory::from_id_triples(
            10,
            2,
            &(0..64).map(|i| IdTriple::new(i % 10, i % 2, (i + 3) % 10)).collect::<Vec<_>>(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let batch = batches(&f, 64, &mut rng).remove(0);
        let neg = sample_negatives(f.num_entities(), &batch, 5, &mut rng).unwrap();
        assert_eq!(neg.negatives.iter().map(Vec::len).sum::<usize>(), 5 * batch.len());
        assert!(neg.negatives.iter().all(|n| n.len() == 5));
    }

    #[test]
    fn two_entities_force_the_alternative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = IdTriple::new(0, 0, 1);
        let neg = sample_negatives(2, &[p], 50, &mut rng).unwrap();
        for n in &neg.negatives[0] {
            assert!(*n == IdTriple::new(1, 0, 1) || *n == IdTriple::new(0, 0, 0));
        }
        assert!(neg.negatives[0].contains(&IdTriple::new(1, 0, 1)));
    }

    #[test]
    fn single_entity_cannot_corrupt() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(matches!(
            sample_negatives(1, &[IdTriple::new(0, 0, 0)], 5, &mut rng),
            Err(Error::CannotCorrupt)
        ));
        assert!(sample_negatives(3, &[], 5, &mut rng).is_err());
        assert!(sample_negatives(3, &[IdTriple::new(0, 0, 1)], 0, &mut rng).is_err());
    }

    #[test]
    fn batch_sizes() {
        let triples: Vec<_> = (0..10).map(|i| IdTriple::new(i, 0, (i + 1) % 10)).collect();
        let f = TripleFactory::from_id_triples(10, 1, &triples).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let sizes: Vec<usize> = batches(&f, 4, &mut rng).iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![4, 4, 2]);
        let sizes: Vec<usize> = batches(&f, 64, &mut rng).iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![10]);
    }

    #[test]
    fn seeded_shuffle_and_sampling_are_reproducible() {
        let triples: Vec<_> = (0..30).map(|i| IdTriple::new(i % 7, i % 3, (i * 5) % 7)).collect();
        let f = TripleFactory::from_id_triples(7, 3, &triples).unwrap();
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            let b = batches(&f, 8, &mut rng);
            let n = sample_negatives(f.num_entities(), &b[0], 5, &mut rng).unwrap();
            (b, n)
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn dump_files() {
        let f = TripleFactory::from_id_triples(3, 1, &[IdTriple::new(0, 0, 2)]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        f.write_dump(dir.path()).unwrap();
        let triples = std::fs::read_to_string(dir.path().join("triples.tsv")).unwrap();
        assert_eq!(triples, "h_id\tr_id\tt_id\n0\t0\t2\n");
        let entities = std::fs::read_to_string(dir.path().join("entities.tsv")).unwrap();
        assert_eq!(entities.lines().count(), 4);
    }
}

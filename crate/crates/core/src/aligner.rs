//! From trained embeddings to a one-to-one alignment.
//!
//! 1. Extract each side's entity rows and L2-normalize them.
//! 2. `S = E_source · E_targetᵀ` (cosine similarity).
//! 3. Per source row take the argmax target (lower index wins ties).
//! 4. Visit those candidates by descending similarity (lower source index
//!    wins ties) and keep one only if its target is still free. Dropped
//!    sources are not retried against other targets.
//! 5. Drop everything below `τ`.
//!
//! Steps 3 and 4 do not depend on `τ`, so [`rank_candidates`] can be computed
//! once and filtered at many thresholds.

use std::collections::HashSet;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Stage};
use crate::kge::{ModelKind, ModelParams};
use crate::ontology_io::{parse_ontology, OntologyDocument, Side};
use crate::trainer::{train, TrainingConfig, TrainingTrace};
use crate::triple_factory::{build_factory, EntityCatalog, TripleFactory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mapping {
    pub source_iri: String,
    pub target_iri: String,
    pub relation: String,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    pub mappings: Vec<Mapping>,
    pub tau: f64,
    pub model: ModelKind,
}

impl Alignment {
    pub fn len(&self) -> usize {
        self.mappings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mappings.is_empty()
    }
}

/// Unit-length embedding rows for one side.
#[derive(Debug, Clone, PartialEq)]
pub struct SideEmbeddings {
    pub side: Side,
    pub entity_ids: Vec<usize>,
    pub dim: usize,
    matrix: Vec<f64>,
}

impl SideEmbeddings {
    /// Normalizes `rows` (row-major, `entity_ids.len() × dim`).
    pub fn from_rows(side: Side, entity_ids: Vec<usize>, dim: usize, rows: &[f64]) -> Result<Self> {
        Self::build(side, entity_ids, dim, rows, |id| format!("entity {id}"))
    }

    fn build(
        side: Side,
        entity_ids: Vec<usize>,
        dim: usize,
        rows: &[f64],
        name: impl Fn(usize) -> String,
    ) -> Result<Self> {
        if entity_ids.is_empty() {
            return Err(Error::EmptySide { side: side.to_string() });
        }
        if rows.len() != entity_ids.len() * dim {
            return Err(Error::InvalidConfig(format!(
                "expected {} values for {} rows of width {dim}, got {}",
                entity_ids.len() * dim,
                entity_ids.len(),
                rows.len()
            )));
        }
        let mut matrix = rows.to_vec();
        for (chunk, &id) in matrix.chunks_exact_mut(dim).zip(&entity_ids) {
            let n = chunk.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::ZeroNorm { label: name(id) });
            }
            chunk.iter_mut().for_each(|v| *v /= n);
        }
        Ok(SideEmbeddings { side, entity_ids, dim, matrix })
    }

    pub fn len(&self) -> usize {
        self.entity_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entity_ids.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.matrix[i * self.dim..(i + 1) * self.dim]
    }
}

/// Pulls one side's rows out of the entity tensor.
///
/// Only entities with a real IRI on `side` are kept (literal nodes have none);
/// with `class_only` the set is further restricted to class entities.
pub fn extract_side(
    params: &ModelParams,
    factory: &TripleFactory,
    side: Side,
    class_only: bool,
) -> Result<SideEmbeddings> {
    let catalog = factory.catalog();
    let ids: Vec<usize> = factory
        .entity_ids(side)
        .iter()
        .copied()
        .filter(|&id| {
            let entry = catalog.entry(id);
            entry.primary_iri(side).is_some() && (!class_only || entry.is_class(side))
        })
        .collect();
    let ent = params.entity_tensor();
    let mut rows = Vec::with_capacity(ids.len() * ent.cols);
    for &id in &ids {
        rows.extend_from_slice(ent.row(id));
    }
    let vocab = factory.vocabulary();
    SideEmbeddings::build(side, ids, ent.cols, &rows, |id| vocab.entity_text(id).to_string())
}

/// Dense `n × m` similarity matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl SimilarityMatrix {
    /// Wraps a row-major matrix.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has the wrong length");
        SimilarityMatrix { rows, cols, data }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// Cosine similarities, computed in parallel blocks of `row_block` source rows.
pub fn similarity(
    source: &SideEmbeddings,
    target: &SideEmbeddings,
    row_block: usize,
) -> Result<SimilarityMatrix> {
    if source.dim != target.dim {
        return Err(Error::DimMismatch {
            source_dim: source.dim,
            target_dim: target.dim,
        });
    }
    if row_block == 0 {
        return Err(Error::InvalidConfig("row block must be at least 1".into()));
    }
    let (n, m) = (source.len(), target.len());
    let mut data = vec![0.0; n * m];
    if m > 0 {
        data.par_chunks_mut(row_block * m)
            .enumerate()
            .for_each(|(b, block)| {
                for (r, out) in block.chunks_exact_mut(m).enumerate() {
                    let s = source.row(b * row_block + r);
                    for (j, cell) in out.iter_mut().enumerate() {
                        *cell = s.iter().zip(target.row(j)).map(|(a, b)| a * b).sum();
                    }
                }
            });
    }
    Ok(SimilarityMatrix::from_rows(n, m, data))
}

/// A matched pair of row indices into the similarity matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub source: usize,
    pub target: usize,
    pub theta: f64,
}

/// Per-row argmax (lower column wins ties).
pub fn argmax_candidates(s: &SimilarityMatrix) -> Vec<Candidate> {
    if s.cols == 0 {
        return Vec::new();
    }
    (0..s.rows)
        .map(|i| {
            let row = s.row(i);
            let mut best = 0;
            for (j, v) in row.iter().enumerate().skip(1) {
                if *v > row[best] {
                    best = j;
                }
            }
            Candidate { source: i, target: best, theta: row[best] }
        })
        .collect()
}

/// Greedy one-to-one selection, returned in acceptance order.
pub fn greedy_one_to_one(mut candidates: Vec<Candidate>) -> Vec<Candidate> {
    candidates.sort_by(|a, b| b.theta.total_cmp(&a.theta).then(a.source.cmp(&b.source)));
    let mut used_sources = HashSet::new();
    let mut used_targets = HashSet::new();
    candidates
        .into_iter()
        .filter(|c| {
            if used_sources.contains(&c.source) || used_targets.contains(&c.target) {
                return false;
            }
            used_sources.insert(c.source);
            used_targets.insert(c.target);
            true
        })
        .collect()
}

/// Argmax plus greedy selection, resolved to IRIs, ordered by descending
/// confidence. Filtering this list at `τ` gives the alignment at `τ`.
pub fn rank_candidates(
    s: &SimilarityMatrix,
    source: &SideEmbeddings,
    target: &SideEmbeddings,
    catalog: &EntityCatalog,
) -> Result<Vec<Mapping>> {
    if s.rows != source.len() || s.cols != target.len() {
        return Err(Error::InvalidConfig(format!(
            "similarity matrix is {}x{} but sides have {} and {} rows",
            s.rows,
            s.cols,
            source.len(),
            target.len()
        )));
    }
    let iri = |emb: &SideEmbeddings, row: usize| -> Result<String> {
        let id = emb.entity_ids[row];
        if id >= catalog.len() {
            return Err(Error::IdOutOfRange { what: "entity", id, size: catalog.len() });
        }
        catalog
            .entry(id)
            .primary_iri(emb.side)
            .map(str::to_string)
            .ok_or_else(|| Error::InvalidConfig(format!("entity {id} has no {} IRI", emb.side)))
    };
    greedy_one_to_one(argmax_candidates(s))
        .into_iter()
        .map(|c| {
            Ok(Mapping {
                source_iri: iri(source, c.source)?,
                target_iri: iri(target, c.target)?,
                relation: "=".to_string(),
                confidence: c.theta,
            })
        })
        .collect()
}

/// Keeps the ranked mappings with confidence at least `tau`.
pub fn filter_tau(ranked: &[Mapping], tau: f64, model: ModelKind) -> Alignment {
    Alignment {
        mappings: ranked.iter().filter(|m| m.confidence >= tau).cloned().collect(),
        tau,
        model,
    }
}

/// Full matching step: argmax, greedy one-to-one, then the `τ` filter.
pub fn match_alignment(
    s: &SimilarityMatrix,
    source: &SideEmbeddings,
    target: &SideEmbeddings,
    catalog: &EntityCatalog,
    tau: f64,
    model: ModelKind,
) -> Result<Alignment> {
    if tau.is_nan() {
        return Err(Error::InvalidConfig("tau must be a number".into()));
    }
    Ok(filter_tau(&rank_candidates(s, source, target, catalog)?, tau, model))
}

/// An entity whose label is shared by several IRIs on one side; the first
/// IRI is used in mappings and the rest are listed here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiIri {
    pub side: Side,
    pub label: String,
    pub chosen: String,
    pub others: Vec<String>,
}

/// Everything produced by one end-to-end run, before the `τ` filter.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub factory: TripleFactory,
    pub params: ModelParams,
    pub trace: TrainingTrace,
    pub source: SideEmbeddings,
    pub target: SideEmbeddings,
    pub ranked: Vec<Mapping>,
    pub multi_iri: Vec<MultiIri>,
    pub seconds: f64,
}

impl PipelineRun {
    pub fn alignment(&self, tau: f64) -> Alignment {
        filter_tau(&self.ranked, tau, self.params.kind)
    }
}

/// Parses both files and runs [`run_pipeline_docs`].
pub fn run_pipeline(
    source_path: impl AsRef<Path>,
    target_path: impl AsRef<Path>,
    config: &TrainingConfig,
    class_only: bool,
) -> Result<PipelineRun> {
    let start = Instant::now();
    let src = parse_ontology(source_path, Side::Source).map_err(|e| e.at(Stage::Parse))?;
    let tgt = parse_ontology(target_path, Side::Target).map_err(|e| e.at(Stage::Parse))?;
    let mut run = run_pipeline_docs(&src, &tgt, config, class_only)?;
    run.seconds = start.elapsed().as_secs_f64();
    Ok(run)
}

/// Factory, training, extraction, similarity and candidate ranking.
/// Errors are tagged with the stage that raised them.
pub fn run_pipeline_docs(
    source: &OntologyDocument,
    target: &OntologyDocument,
    config: &TrainingConfig,
    class_only: bool,
) -> Result<PipelineRun> {
    let start = Instant::now();
    config.validate().map_err(|e| e.at(Stage::Train))?;
    let factory = build_factory(source, target).map_err(|e| e.at(Stage::Factory))?;
    let (params, trace) = train(&factory, config).map_err(|e| e.at(Stage::Train))?;
    let src = extract_side(&params, &factory, Side::Source, class_only).map_err(|e| e.at(Stage::Extract))?;
    let tgt = extract_side(&params, &factory, Side::Target, class_only).map_err(|e| e.at(Stage::Extract))?;
    let s = similarity(&src, &tgt, config.eval_batch_size).map_err(|e| e.at(Stage::Similarity))?;
    let ranked = rank_candidates(&s, &src, &tgt, factory.catalog()).map_err(|e| e.at(Stage::Match))?;
    let multi_iri = multi_iri_report(&factory, &src, &tgt);
    Ok(PipelineRun {
        factory,
        params,
        trace,
        source: src,
        target: tgt,
        ranked,
        multi_iri,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn multi_iri_report(factory: &TripleFactory, src: &SideEmbeddings, tgt: &SideEmbeddings) -> Vec<MultiIri> {
    let catalog = factory.catalog();
    let mut out = Vec::new();
    for emb in [src, tgt] {
        for &id in &emb.entity_ids {
            let entry = catalog.entry(id);
            let iris = entry.iris(emb.side);
            let Some(chosen) = entry.primary_iri(emb.side) else { continue };
            let others: Vec<String> = iris.iter().filter(|i| *i != chosen).cloned().collect();
            if !others.is_empty() {
                out.push(MultiIri {
                    side: emb.side,
                    label: factory.vocabulary().entity_text(id).to_string(),
                    chosen: chosen.to_string(),
                    others,
                });
            }
        }
    }
    out
}

/// End-to-end alignment. The returned trace's `wall_clock_seconds` covers the
/// whole pipeline, parsing included.
pub fn align_pipeline(
    source_path: impl AsRef<Path>,
    target_path: impl AsRef<Path>,
    config: &TrainingConfig,
    tau: f64,
    class_only: bool,
) -> Result<(Alignment, TrainingTrace)> {
    if tau.is_nan() {
        return Err(Error::InvalidConfig("tau must be a number".into()).at(Stage::Match));
    }
    let run = run_pipeline(source_path, target_path, config, class_only)?;
    let alignment = run.alignment(tau);
    let mut trace = run.trace;
    trace.wall_clock_seconds = run.seconds;
    Ok((alignment, trace))
}

//! Precision, recall and F-measure against a reference alignment.
//!
//! Percentages are kept at full precision; [`round1`] applies the one-decimal,
//! half-away-from-zero rounding used for display.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::aligner::{filter_tau, Alignment, Mapping};
use crate::error::{Error, Result};
use crate::kge::ModelKind;
use crate::ontology_io::ReferenceAlignment;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub intersection: usize,
    pub alignment_size: usize,
    pub reference_size: usize,
    pub tau: f64,
    pub seconds: f64,
}

impl EvaluationReport {
    /// Builds a report from raw counts. An empty alignment has precision 0.
    pub fn from_counts(
        intersection: usize,
        alignment_size: usize,
        reference_size: usize,
        tau: f64,
        seconds: f64,
    ) -> Result<Self> {
        if reference_size == 0 {
            return Err(Error::EmptyReference);
        }
        if intersection > alignment_size.min(reference_size) {
            return Err(Error::InvalidConfig(format!(
                "intersection {intersection} exceeds alignment size {alignment_size} or reference size {reference_size}"
            )));
        }
        let precision = if alignment_size == 0 {
            0.0
        } else {
            100.0 * intersection as f64 / alignment_size as f64
        };
        let recall = 100.0 * intersection as f64 / reference_size as f64;
        let f_measure = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Ok(EvaluationReport {
            precision,
            recall,
            f_measure,
            intersection,
            alignment_size,
            reference_size,
            tau,
            seconds,
        })
    }
}

/// Rounds to one decimal, halves away from zero.
pub fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

fn pair_key(m: &Mapping) -> (&str, &str) {
    (m.source_iri.trim(), m.target_iri.trim())
}

/// Compares (source, target) IRI pairs after trimming; relation and
/// confidence are ignored. Duplicate pairs in the alignment count once.
pub fn evaluate_mappings(
    mappings: &[Mapping],
    tau: f64,
    reference: &ReferenceAlignment,
    seconds: f64,
) -> Result<EvaluationReport> {
    if reference.is_empty() {
        return Err(Error::EmptyReference);
    }
    let predicted: HashSet<(&str, &str)> = mappings.iter().map(pair_key).collect();
    let gold: HashSet<(&str, &str)> = reference
        .pairs()
        .iter()
        .map(|p| (p.source.trim(), p.target.trim()))
        .collect();
    let intersection = predicted.intersection(&gold).count();
    EvaluationReport::from_counts(intersection, predicted.len(), gold.len(), tau, seconds)
}

pub fn evaluate(alignment: &Alignment, reference: &ReferenceAlignment, seconds: f64) -> Result<EvaluationReport> {
    evaluate_mappings(&alignment.mappings, alignment.tau, reference, seconds)
}

/// Parses `start:stop:step` into the points `start, start+step, …, ≤ stop`.
/// `start == stop` yields the single point regardless of step.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |m: &str| Error::InvalidGrid(format!("'{spec}': {m}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(bad("expected start:stop:step"));
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("'{s}' is not a number")));
    let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
    if ![start, stop, step].iter().all(|v| v.is_finite()) {
        return Err(bad("values must be finite"));
    }
    if start > stop {
        return Err(bad("start exceeds stop"));
    }
    if start == stop {
        return grid_points(vec![start]);
    }
    if step <= 0.0 {
        return Err(bad("step must be positive"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    let points = (0..=n)
        .map(|i| {
            let v = start + i as f64 * step;
            if (v - stop).abs() < 1e-9 { stop } else { v }
        })
        .collect();
    grid_points(points)
}

fn grid_points(points: Vec<f64>) -> Result<Vec<f64>> {
    if points.is_empty() {
        return Err(Error::InvalidGrid("grid is empty".into()));
    }
    if let Some(v) = points.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidGrid(format!("threshold {v} is outside [0, 1]")));
    }
    Ok(points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub rows: Vec<EvaluationReport>,
    /// Index into `rows` of the highest F (lowest τ among ties).
    pub best: usize,
}

impl Sweep {
    pub fn best_row(&self) -> &EvaluationReport {
        &self.rows[self.best]
    }
}

/// Evaluates the ranked candidates at every grid threshold.
pub fn sweep_threshold(
    ranked: &[Mapping],
    model: ModelKind,
    reference: &ReferenceAlignment,
    grid: &[f64],
    seconds: f64,
) -> Result<Sweep> {
    let grid = grid_points(grid.to_vec())?;
    let rows = grid
        .iter()
        .map(|&tau| evaluate(&filter_tau(ranked, tau, model), reference, seconds))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, r) in rows.iter().enumerate() {
        let b = &rows[best];
        if r.f_measure > b.f_measure || (r.f_measure == b.f_measure && r.tau < b.tau) {
            best = i;
        }
    }
    Ok(Sweep { rows, best })
}

/// One line of the results table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub task: String,
    pub model: String,
    pub report: EvaluationReport,
}

const HEADERS: [&str; 9] = ["Task", "KGE", "τ", "∩", "A", "T", "Prec", "Rec", "F"];

/// Plain-text table with columns Task, KGE, τ, ∩, A, T, Prec, Rec, F.
pub fn render_table(rows: &[TableRow]) -> String {
    let cells: Vec<[String; 9]> = rows
        .iter()
        .map(|row| {
            let r = &row.report;
            [
                row.task.clone(),
                row.model.clone(),
                format!("{:.2}", r.tau),
                r.intersection.to_string(),
                r.alignment_size.to_string(),
                format!("{:.1}", r.seconds),
                format!("{:.1}", round1(r.precision)),
                format!("{:.1}", round1(r.recall)),
                format!("{:.1}", round1(r.f_measure)),
            ]
        })
        .collect();
    let mut widths = HEADERS.map(|h| h.chars().count());
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, row: &[String]| {
        let parts: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| {
                let pad = w - c.chars().count();
                if i < 2 { format!("{c}{}", " ".repeat(pad)) } else { format!("{}{c}", " ".repeat(pad)) }
            })
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, &HEADERS.map(String::from));
    for row in &cells {
        line(&mut out, row);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology_io::RefPair;

    fn m(s: &str, t: &str) -> Mapping {
        Mapping { source_iri: s.into(), target_iri: t.into(), relation: "=".into(), confidence: 0.5 }
    }

    fn reference(pairs: &[(&str, &str)]) -> ReferenceAlignment {
        pairs
            .iter()
            .map(|(s, t)| RefPair { source: s.to_string(), target: t.to_string(), relation: "=".into() })
            .collect()
    }

    #[test]
    fn counts_to_percentages() {
        let r = EvaluationReport::from_counts(1047, 1069, 1516, 0.0, 0.0).unwrap();
        assert_eq!(round1(r.precision), 97.9);
        assert_eq!(round1(r.recall), 69.1);
        assert_eq!(round1(r.f_measure), 81.0);
        let r = EvaluationReport::from_counts(10, 17, 18, 0.0, 0.0).unwrap();
        assert_eq!((round1(r.precision), round1(r.recall), round1(r.f_measure)), (58.8, 55.6, 57.1));
    }

    #[test]
    fn edge_cases() {
        assert!(matches!(EvaluationReport::from_counts(0, 0, 0, 0.0, 0.0), Err(Error::EmptyReference)));
        let empty = EvaluationReport::from_counts(0, 0, 5, 0.0, 0.0).unwrap();
        assert_eq!((empty.precision, empty.recall, empty.f_measure), (0.0, 0.0, 0.0));
        assert!(EvaluationReport::from_counts(3, 2, 5, 0.0, 0.0).is_err());
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(round1(0.25), 0.3);
        assert_eq!(round1(74.95), 75.0);
        assert_eq!(round1(-0.25), -0.3);
    }

    #[test]
    fn perfect_alignment_and_trimming() {
        let r = reference(&[("a", "x"), ("b", "y")]);
        let rep = evaluate_mappings(&[m(" a ", "x"), m("b", "y\t")], 0.0, &r, 0.0).unwrap();
        assert_eq!((rep.precision, rep.recall, rep.f_measure), (100.0, 100.0, 100.0));
        let case = evaluate_mappings(&[m("A", "x")], 0.0, &r, 0.0).unwrap();
        assert_eq!(case.intersection, 0);
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:1:0.01").unwrap().len(), 101);
        assert_eq!(parse_grid("0:0:1").unwrap(), vec![0.0]);
        assert_eq!(parse_grid("0.2:0.5:0.1").unwrap().len(), 4);
        assert_eq!(*parse_grid("0:1:0.01").unwrap().last().unwrap(), 1.0);
        for bad in ["0:1", "1:0:0.1", "0:1:0", "0:2:0.5", "a:1:0.1"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn sweep_picks_lowest_tau_among_ties() {
        let ranked = vec![
            Mapping { confidence: 0.9, ..m("a", "x") },
            Mapping { confidence: 0.4, ..m("b", "z") },
        ];
        let r = reference(&[("a", "x")]);
        let sweep = sweep_threshold(&ranked, ModelKind::TransE, &r, &[0.0, 0.5, 0.6, 1.0], 0.0).unwrap();
        assert_eq!(sweep.rows.len(), 4);
        assert_eq!(sweep.best_row().tau, 0.5);
        assert_eq!(sweep.best_row().f_measure, 100.0);
        assert!(sweep_threshold(&ranked, ModelKind::TransE, &r, &[], 0.0).is_err());
    }

    #[test]
    fn table_has_all_columns() {
        let report = EvaluationReport::from_counts(9, 9, 15, 0.34, 12.0).unwrap();
        let t = render_table(&[TableRow { task: "fish".into(), model: "TransE".into(), report }]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("Task"));
        assert!(lines[1].contains("100.0") && lines[1].contains("60.0") && lines[1].ends_with("75.0"));
    }
}

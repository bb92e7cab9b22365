use std::fs;
use std::path::Path;

use kgalign::aligner::{run_pipeline, MultiIri, PipelineRun};
use kgalign::checkpoint::Checkpoint;
use kgalign::evaluator::{evaluate_mappings, parse_grid, render_table, sweep_threshold, EvaluationReport, TableRow};
use kgalign::ontology_io::{load_reference, read_alignment, write_alignment, AlignmentFormat};
use kgalign::synth::{write_bench, BenchSpec, RenameScheme};
use kgalign::trainer::TrainingConfig;
use serde::Serialize;
use serde_json::json;

use crate::manifest::{sidecar, write_json, Manifest};
use crate::settings::{default_seed, resolve_training, usage, CliError};
use crate::{AlignArgs, BenchArgs, Cli, Command, EvaluateArgs, FormatArg, SchemeArg, SweepArgs, TrainArgs};

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Align(a) => align(&a),
        Command::Evaluate(a) => evaluate(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Bench(a) => bench(&a),
    }
}

fn output_format(explicit: Option<FormatArg>, path: &Path) -> AlignmentFormat {
    match explicit {
        Some(FormatArg::Tsv) => AlignmentFormat::Tsv,
        Some(FormatArg::Xml) => AlignmentFormat::Xml,
        None => AlignmentFormat::from_path(path),
    }
}

fn format_name(f: AlignmentFormat) -> &'static str {
    match f {
        AlignmentFormat::Tsv => "tsv",
        AlignmentFormat::Xml => "xml",
    }
}

fn check_tau(tau: f64) -> Result<(), CliError> {
    if !(-1.0..=1.0).contains(&tau) {
        return Err(usage(format!("--tau {tau} is outside [-1, 1]")));
    }
    Ok(())
}

fn train_inputs(manifest: &mut Manifest, args: &TrainArgs) -> Result<(), CliError> {
    manifest.input("source", &args.source)?;
    manifest.input("target", &args.target)?;
    if let Some(c) = &args.config {
        manifest.input("config", c)?;
    }
    Ok(())
}

/// Timing and training details for one `align` run. Timing fields differ
/// between otherwise identical runs.
#[derive(Serialize)]
struct AlignReport<'a> {
    model: String,
    tau: f64,
    class_only: bool,
    alignment_size: usize,
    candidates: usize,
    source_entities: usize,
    target_entities: usize,
    training_seconds: f64,
    total_seconds: f64,
    epoch_losses: &'a [f64],
    config: &'a TrainingConfig,
    multi_iri: usize,
}

fn report_for<'a>(run: &'a PipelineRun, config: &'a TrainingConfig, tau: f64, class_only: bool, size: usize) -> AlignReport<'a> {
    AlignReport {
        model: config.model.to_string(),
        tau,
        class_only,
        alignment_size: size,
        candidates: run.ranked.len(),
        source_entities: run.source.len(),
        target_entities: run.target.len(),
        training_seconds: run.trace.wall_clock_seconds,
        total_seconds: run.seconds,
        epoch_losses: &run.trace.epoch_losses,
        config,
        multi_iri: run.multi_iri.len(),
    }
}

fn write_multi_iri(path: &Path, entries: &[MultiIri]) -> Result<(), CliError> {
    write_json(path, &entries)?;
    if !entries.is_empty() {
        eprintln!(
            "note: {} labels map to several IRIs; the first IRI was used (see {})",
            entries.len(),
            path.display()
        );
    }
    Ok(())
}

fn align(args: &AlignArgs) -> Result<(), CliError> {
    check_tau(args.tau)?;
    let config = resolve_training(&args.train)?;
    let format = output_format(args.format, &args.out);
    let run = run_pipeline(&args.train.source, &args.train.target, &config, args.train.class_only)?;
    let alignment = run.alignment(args.tau);
    write_alignment(&alignment, &args.out, format)?;

    let report_path = sidecar(&args.out, "report.json");
    write_json(&report_path, &report_for(&run, &config, args.tau, args.train.class_only, alignment.len()))?;
    let multi_path = sidecar(&args.out, "multi_iri.json");
    write_multi_iri(&multi_path, &run.multi_iri)?;

    let mut manifest = Manifest::new(
        "align",
        Some(config.seed),
        json!({
            "config": config,
            "tau": args.tau,
            "class_only": args.train.class_only,
            "format": format_name(format),
        }),
    );
    train_inputs(&mut manifest, &args.train)?;
    manifest.artifact("alignment", &args.out)?;
    manifest.volatile_artifact("report", &report_path)?;
    manifest.artifact("multi_iri", &multi_path)?;
    if let Some(ck) = &args.checkpoint {
        Checkpoint {
            params: run.params.clone(),
            config: config.clone(),
            completed_epochs: config.epochs,
        }
        .save(ck)?;
        manifest.artifact("checkpoint", ck)?;
    }
    manifest.write(&sidecar(&args.out, "manifest.json"))?;

    println!(
        "{} mappings ({} at tau {}) written to {} in {:.1}s",
        alignment.len(),
        config.model,
        args.tau,
        args.out.display(),
        run.seconds
    );
    Ok(())
}

fn task_name(explicit: &Option<String>, reference: &Path) -> String {
    explicit.clone().unwrap_or_else(|| {
        reference
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "-".into())
    })
}

fn evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let mappings = read_alignment(&args.alignment)?;
    let reference = load_reference(&args.reference)?;
    if mappings.is_empty() {
        eprintln!("warning: {} contains no mappings; precision is reported as 0", args.alignment.display());
    }
    let report = evaluate_mappings(&mappings, args.tau, &reference, args.seconds)?;
    let out = args.out.clone().unwrap_or_else(|| sidecar(&args.alignment, "evaluation.json"));
    write_json(&out, &report)?;

    let mut manifest = Manifest::new(
        "evaluate",
        None,
        json!({ "task": task_name(&args.task, &args.reference), "model": args.model, "tau": args.tau, "seconds": args.seconds }),
    );
    manifest.input("alignment", &args.alignment)?;
    manifest.input("reference", &args.reference)?;
    manifest.artifact("evaluation", &out)?;
    manifest.write(&sidecar(&out, "manifest.json"))?;

    print!(
        "{}",
        render_table(&[TableRow {
            task: task_name(&args.task, &args.reference),
            model: args.model.clone(),
            report,
        }])
    );
    Ok(())
}

#[derive(Serialize)]
struct SweepReport<'a> {
    model: String,
    class_only: bool,
    grid: &'a str,
    best: &'a EvaluationReport,
    rows: &'a [EvaluationReport],
    training_seconds: f64,
    total_seconds: f64,
    config: &'a TrainingConfig,
}

fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let grid = parse_grid(&args.grid).map_err(|e| usage(e.to_string()))?;
    let config = resolve_training(&args.train)?;
    let reference = load_reference(&args.reference)?;
    let run = run_pipeline(&args.train.source, &args.train.target, &config, args.train.class_only)?;
    let result = sweep_threshold(&run.ranked, config.model, &reference, &grid, run.seconds)?;
    let best = result.best_row();
    write_json(
        &args.out,
        &SweepReport {
            model: config.model.to_string(),
            class_only: args.train.class_only,
            grid: &args.grid,
            best,
            rows: &result.rows,
            training_seconds: run.trace.wall_clock_seconds,
            total_seconds: run.seconds,
            config: &config,
        },
    )?;

    let mut manifest = Manifest::new(
        "sweep",
        Some(config.seed),
        json!({ "config": config, "grid": args.grid, "class_only": args.train.class_only }),
    );
    train_inputs(&mut manifest, &args.train)?;
    manifest.input("reference", &args.reference)?;
    manifest.volatile_artifact("sweep", &args.out)?;
    if let Some(path) = &args.alignment_out {
        write_alignment(&run.alignment(best.tau), path, output_format(args.format, path))?;
        manifest.artifact("alignment", path)?;
    }
    manifest.write(&sidecar(&args.out, "manifest.json"))?;

    print!(
        "{}",
        render_table(&[TableRow {
            task: task_name(&None, &args.reference),
            model: config.model.to_string(),
            report: *best,
        }])
    );
    Ok(())
}

fn bench(args: &BenchArgs) -> Result<(), CliError> {
    let spec = BenchSpec {
        num_concepts: args.num_concepts,
        num_relations: args.num_relations,
        density: args.density,
        anchor_fraction: args.anchor_fraction,
        rename_scheme: match args.rename_scheme {
            SchemeArg::Suffix => RenameScheme::Suffix,
            SchemeArg::Scramble => RenameScheme::Scramble,
        },
        seed: match args.seed {
            Some(s) => s,
            None => default_seed()?,
        },
    };
    spec.validate().map_err(|e| usage(e.to_string()))?;
    fs::create_dir_all(&args.out_dir).map_err(|e| kgalign::Error::Io {
        path: args.out_dir.clone(),
        source: e,
    })?;
    let (bench, files) = write_bench(&spec, &args.out_dir)?;

    let mut manifest = Manifest::new("bench", Some(spec.seed), json!({ "spec": spec }));
    manifest.artifact("source", &files.source)?;
    manifest.artifact("target", &files.target)?;
    manifest.artifact("reference", &files.reference)?;
    manifest.write(&args.out_dir.join("manifest.json"))?;

    println!(
        "{} concepts, {} anchors, {} edges written to {}",
        spec.num_concepts,
        bench.anchors.len(),
        bench.edges.len(),
        args.out_dir.display()
    );
    Ok(())
}

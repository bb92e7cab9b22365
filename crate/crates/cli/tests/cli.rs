use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kgalign(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kgalign"))
        .args(args)
        .env_remove("KGALIGN_SEED")
        .output()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn bench(dir: &Path, extra: &[&str]) -> std::path::PathBuf {
    let out = dir.join("bench");
    let mut args = vec!["bench", "--out-dir", p(&out)];
    args.extend_from_slice(extra);
    let o = kgalign(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    out
}

const HEADER: &str = "source_iri\ttarget_iri\trelation\tconfidence\n";

/// An alignment of `a` rows, `inter` of which are in a reference of `r` rows.
fn count_fixture(dir: &Path, inter: usize, a: usize, r: usize) -> (std::path::PathBuf, std::path::PathBuf) {
    let mut align = HEADER.to_string();
    for i in 0..a {
        let t = if i < inter { format!("http://t#{i}") } else { format!("http://x#{i}") };
        align.push_str(&format!("http://s#{i}\t{t}\t=\t0.5\n"));
    }
    let mut reference = HEADER.to_string();
    for i in 0..r {
        reference.push_str(&format!("http://s#{i}\thttp://t#{i}\t=\t1.0\n"));
    }
    let (ap, rp) = (dir.join("a.tsv"), dir.join("ref.tsv"));
    fs::write(&ap, align).unwrap();
    fs::write(&rp, reference).unwrap();
    (ap, rp)
}

#[test]
fn missing_source_is_a_usage_error() {
    let o = kgalign(&["align", "--target", "t.nt", "--model", "transe", "--out", "o.tsv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--source"));
}

#[test]
fn unknown_model_lists_all_fifteen() {
    let o = kgalign(&["align", "--source", "s", "--target", "t", "--model", "conve", "--out", "o"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o).to_lowercase();
    for name in ["transe", "transh", "transr", "transd", "transf", "distmult", "complex", "hole", "rotate", "simple", "quate", "se", "mure", "boxe", "crosse"] {
        assert!(err.contains(name), "{name} missing from {err}");
    }
}

#[test]
fn pipeline_failures_exit_one_with_stage() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.nt");
    fs::write(&bad, "<http://a> <http://b> .\n").unwrap();
    let o = kgalign(&["align", "--source", p(&bad), "--target", p(&bad), "--model", "transe", "--out", p(&dir.path().join("o.tsv"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("parse stage"), "{}", stderr(&o));
}

#[test]
fn out_of_range_bench_specs_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [["--anchor-fraction", "1.2"], ["--num-concepts", "0"]] {
        let o = kgalign(&["bench", "--out-dir", p(&dir.path().join("b")), args[0], args[1]]);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn bench_writes_three_files_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = bench(dir.path(), &[]);
    let m = json(&out.join("manifest.json"));
    assert_eq!(m["command"], "bench");
    assert_eq!(m["seed"], 7);
    let roles: Vec<&str> = m["artifacts"].as_array().unwrap().iter().map(|a| a["role"].as_str().unwrap()).collect();
    assert_eq!(roles, ["source", "target", "reference"]);
    for a in m["artifacts"].as_array().unwrap() {
        assert!(Path::new(a["path"].as_str().unwrap()).exists());
    }
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b");
    let o = Command::new(env!("CARGO_BIN_EXE_kgalign"))
        .args(["bench", "--out-dir", p(&out)])
        .env("KGALIGN_SEED", "11")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(json(&out.join("manifest.json"))["seed"], 11);
}

#[test]
fn evaluate_prints_the_mouse_human_row() {
    let dir = tempfile::tempdir().unwrap();
    let (a, r) = count_fixture(dir.path(), 1047, 1069, 1516);
    let report = dir.path().join("e.json");
    let o = kgalign(&["evaluate", "--alignment", p(&a), "--reference", p(&r), "--out", p(&report), "--task", "Mouse-Human", "--model", "DistMult"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let row = stdout(&o);
    for cell in ["Mouse-Human", "1047", "1069", "97.9", "69.1", "81.0"] {
        assert!(row.contains(cell), "{cell} missing from {row}");
    }
    let v = json(&report);
    assert_eq!(v["intersection"], 1047);
    assert!(dir.path().join("e.json.manifest.json").exists());
}

#[test]
fn evaluate_identical_files_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let (_, r) = count_fixture(dir.path(), 0, 0, 5);
    let report = dir.path().join("e.json");
    let o = kgalign(&["evaluate", "--alignment", p(&r), "--reference", p(&r), "--out", p(&report)]);
    assert!(o.status.success());
    let v = json(&report);
    assert_eq!((v["precision"].as_f64(), v["recall"].as_f64(), v["f_measure"].as_f64()), (Some(100.0), Some(100.0), Some(100.0)));
}

#[test]
fn evaluate_empty_alignment_warns_and_reports_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (a, r) = count_fixture(dir.path(), 0, 0, 5);
    let o = kgalign(&["evaluate", "--alignment", p(&a), "--reference", p(&r)]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("warning"));
    let v = json(&dir.path().join("a.tsv.evaluation.json"));
    assert_eq!(v["precision"].as_f64(), Some(0.0));
}

fn sweep(dir: &Path, bench: &Path, grid: &str) -> Value {
    let out = dir.join(format!("sweep-{}.json", grid.replace(':', "_")));
    let o = kgalign(&[
        "sweep", "--source", p(&bench.join("source.nt")), "--target", p(&bench.join("target.nt")),
        "--model", "transe", "--dim", "32", "--epochs", "5", "--reference", p(&bench.join("reference.tsv")),
        "--grid", grid, "--out", p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    json(&out)
}

#[test]
fn sweep_grid_lengths_and_perfect_case() {
    let dir = tempfile::tempdir().unwrap();
    let b = bench(dir.path(), &["--anchor-fraction", "1.0"]);
    assert_eq!(sweep(dir.path(), &b, "0:0:1")["rows"].as_array().unwrap().len(), 1);
    let full = sweep(dir.path(), &b, "0:1:0.01");
    assert_eq!(full["rows"].as_array().unwrap().len(), 101);
    assert_eq!(full["best"]["f_measure"].as_f64(), Some(100.0));
}

#[test]
fn bad_grid_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let b = bench(dir.path(), &[]);
    let o = kgalign(&[
        "sweep", "--source", p(&b.join("source.nt")), "--target", p(&b.join("target.nt")),
        "--model", "transe", "--reference", p(&b.join("reference.tsv")), "--grid", "0:2:0.5", "--out", p(&dir.path().join("s.json")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn manifest_replay_reproduces_stable_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let b = bench(dir.path(), &[]);
    let cfg = dir.path().join("train.toml");
    fs::write(&cfg, "dim = 24\nepochs = 4\n").unwrap();
    let out = dir.path().join("run.rdf");
    let (src, tgt, ck) = (b.join("source.nt"), b.join("target.nt"), dir.path().join("m.ckpt"));
    let args = [
        "align", "--source", p(&src), "--target", p(&tgt),
        "--model", "rotate", "--config", p(&cfg), "--lr", "0.02", "--out", p(&out),
        "--checkpoint", p(&ck),
    ];
    let first = kgalign(&args);
    assert!(first.status.success(), "{}", stderr(&first));
    let m1 = json(&dir.path().join("run.rdf.manifest.json"));
    assert_eq!(m1["arguments"]["config"]["dim"], 24);
    assert_eq!(m1["arguments"]["config"]["learning_rate"], 0.02);
    assert_eq!(m1["arguments"]["format"], "xml");
    assert!(kgalign(&args).status.success());
    let m2 = json(&dir.path().join("run.rdf.manifest.json"));
    assert_eq!(m1["arguments"], m2["arguments"]);
    assert_eq!(m1["inputs"], m2["inputs"]);
    let stable = |m: &Value| -> Vec<Value> {
        m["artifacts"].as_array().unwrap().iter().filter(|a| a.get("volatile").is_none()).cloned().collect()
    };
    assert_eq!(stable(&m1).len(), 3, "alignment, multi_iri, checkpoint");
    assert_eq!(stable(&m1), stable(&m2));
    let report = json(&dir.path().join("run.rdf.report.json"));
    assert_eq!(report["epoch_losses"].as_array().unwrap().len(), 4);
}

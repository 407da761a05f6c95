//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

use normcheck_core::annotate::{content_tokens, gazetteer_matches, tokenize, Pipeline};
use normcheck_core::consistency::definition_similarity;
use normcheck_core::corpus::Manifest;
use normcheck_core::ontology::{load_ontology, ontology_stats, LabelIndex};
use normcheck_core::Span;

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

const GAZETTEER_CASES: usize = 200;
const RANDOM_STRINGS: usize = 1000;
const SIMILARITY_TOLERANCE: f64 = 1e-12;
const RUNTIME_LIMIT: Duration = Duration::from_secs(5);
const PERF_DOC_BYTES: usize = 50 * 1024;
const PERF_DOC_MIN_BYTES: usize = 45 * 1024;

const ONTOLOGIES: [&str; 3] = ["isto", "iso15531", "tech"];

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn ontology_paths() -> Vec<PathBuf> {
    ONTOLOGIES
        .iter()
        .map(|id| fixtures().join(format!("ontologies/{id}_fixture.json")))
        .collect()
}

fn report(manifest: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_normcheck"));
    cmd.arg("report").arg("--manifest").arg(manifest).arg("--out").arg(out);
    for p in ontology_paths() {
        cmd.arg("--ontology").arg(p);
    }
    cmd.args(extra).env("NORMCHECK_NO_COLOR", "1").output().expect("spawn normcheck")
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn seeded_findings() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let o = report(&fixtures().join("mandate6/manifest.json"), dir.path(), &[]);
    ensure(o.status.success(), format!("exit {:?}", o.status.code()))?;
    let raw = fs::read_to_string(dir.path().join("findings.json")).map_err(|e| e.to_string())?;
    let findings: Vec<serde_json::Value> = serde_json::from_str(&raw).map_err(|e| e.to_string())?;
    let mut got: BTreeMap<String, usize> = BTreeMap::new();
    for f in &findings {
        *got.entry(f["kind"].as_str().unwrap_or("?").to_owned()).or_default() += 1;
    }
    let want: BTreeMap<String, usize> = [
        "DuplicateDefinition",
        "DivergentDefinition",
        "AdaptedDefinition",
        "CaseAmbiguity",
        "TitleContentMismatch",
        "DanglingReference",
        "MultiParentWarning",
    ]
    .into_iter()
    .map(|k| (k.to_owned(), 1))
    .collect();
    ensure(got == want, format!("got {got:?}"))?;
    Ok(format!("{} findings, one per kind", findings.len()))
}

fn gazetteer_oracle() -> Verdict {
    let mut runner = TestRunner::deterministic();
    let strategy = (oracle::random_doc(), oracle::random_labels(), proptest::arbitrary::any::<[bool; 2]>());
    let mut mismatches = 0;
    let mut matched = 0;
    for _ in 0..GAZETTEER_CASES {
        let (text, labels, fold) = strategy.new_tree(&mut runner).map_err(|e| e.to_string())?.current();
        let models = oracle::models(&labels, fold);
        let index = LabelIndex::build(&models);
        let got: BTreeSet<(String, Span, String)> = gazetteer_matches(&content_tokens(&text), &index)
            .into_iter()
            .map(|g| (g.hit.ontology_id.clone(), g.span, g.hit.iri.clone()))
            .collect();
        let want = oracle::oracle(&text, &labels, fold);
        matched += want.len();
        if got != want {
            mismatches += 1;
        }
    }
    ensure(mismatches == 0, format!("{mismatches} of {GAZETTEER_CASES} cases differ"))?;
    Ok(format!("{GAZETTEER_CASES} random cases, {matched} oracle matches, 0 mismatches"))
}

fn ontology_stats_and_loaders() -> Verdict {
    let isto = fixtures().join("ontologies/isto_fixture.json");
    let o = Command::new(env!("CARGO_BIN_EXE_normcheck"))
        .arg("stats")
        .arg(&isto)
        .output()
        .map_err(|e| e.to_string())?;
    let out = String::from_utf8_lossy(&o.stdout);
    let first = out.lines().next().unwrap_or_default();
    ensure(
        first == "classes=125 object_properties=44 datatype_properties=4",
        format!("stats printed {first:?}"),
    )?;
    for id in ONTOLOGIES {
        let dir = fixtures().join("ontologies");
        let a = load_ontology(&dir.join(format!("{id}_fixture.json"))).map_err(|e| e.to_string())?;
        let b = load_ontology(&dir.join(format!("{id}_fixture.owl"))).map_err(|e| e.to_string())?;
        ensure(a.model == b.model, format!("{id}: native and RDF/XML models differ"))?;
        if id == "isto" {
            let s = ontology_stats(&b.model);
            ensure(
                (s.classes, s.object_properties, s.datatype_properties) == (125, 44, 4),
                format!("isto RDF/XML stats {s}"),
            )?;
        }
    }
    Ok(format!("{first}; {} dual-format fixtures equal", ONTOLOGIES.len()))
}

fn tiles(text: &str) -> bool {
    let mut at = 0;
    for t in tokenize(text) {
        if t.span.start != at || t.span.end <= t.span.start || text.get(t.span.range()) != Some(&t.surface) {
            return false;
        }
        at = t.span.end;
    }
    at == text.len()
}

fn offsets_and_tiling() -> Verdict {
    let manifest = Manifest::load(&fixtures().join("mandate6/manifest.json")).map_err(|e| e.to_string())?;
    let (corpus, failures) = manifest.load_corpus();
    ensure(failures.is_empty(), "fixture ingestion failed")?;
    let models: Vec<_> = ontology_paths()
        .iter()
        .map(|p| load_ontology(p).map(|l| l.model))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let index = LabelIndex::build(&models);
    let pipeline = Pipeline::default();
    for d in &corpus.documents {
        ensure(tiles(&d.text), format!("{} does not tile", d.doc_id))?;
        pipeline.run_document(d, &index).map_err(|e| format!("{}: {e}", d.doc_id))?;
    }
    let mut runner = TestRunner::deterministic();
    let strategy = "(?s).{0,200}";
    for _ in 0..RANDOM_STRINGS {
        let s: String = strategy.new_tree(&mut runner).map_err(|e| e.to_string())?.current();
        ensure(tiles(&s), format!("random string does not tile: {s:?}"))?;
        let doc = normcheck_core::corpus::ingest_document(
            s.as_bytes(),
            &normcheck_core::corpus::DocumentMeta {
                doc_id: "r".into(),
                standard_ref: "ISO 1".into(),
                title: "r".into(),
            },
        );
        if let Ok(doc) = doc {
            pipeline.run_document(&doc, &index).map_err(|e| format!("random document: {e}"))?;
        }
    }
    Ok(format!("{} fixtures and {RANDOM_STRINGS} random strings", corpus.documents.len()))
}

fn read_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for e in fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                let rel = p.strip_prefix(root).unwrap().display().to_string();
                out.insert(rel, fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

fn determinism() -> Verdict {
    let manifest = fixtures().join("mandate6/manifest.json");
    let runs = [vec!["--jobs", "1"], vec!["--jobs", "8"], vec![]];
    let mut trees = Vec::new();
    for extra in &runs {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let o = report(&manifest, dir.path(), extra);
        ensure(o.status.success(), format!("report {extra:?} exited {:?}", o.status.code()))?;
        trees.push(read_tree(dir.path()));
    }
    ensure(!trees[0].is_empty(), "empty bundle")?;
    for (i, t) in trees.iter().enumerate().skip(1) {
        ensure(t == &trees[0], format!("bundle of run {:?} differs from --jobs 1", runs[i]))?;
    }
    Ok(format!("{} files byte-identical across --jobs 1, --jobs 8 and default", trees[0].len()))
}

fn similarity() -> Verdict {
    for s in ["control of a flow", "Flow, control.", "", "x"] {
        let v = definition_similarity(s, s);
        ensure(v == 1.0, format!("reflexive {s:?} gave {v}"))?;
    }
    let d = definition_similarity("resource status view", "time point event");
    ensure(d == 0.0, format!("disjoint gave {d}"))?;
    // (a, b, |intersection|, |union|) counted by hand
    let cases = [
        ("control of manufacturing flow", "control of the manufacturing flows", 3.0, 6.0),
        (
            "activity, performed by a resource on a material flow",
            "activity, performed by a resource within the flow",
            6.0,
            10.0,
        ),
        ("a b c", "b c d", 2.0, 4.0),
        ("time point", "Time, point; interval", 2.0, 3.0),
    ];
    for (a, b, i, u) in cases {
        let v = definition_similarity(a, b);
        ensure((v - i / u).abs() <= SIMILARITY_TOLERANCE, format!("{a:?} vs {b:?}: {v} != {i}/{u}"))?;
    }
    Ok(format!("reflexive 1.0, disjoint 0.0, {} hand cases within {SIMILARITY_TOLERANCE:e}", cases.len()))
}

/// Grows each fixture document to about `PERF_DOC_BYTES` with extra
/// numbered clauses built from its own sentences.
fn padded_corpus(dir: &Path) -> Result<PathBuf, String> {
    let src = fixtures().join("mandate6");
    let raw = fs::read_to_string(src.join("manifest.json")).map_err(|e| e.to_string())?;
    let mut manifest: serde_json::Value = serde_json::from_str(&raw).map_err(|e| e.to_string())?;
    manifest["registry"] = serde_json::Value::String(src.join("registry.json").display().to_string());
    for d in manifest["documents"].as_array_mut().ok_or("no documents")? {
        let file = d["path"].as_str().ok_or("no path")?.to_owned();
        let mut text = fs::read_to_string(src.join(&file)).map_err(|e| e.to_string())?;
        let sentences: Vec<String> = text
            .lines()
            .filter(|l| l.len() > 60 && l.ends_with('.'))
            .map(str::to_owned)
            .collect();
        let mut n = 1;
        while text.len() < PERF_DOC_BYTES {
            text.push_str(&format!("\n9.{n} Additional provisions {n}\n"));
            for s in &sentences {
                text.push_str(s);
                text.push('\n');
            }
            n += 1;
        }
        fs::write(dir.join(&file), text).map_err(|e| e.to_string())?;
    }
    let path = dir.join("manifest.json");
    fs::write(&path, manifest.to_string()).map_err(|e| e.to_string())?;
    Ok(path)
}

fn runtime() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let manifest = padded_corpus(dir.path())?;
    let sizes: Vec<u64> = ["part1", "part31", "part32", "part42", "part43", "part44"]
        .iter()
        .map(|d| fs::metadata(dir.path().join(format!("{d}.txt"))).map(|m| m.len()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure(
        sizes.iter().all(|&s| s as usize >= PERF_DOC_MIN_BYTES),
        format!("padded sizes {sizes:?}"),
    )?;
    let classes: usize = ontology_paths()
        .iter()
        .map(|p| load_ontology(p).map(|l| l.model.classes.len()))
        .sum::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let out = dir.path().join("out");
    let start = Instant::now();
    let o = report(&manifest, &out, &[]);
    let elapsed = start.elapsed();
    ensure(o.status.success(), format!("exit {:?}", o.status.code()))?;
    ensure(elapsed < RUNTIME_LIMIT, format!("took {elapsed:?}, limit {RUNTIME_LIMIT:?}"))?;
    let total: u64 = sizes.iter().sum();
    Ok(format!(
        "{} documents, {} KB, {classes} classes in {:.2?} (limit {RUNTIME_LIMIT:?})",
        sizes.len(),
        total / 1024,
        elapsed
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("seeded-defect reproduction", seeded_findings),
        ("gazetteer oracle equivalence", gazetteer_oracle),
        ("ontology stats and loader equivalence", ontology_stats_and_loaders),
        ("offset soundness and tokenizer tiling", offsets_and_tiling),
        ("bundle determinism", determinism),
        ("similarity unit checks", similarity),
        ("runtime", runtime),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

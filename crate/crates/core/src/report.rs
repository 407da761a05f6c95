//! Output bundle: stand-off annotations, entities, candidates, links and
//! findings as JSON/CSV, plus a markdown summary and a digest manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::annotate::{AnnotationSet, StandoffFile};
use crate::consistency::{ConsistencyFinding, FindingKind, Location};
use crate::corpus::{extract_term_entries, Corpus};
use crate::extract::{Entity, ReferenceLink};
use crate::populate::CandidateClass;

pub const FINDINGS_CSV_HEADER: [&str; 8] = ["kind", "severity", "doc_id", "clause", "start", "end", "similarity", "detail"];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("serializing {file}: {message}")]
    Serialize { file: String, message: String },
    #[error("bundle cross-reference does not resolve: {0}")]
    CrossReference(String),
}

/// Everything a bundle is built from.
#[derive(Debug, Clone, Copy)]
pub struct BundleContents<'a> {
    pub corpus: &'a Corpus,
    pub annotations: &'a BTreeMap<String, AnnotationSet>,
    pub entities: &'a [Entity],
    pub candidates: &'a [CandidateClass],
    pub links: &'a [ReferenceLink],
    pub findings: &'a [ConsistencyFinding],
    /// Documents that failed ingestion or annotation, with the reason.
    pub failures: &'a BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EmitOptions {
    /// Record the generation time in `manifest.json`.
    pub timestamps: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleManifest {
    pub corpus_id: String,
    pub files: Vec<ManifestEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at_unix: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentSummary {
    pub doc_id: String,
    pub standard_ref: String,
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pages: Option<u32>,
    pub clauses: usize,
    pub terms: usize,
    pub annotations: usize,
}

pub fn corpus_summary(contents: &BundleContents) -> Vec<DocumentSummary> {
    contents
        .corpus
        .documents
        .iter()
        .map(|d| DocumentSummary {
            doc_id: d.doc_id.clone(),
            standard_ref: d.standard_ref.clone(),
            title: d.title.clone(),
            pages: d.page_count_hint,
            clauses: d.all_clauses().count(),
            terms: extract_term_entries(d).len(),
            annotations: contents.annotations.get(&d.doc_id).map_or(0, AnnotationSet::len),
        })
        .collect()
}

fn check_location(corpus: &Corpus, loc: &Location, what: &str) -> Result<(), ReportError> {
    let doc = corpus
        .document(&loc.doc_id)
        .ok_or_else(|| ReportError::CrossReference(format!("{what}: unknown document {}", loc.doc_id)))?;
    // an empty clause number marks front matter before the first heading
    if !loc.clause_number.is_empty() && doc.find_clause(&loc.clause_number).is_none() {
        return Err(ReportError::CrossReference(format!(
            "{what}: {} has no clause {}",
            loc.doc_id, loc.clause_number
        )));
    }
    if loc.span.end > doc.text.len() {
        return Err(ReportError::CrossReference(format!(
            "{what}: span {} outside {}",
            loc.span, loc.doc_id
        )));
    }
    Ok(())
}

/// Checks that every document, clause and annotation named inside the
/// bundle exists.
pub fn validate_cross_references(contents: &BundleContents) -> Result<(), ReportError> {
    let corpus = contents.corpus;
    for f in contents.findings {
        for loc in &f.locations {
            check_location(corpus, loc, &format!("{} finding", f.kind))?;
        }
    }
    for c in contents.candidates {
        let loc = Location {
            doc_id: c.evidence.doc_id.clone(),
            clause_number: c.evidence.clause_number.clone(),
            span: c.evidence.span,
        };
        check_location(corpus, &loc, &format!("candidate \"{}\"", c.term))?;
    }
    for e in contents.entities {
        for m in &e.mention_ann_ids {
            let found = contents
                .annotations
                .get(&m.doc_id)
                .and_then(|s| s.get(m.ann_id))
                .is_some();
            if !found {
                return Err(ReportError::CrossReference(format!(
                    "entity {}: no annotation {} in {}",
                    e.entity_id, m.ann_id, m.doc_id
                )));
            }
        }
    }
    for l in contents.links {
        if corpus.document(&l.from_doc).is_none() {
            return Err(ReportError::CrossReference(format!("reference from unknown document {}", l.from_doc)));
        }
    }
    for doc_id in contents.annotations.keys() {
        if corpus.document(doc_id).is_none() {
            return Err(ReportError::CrossReference(format!("annotations for unknown document {doc_id}")));
        }
    }
    Ok(())
}

fn to_json<T: Serialize + ?Sized>(file: &str, value: &T) -> Result<Vec<u8>, ReportError> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| ReportError::Serialize {
        file: file.to_owned(),
        message: e.to_string(),
    })?;
    out.push(b'\n');
    Ok(out)
}

pub fn findings_csv(findings: &[ConsistencyFinding]) -> Result<Vec<u8>, ReportError> {
    let err = |e: csv::Error| ReportError::Serialize {
        file: "findings.csv".into(),
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(FINDINGS_CSV_HEADER).map_err(err)?;
    for f in findings {
        let loc = f.primary();
        w.write_record([
            f.kind.to_string(),
            f.severity.to_string(),
            loc.doc_id.clone(),
            loc.clause_number.clone(),
            loc.span.start.to_string(),
            loc.span.end.to_string(),
            f.similarity.map(|s| s.to_string()).unwrap_or_default(),
            f.detail.clone(),
        ])
        .map_err(err)?;
    }
    w.into_inner().map_err(|e| ReportError::Serialize {
        file: "findings.csv".into(),
        message: e.to_string(),
    })
}

fn cell(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}

fn loc_text(l: &Location) -> String {
    if l.clause_number.is_empty() {
        format!("{} [{}]", l.doc_id, l.span)
    } else {
        format!("{} {} [{}]", l.doc_id, l.clause_number, l.span)
    }
}

/// Markdown report. Contains no timestamps or paths, so it is stable for a
/// given input.
pub fn summary_markdown(contents: &BundleContents) -> String {
    let mut md = String::new();
    let _ = writeln!(md, "# Consistency report: {}\n", contents.corpus.corpus_id);

    md.push_str("## Corpus\n\n");
    md.push_str("| Document | Reference | Title | Pages | Clauses | Terms | Annotations |\n");
    md.push_str("|---|---|---|---:|---:|---:|---:|\n");
    for s in corpus_summary(contents) {
        let pages = s.pages.map(|p| p.to_string()).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} | {} | {} | {} |",
            cell(&s.doc_id),
            cell(&s.standard_ref),
            cell(&s.title),
            pages,
            s.clauses,
            s.terms,
            s.annotations
        );
    }
    md.push('\n');

    if !contents.failures.is_empty() {
        md.push_str("## Failed documents\n\n");
        for (doc, why) in contents.failures {
            let _ = writeln!(md, "- {}: {}", doc, cell(why));
        }
        md.push('\n');
    }

    let mut by_kind: BTreeMap<FindingKind, Vec<&ConsistencyFinding>> = BTreeMap::new();
    for f in contents.findings {
        by_kind.entry(f.kind).or_default().push(f);
    }
    md.push_str("## Findings\n\n| Kind | Severity | Count |\n|---|---|---:|\n");
    for kind in FindingKind::ALL {
        let n = by_kind.get(&kind).map_or(0, Vec::len);
        let _ = writeln!(md, "| {} | {} | {} |", kind, kind.severity(), n);
    }
    md.push('\n');
    for kind in FindingKind::ALL {
        let _ = writeln!(md, "### {kind}\n");
        match by_kind.get(&kind) {
            None => md.push_str("None.\n\n"),
            Some(fs) => {
                for f in fs {
                    let _ = writeln!(md, "- **{}** {}: {}", f.severity, loc_text(f.primary()), f.detail);
                    for extra in &f.locations[1..] {
                        let _ = writeln!(md, "  - {}", loc_text(extra));
                    }
                }
                md.push('\n');
            }
        }
    }

    let mentions: usize = contents.entities.iter().map(|e| e.mention_ann_ids.len()).sum();
    let _ = writeln!(
        md,
        "## Entities\n\n{} entities linked from {} mentions.\n",
        contents.entities.len(),
        mentions
    );
    if !contents.entities.is_empty() {
        md.push_str("| Entity | Term | Class | Mentions |\n|---|---|---|---:|\n");
        for e in contents.entities {
            let _ = writeln!(
                md,
                "| {} | {} | {} | {} |",
                e.entity_id,
                cell(&e.canonical_term),
                cell(&e.class_iri),
                e.mention_ann_ids.len()
            );
        }
        md.push('\n');
    }

    let _ = writeln!(md, "## Candidates\n\n{} candidate classes.\n", contents.candidates.len());
    if !contents.candidates.is_empty() {
        md.push_str("| Term | Status | Genus | Parents | Evidence |\n|---|---|---|---|---|\n");
        for c in contents.candidates {
            let parents = if c.proposed_parents.is_empty() {
                c.placement.clone().unwrap_or_default()
            } else {
                c.proposed_parents.join(", ")
            };
            let _ = writeln!(
                md,
                "| {} | {:?} | {} | {} | {} {} |",
                cell(&c.term),
                c.status,
                cell(c.genus.as_deref().unwrap_or("-")),
                cell(&parents),
                c.evidence.doc_id,
                c.evidence.clause_number
            );
        }
        md.push('\n');
    }

    let resolved = contents.links.iter().filter(|l| l.resolved).count();
    let _ = writeln!(
        md,
        "## References\n\n{} references, {} resolved.\n",
        contents.links.len(),
        resolved
    );
    if !contents.links.is_empty() {
        md.push_str("| From | Span | Reference | Target |\n|---|---|---|---|\n");
        for l in contents.links {
            let target = match (&l.target_doc, l.resolved_via) {
                (Some(t), Some(via)) => format!("{t} ({via:?})"),
                _ => "unresolved".into(),
            };
            let _ = writeln!(md, "| {} | {} | {} | {} |", l.from_doc, l.span, cell(&l.target_ref), target);
        }
        md.push('\n');
    }
    md
}

/// In-memory bundle: relative path to file bytes, excluding the manifest.
pub fn render_bundle(contents: &BundleContents) -> Result<BTreeMap<String, Vec<u8>>, ReportError> {
    validate_cross_references(contents)?;
    let mut files = BTreeMap::new();
    files.insert("summary.md".to_owned(), summary_markdown(contents).into_bytes());
    files.insert("findings.json".to_owned(), to_json("findings.json", contents.findings)?);
    files.insert("findings.csv".to_owned(), findings_csv(contents.findings)?);
    files.insert("entities.json".to_owned(), to_json("entities.json", contents.entities)?);
    files.insert("candidates.json".to_owned(), to_json("candidates.json", contents.candidates)?);
    files.insert("references.json".to_owned(), to_json("references.json", contents.links)?);
    for (doc_id, set) in contents.annotations {
        let name = format!("annotations/{doc_id}.json");
        files.insert(name.clone(), to_json(&name, &StandoffFile::new(doc_id, set))?);
    }
    Ok(files)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), ReportError> {
    let io = |source| ReportError::Io {
        path: path.to_owned(),
        source,
    };
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io)?;
    }
    fs::write(path, bytes).map_err(io)
}

/// Writes the bundle into `out_dir` and returns its manifest, which is also
/// written as `manifest.json`.
pub fn emit_bundle(
    contents: &BundleContents,
    out_dir: &Path,
    options: EmitOptions,
) -> Result<BundleManifest, ReportError> {
    let files = render_bundle(contents)?;
    let mut entries = Vec::with_capacity(files.len());
    for (rel, bytes) in &files {
        write_file(&out_dir.join(rel), bytes)?;
        entries.push(ManifestEntry {
            path: rel.clone(),
            bytes: bytes.len() as u64,
            sha256: hex::encode(Sha256::digest(bytes)),
        });
    }
    let manifest = BundleManifest {
        corpus_id: contents.corpus.corpus_id.clone(),
        files: entries,
        generated_at_unix: options
            .timestamps
            .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())),
    };
    write_file(&out_dir.join("manifest.json"), &to_json("manifest.json", &manifest)?)?;
    Ok(manifest)
}

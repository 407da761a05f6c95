//! Normative documents, their clause structure and terms-and-definitions entries.
//!
//! Documents are plain UTF-8 text. A line of the form `<number> <heading>`
//! opens a clause, where `<number>` is dotted decimal (`3`, `3.1`, `3.1.5`) or
//! an annex form (`Annex A` opens clause `A`, `A.1 ...` its subclauses). Every
//! other line is body text of the innermost open clause.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::span::Span;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{doc_id}: document is not valid UTF-8 (invalid byte at offset {offset})")]
    Decode { doc_id: String, offset: usize },
    #[error("{doc_id}: document contains no text")]
    EmptyDocument { doc_id: String },
    #[error("document metadata field `{0}` is empty")]
    InvalidMetadata(&'static str),
    #[error("duplicate doc_id `{0}` in corpus")]
    DuplicateDocId(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: invalid manifest: {source}", path.display())]
    Manifest {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClauseKind {
    Scope,
    TermsAndDefinitions,
    Body,
    Annex,
    Bibliography,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    pub number: String,
    pub heading: String,
    pub span: Span,
    pub kind: ClauseKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Clause>,
}

impl Clause {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Pre-order walk over this clause and its descendants.
    pub fn walk(&self) -> impl Iterator<Item = &Clause> {
        let mut stack = vec![self];
        std::iter::from_fn(move || {
            let next = stack.pop()?;
            stack.extend(next.children.iter().rev());
            Some(next)
        })
    }

    /// Byte offset where the body starts (just past the heading line).
    pub fn body_start(&self, text: &str) -> usize {
        let slice = self.span.slice(text);
        match slice.find('\n') {
            Some(i) => self.span.start + i + 1,
            None => self.span.end,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub standard_ref: String,
    pub title: String,
    pub text: String,
    pub clauses: Vec<Clause>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub page_count_hint: Option<u32>,
}

impl Document {
    pub fn all_clauses(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().flat_map(|c| c.walk())
    }

    pub fn find_clause(&self, number: &str) -> Option<&Clause> {
        self.all_clauses().find(|c| c.number == number)
    }

    /// Innermost clause whose span contains `span`.
    pub fn clause_at(&self, span: Span) -> Option<&Clause> {
        let mut level = &self.clauses;
        let mut found = None;
        while let Some(c) = level.iter().find(|c| c.span.contains(&span)) {
            found = Some(c);
            level = &c.children;
        }
        found
    }

    /// Clause number for `span`, or the empty string when the span falls
    /// outside every clause (front matter before the first heading).
    pub fn clause_number_at(&self, span: Span) -> String {
        self.clause_at(span)
            .map(|c| c.number.clone())
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermEntry {
    pub term: String,
    pub definition: String,
    pub clause_number: String,
    pub doc_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adapted_from: Option<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub corpus_id: String,
    pub documents: Vec<Document>,
}

impl Corpus {
    pub fn new(corpus_id: impl Into<String>, documents: Vec<Document>) -> Result<Self, CorpusError> {
        let mut seen = BTreeSet::new();
        for d in &documents {
            if !seen.insert(d.doc_id.as_str()) {
                return Err(CorpusError::DuplicateDocId(d.doc_id.clone()));
            }
        }
        Ok(Corpus {
            corpus_id: corpus_id.into(),
            documents,
        })
    }

    pub fn document(&self, doc_id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.doc_id == doc_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentMeta {
    pub doc_id: String,
    pub standard_ref: String,
    pub title: String,
}

pub fn ingest_document(raw: &[u8], meta: &DocumentMeta) -> Result<Document, CorpusError> {
    if meta.doc_id.trim().is_empty() {
        return Err(CorpusError::InvalidMetadata("doc_id"));
    }
    if meta.standard_ref.trim().is_empty() {
        return Err(CorpusError::InvalidMetadata("standard_ref"));
    }
    if meta.title.trim().is_empty() {
        return Err(CorpusError::InvalidMetadata("title"));
    }
    let raw = raw.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(raw);
    let decoded = std::str::from_utf8(raw).map_err(|e| CorpusError::Decode {
        doc_id: meta.doc_id.clone(),
        offset: e.valid_up_to(),
    })?;
    if decoded.trim().is_empty() {
        return Err(CorpusError::EmptyDocument {
            doc_id: meta.doc_id.clone(),
        });
    }
    let text = normalize_line_endings(decoded);
    let clauses = parse_clauses(&text);
    Ok(Document {
        doc_id: meta.doc_id.clone(),
        standard_ref: meta.standard_ref.clone(),
        title: meta.title.clone(),
        text,
        clauses,
        page_count_hint: None,
    })
}

fn normalize_line_endings(s: &str) -> String {
    if !s.contains('\r') {
        return s.to_owned();
    }
    s.replace("\r\n", "\n").replace('\r', "\n")
}

fn numbered_heading_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"^((?:\d{1,3}|[A-Z])(?:\.\d{1,3})*)[ \t]+(\p{L}[^\n]*?)[ \t]*$").unwrap()
    })
}

fn annex_heading_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^Annex[ \t]+([A-Z])(?:[ \t]+([^\n]*?))?[ \t]*$").unwrap())
}

/// Recognizes a heading line, returning `(number, heading)`.
///
/// A bare annex letter (`A heading`) is not a heading; annexes open with
/// `Annex A` and only their subclauses use the `A.1` form.
pub fn parse_heading_line(line: &str) -> Option<(String, String)> {
    if let Some(c) = annex_heading_re().captures(line) {
        let letter = c[1].to_owned();
        let heading = c
            .get(2)
            .map(|m| m.as_str().trim().to_owned())
            .filter(|h| !h.is_empty())
            .unwrap_or_else(|| format!("Annex {letter}"));
        return Some((letter, heading));
    }
    let c = numbered_heading_re().captures(line)?;
    let number = &c[1];
    if number.len() == 1 && number.as_bytes()[0].is_ascii_uppercase() {
        return None;
    }
    let heading = c[2].trim();
    if heading.ends_with(['.', ',', ';', ':']) {
        return None;
    }
    Some((number.to_owned(), heading.to_owned()))
}

fn kind_for_heading(heading: &str) -> ClauseKind {
    let h = heading.trim().to_lowercase();
    match h.as_str() {
        "scope" => ClauseKind::Scope,
        "terms and definitions" | "terms, definitions and abbreviated terms" => {
            ClauseKind::TermsAndDefinitions
        }
        "bibliography" => ClauseKind::Bibliography,
        _ => ClauseKind::Body,
    }
}

fn is_descendant_number(child: &str, parent: &str) -> bool {
    child.len() > parent.len() + 1
        && child.starts_with(parent)
        && child.as_bytes()[parent.len()] == b'.'
}

/// Builds the clause tree of `text`. Deterministic and total: text that
/// contains no heading line becomes a single `Unknown` clause numbered `0`.
pub fn parse_clauses(text: &str) -> Vec<Clause> {
    struct Open {
        clause: Clause,
    }

    fn close(stack: &mut Vec<Open>, roots: &mut Vec<Clause>, end: usize) {
        let mut open = stack.pop().expect("close on empty stack");
        open.clause.span.end = end;
        match stack.last_mut() {
            Some(parent) => parent.clause.children.push(open.clause),
            None => roots.push(open.clause),
        }
    }

    let mut roots: Vec<Clause> = Vec::new();
    let mut stack: Vec<Open> = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let start = offset;
        offset += line.len();
        let Some((number, heading)) = parse_heading_line(line.trim_end_matches('\n')) else {
            continue;
        };
        while let Some(top) = stack.last() {
            if is_descendant_number(&number, &top.clause.number) {
                break;
            }
            close(&mut stack, &mut roots, start);
        }
        let annex_line = annex_heading_re().is_match(line.trim_end_matches('\n'));
        let kind = match stack.last() {
            _ if annex_line => ClauseKind::Annex,
            Some(parent) if parent.clause.kind == ClauseKind::Annex => ClauseKind::Annex,
            _ => kind_for_heading(&heading),
        };
        stack.push(Open {
            clause: Clause {
                number,
                heading,
                span: Span::new(start, start),
                kind,
                children: Vec::new(),
            },
        });
    }
    while !stack.is_empty() {
        close(&mut stack, &mut roots, text.len());
    }
    if roots.is_empty() && !text.is_empty() {
        roots.push(Clause {
            number: "0".to_owned(),
            heading: String::new(),
            span: Span::new(0, text.len()),
            kind: ClauseKind::Unknown,
            children: Vec::new(),
        });
    }
    roots
}

fn adapted_bracket_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\[\s*adapted\s+from\s+([^\]\n]+?)\s*\]").unwrap())
}

fn adapted_plain_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\badapted\s+from\s+([^\]\n]+)").unwrap())
}

/// Source reference of an `adapted from <ref>` marker, bracketed or not.
pub fn detect_adapted_from(definition: &str) -> Option<String> {
    if let Some(c) = adapted_bracket_re().captures(definition) {
        return Some(c[1].trim().to_owned());
    }
    let c = adapted_plain_re().captures(definition)?;
    let r = c[1].trim().trim_end_matches(['.', ',', ';', ')']).trim();
    (!r.is_empty()).then(|| r.to_owned())
}

/// One entry per leaf clause below a terms-and-definitions clause, in
/// document order. Leaves with an empty body are skipped.
pub fn extract_term_entries(doc: &Document) -> Vec<TermEntry> {
    let mut out = Vec::new();
    for terms in doc
        .all_clauses()
        .filter(|c| c.kind == ClauseKind::TermsAndDefinitions)
    {
        for leaf in terms.children.iter().flat_map(|c| c.walk()).filter(|c| c.is_leaf()) {
            let body = &doc.text[leaf.body_start(&doc.text)..leaf.span.end];
            let definition = body.trim();
            if definition.is_empty() || leaf.heading.is_empty() {
                continue;
            }
            out.push(TermEntry {
                term: leaf.heading.clone(),
                definition: definition.to_owned(),
                clause_number: leaf.number.clone(),
                doc_id: doc.doc_id.clone(),
                adapted_from: detect_adapted_from(definition),
                span: leaf.span,
            });
        }
    }
    out
}

/// Orders clause numbers component-wise: numeric parts numerically, annex
/// letters after all numbered clauses.
pub fn compare_clause_numbers(a: &str, b: &str) -> Ordering {
    let mut ai = a.split('.');
    let mut bi = b.split('.');
    loop {
        match (ai.next(), bi.next()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) => {
                let ord = match (x.parse::<u64>(), y.parse::<u64>()) {
                    (Ok(x), Ok(y)) => x.cmp(&y),
                    (Ok(_), Err(_)) => Ordering::Less,
                    (Err(_), Ok(_)) => Ordering::Greater,
                    (Err(_), Err(_)) => x.cmp(y),
                };
                if ord != Ordering::Equal {
                    return ord;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestDocument {
    pub doc_id: String,
    pub standard_ref: String,
    pub title: String,
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub page_count_hint: Option<u32>,
}

/// Corpus manifest. Relative paths resolve against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub corpus_id: String,
    pub documents: Vec<ManifestDocument>,
    /// Optional registry of known standards shipped alongside the corpus.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub registry: Option<PathBuf>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// A document that could not be ingested. Other documents are unaffected.
#[derive(Debug)]
pub struct DocumentFailure {
    pub doc_id: String,
    pub error: CorpusError,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Manifest, CorpusError> {
        let raw = fs::read(path).map_err(|source| CorpusError::Io {
            path: path.to_owned(),
            source,
        })?;
        let mut manifest: Manifest =
            serde_json::from_slice(&raw).map_err(|source| CorpusError::Manifest {
                path: path.to_owned(),
                source,
            })?;
        manifest.base_dir = path.parent().map(Path::to_owned).unwrap_or_default();
        let mut seen = BTreeSet::new();
        for d in &manifest.documents {
            if !seen.insert(d.doc_id.as_str()) {
                return Err(CorpusError::DuplicateDocId(d.doc_id.clone()));
            }
        }
        Ok(manifest)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_owned()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn registry_path(&self) -> Option<PathBuf> {
        self.registry.as_deref().map(|p| self.resolve(p))
    }

    /// Ingests every listed document. Failed documents are reported
    /// separately and left out of the corpus.
    pub fn load_corpus(&self) -> (Corpus, Vec<DocumentFailure>) {
        let results: Vec<Result<Document, DocumentFailure>> = self
            .documents
            .par_iter()
            .map(|entry| {
                let path = self.resolve(&entry.path);
                let fail = |error| DocumentFailure {
                    doc_id: entry.doc_id.clone(),
                    error,
                };
                let raw = fs::read(&path).map_err(|source| fail(CorpusError::Io { path, source }))?;
                let meta = DocumentMeta {
                    doc_id: entry.doc_id.clone(),
                    standard_ref: entry.standard_ref.clone(),
                    title: entry.title.clone(),
                };
                let mut doc = ingest_document(&raw, &meta).map_err(fail)?;
                doc.page_count_hint = entry.page_count_hint;
                Ok(doc)
            })
            .collect();
        let mut documents = Vec::new();
        let mut failures = Vec::new();
        for r in results {
            match r {
                Ok(d) => documents.push(d),
                Err(f) => failures.push(f),
            }
        }
        let corpus = Corpus {
            corpus_id: self.corpus_id.clone(),
            documents,
        };
        (corpus, failures)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> DocumentMeta {
        DocumentMeta {
            doc_id: "p44".into(),
            standard_ref: "ISO 15531-44".into(),
            title: "Shop floor data acquisition".into(),
        }
    }

    #[test]
    fn whitespace_only_is_empty_document() {
        assert!(matches!(
            ingest_document(b"  \n\t ", &meta()),
            Err(CorpusError::EmptyDocument { .. })
        ));
        assert!(matches!(
            ingest_document(b"", &meta()),
            Err(CorpusError::EmptyDocument { .. })
        ));
    }

    #[test]
    fn invalid_utf8_is_decode_error() {
        assert!(matches!(
            ingest_document(&[0xFF, 0xFE, b'a', b'b'], &meta()),
            Err(CorpusError::Decode { offset: 0, .. })
        ));
    }

    #[test]
    fn empty_metadata_is_rejected() {
        let mut m = meta();
        m.title = " ".into();
        assert!(matches!(
            ingest_document(b"1 Scope\n", &m),
            Err(CorpusError::InvalidMetadata("title"))
        ));
    }

    #[test]
    fn bom_and_crlf_are_normalized() {
        let doc = ingest_document(b"\xEF\xBB\xBF1 Scope\r\nText here.\rMore\n", &meta()).unwrap();
        assert_eq!(doc.text, "1 Scope\nText here.\nMore\n");
        assert_eq!(doc.clauses.len(), 1);
        assert_eq!(doc.clauses[0].span, Span::new(0, doc.text.len()));
    }

    #[test]
    fn nested_clause_tree() {
        let text = "1 Scope\nThis part covers things.\n3 Terms and definitions\n3.1 flow control\ncontrol of a flow\n";
        let clauses = parse_clauses(text);
        assert_eq!(clauses.len(), 2);
        assert_eq!(clauses[0].number, "1");
        assert_eq!(clauses[0].kind, ClauseKind::Scope);
        assert_eq!(clauses[1].number, "3");
        assert_eq!(clauses[1].kind, ClauseKind::TermsAndDefinitions);
        assert_eq!(clauses[1].children.len(), 1);
        let child = &clauses[1].children[0];
        assert_eq!(child.number, "3.1");
        assert_eq!(child.heading, "flow control");
        assert_eq!(child.kind, ClauseKind::Body);
        assert_eq!(clauses[0].span, Span::new(0, 33));
        assert_eq!(child.span.end, text.len());
    }

    #[test]
    fn no_headings_gives_single_unknown_root() {
        let text = "just some prose\nwithout any structure\n";
        let clauses = parse_clauses(text);
        assert_eq!(clauses.len(), 1);
        assert_eq!(clauses[0].kind, ClauseKind::Unknown);
        assert_eq!(clauses[0].span, Span::new(0, text.len()));
        assert!(parse_clauses("").is_empty());
    }

    #[test]
    fn annex_heading() {
        let text = "1 Scope\nx\nAnnex A (informative) Usage examples\nbody\nA.1 First example\nmore\n";
        let clauses = parse_clauses(text);
        assert_eq!(clauses.len(), 2);
        let annex = &clauses[1];
        assert_eq!(annex.number, "A");
        assert_eq!(annex.kind, ClauseKind::Annex);
        assert_eq!(annex.heading, "(informative) Usage examples");
        assert_eq!(annex.children[0].number, "A.1");
        assert_eq!(annex.children[0].kind, ClauseKind::Annex);
        let bare = parse_clauses("Annex B\ntext\n");
        assert_eq!(bare[0].number, "B");
        assert_eq!(bare[0].heading, "Annex B");
    }

    #[test]
    fn heading_line_rejections() {
        assert_eq!(parse_heading_line("15531 is a standard"), None);
        assert_eq!(parse_heading_line("A resource is a thing"), None);
        assert_eq!(parse_heading_line("2 items are listed below."), None);
        assert_eq!(parse_heading_line(" 1 Scope"), None);
        assert_eq!(
            parse_heading_line("3.1.5 flow control"),
            Some(("3.1.5".into(), "flow control".into()))
        );
    }

    #[test]
    fn orphan_subclause_becomes_root() {
        let clauses = parse_clauses("2.1 Orphan\ntext\n3 Next\n");
        assert_eq!(clauses.len(), 2);
        assert_eq!(clauses[0].number, "2.1");
    }

    #[test]
    fn term_entries_and_adaptation() {
        let text = "1 Scope\nx\n3 Terms and definitions\n3.1 Terms\n3.1.5 flow control\ncontrol exercised over a manufacturing flow\n3.1.6 basic semantic register\nregister of data element concepts\n[adapted from ISO/TS 16668]\n3.1.7 empty\n4 Other\ny\n";
        let doc = ingest_document(text.as_bytes(), &meta()).unwrap();
        let entries = extract_term_entries(&doc);
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].term, "flow control");
        assert_eq!(entries[0].definition, "control exercised over a manufacturing flow");
        assert_eq!(entries[0].clause_number, "3.1.5");
        assert_eq!(entries[0].adapted_from, None);
        assert_eq!(entries[1].adapted_from.as_deref(), Some("ISO/TS 16668"));
        let terms_clause = doc.find_clause("3").unwrap();
        for e in &entries {
            assert!(terms_clause.span.contains(&e.span));
            assert!(e.span.slice(&doc.text).starts_with(&format!("{} {}", e.clause_number, e.term)));
        }
    }

    #[test]
    fn adapted_from_forms() {
        assert_eq!(detect_adapted_from("x. Adapted from ISO 1087-1.").as_deref(), Some("ISO 1087-1"));
        assert_eq!(detect_adapted_from("x [ADAPTED FROM IEC 60050]").as_deref(), Some("IEC 60050"));
        assert_eq!(detect_adapted_from("nothing here"), None);
    }

    #[test]
    fn no_terms_clause_gives_no_entries() {
        let doc = ingest_document(b"1 Scope\nx\n2 Body\ny\n", &meta()).unwrap();
        assert!(extract_term_entries(&doc).is_empty());
    }

    #[test]
    fn clause_number_ordering() {
        let mut v = vec!["3.10", "A", "3.2", "10", "3", "A.1", "3.2.1"];
        v.sort_by(|a, b| compare_clause_numbers(a, b));
        assert_eq!(v, vec!["3", "3.2", "3.2.1", "3.10", "10", "A", "A.1"]);
    }

    #[test]
    fn clause_lookup_by_span() {
        let text = "1 Scope\nx\n3 Terms and definitions\n3.1 flow control\ncontrol of a flow\n";
        let doc = ingest_document(text.as_bytes(), &meta()).unwrap();
        let pos = text.find("control of").unwrap();
        assert_eq!(doc.clause_number_at(Span::new(pos, pos + 7)), "3.1");
        assert_eq!(doc.clause_number_at(Span::new(0, 1)), "1");
    }
}

//! Cross-document consistency checks over terms, annotations and links.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotate::{tokenize, AnnotationSet, TokenKind, MENTION};
use crate::corpus::{Corpus, TermEntry};
use crate::extract::ReferenceLink;
use crate::ontology::LabelIndex;
use crate::populate::{CandidateClass, CandidateStatus};
use crate::span::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FindingKind {
    DuplicateDefinition,
    DivergentDefinition,
    AdaptedDefinition,
    DanglingReference,
    CaseAmbiguity,
    TitleContentMismatch,
    MultiParentWarning,
}

impl FindingKind {
    pub const ALL: [FindingKind; 7] = [
        FindingKind::DuplicateDefinition,
        FindingKind::DivergentDefinition,
        FindingKind::AdaptedDefinition,
        FindingKind::DanglingReference,
        FindingKind::CaseAmbiguity,
        FindingKind::TitleContentMismatch,
        FindingKind::MultiParentWarning,
    ];

    pub fn severity(self) -> Severity {
        match self {
            FindingKind::DuplicateDefinition => Severity::Warning,
            FindingKind::DivergentDefinition => Severity::Error,
            FindingKind::AdaptedDefinition => Severity::Info,
            FindingKind::DanglingReference => Severity::Warning,
            FindingKind::CaseAmbiguity => Severity::Info,
            FindingKind::TitleContentMismatch => Severity::Error,
            FindingKind::MultiParentWarning => Severity::Warning,
        }
    }
}

impl fmt::Display for FindingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Severity {
    Info,
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Location {
    pub doc_id: String,
    pub clause_number: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyFinding {
    pub kind: FindingKind,
    pub severity: Severity,
    pub locations: Vec<Location>,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similarity: Option<f64>,
}

impl ConsistencyFinding {
    fn new(kind: FindingKind, locations: Vec<Location>, detail: String) -> Self {
        debug_assert!(!locations.is_empty());
        ConsistencyFinding {
            kind,
            severity: kind.severity(),
            locations,
            detail,
            similarity: None,
        }
    }

    pub fn primary(&self) -> &Location {
        &self.locations[0]
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("duplicate similarity threshold must be in (0, 1], got {0}")]
    Threshold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckerConfig {
    pub duplicate_similarity_threshold: f64,
    pub case_ambiguity_min_count: usize,
}

impl Default for CheckerConfig {
    fn default() -> Self {
        CheckerConfig {
            duplicate_similarity_threshold: 0.95,
            case_ambiguity_min_count: 1,
        }
    }
}

impl CheckerConfig {
    pub fn with_threshold(threshold: f64) -> Result<Self, ConfigError> {
        let c = CheckerConfig {
            duplicate_similarity_threshold: threshold,
            ..CheckerConfig::default()
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let t = self.duplicate_similarity_threshold;
        if t > 0.0 && t <= 1.0 {
            Ok(())
        } else {
            Err(ConfigError::Threshold(t))
        }
    }
}

fn word_set(s: &str) -> BTreeSet<String> {
    tokenize(s)
        .into_iter()
        .filter(|t| matches!(t.kind, TokenKind::Word | TokenKind::Number))
        .map(|t| t.surface.to_lowercase())
        .collect()
}

/// Jaccard similarity of the case-folded word and number tokens. Two
/// strings without any such token are identical (1.0); one empty side
/// gives 0.0.
pub fn definition_similarity(a: &str, b: &str) -> f64 {
    let (sa, sb) = (word_set(a), word_set(b));
    if sa.is_empty() && sb.is_empty() {
        return 1.0;
    }
    let inter = sa.intersection(&sb).count();
    let union = sa.len() + sb.len() - inter;
    inter as f64 / union as f64
}

fn fold_term(t: &str) -> String {
    t.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

fn entry_location(e: &TermEntry) -> Location {
    Location {
        doc_id: e.doc_id.clone(),
        clause_number: e.clause_number.clone(),
        span: e.span,
    }
}

/// Terms defined in two or more clauses. Each such group yields one finding,
/// a duplicate when the least similar pair still reaches the threshold and a
/// divergence otherwise.
pub fn check_duplicate_definitions(entries: &[TermEntry], config: &CheckerConfig) -> Vec<ConsistencyFinding> {
    let mut groups: BTreeMap<String, Vec<&TermEntry>> = BTreeMap::new();
    for e in entries {
        groups.entry(fold_term(&e.term)).or_default().push(e);
    }
    let mut out = Vec::new();
    for (term, group) in groups {
        if group.len() < 2 {
            continue;
        }
        let mut min_sim = 1.0f64;
        for (i, a) in group.iter().enumerate() {
            for b in &group[i + 1..] {
                min_sim = min_sim.min(definition_similarity(&a.definition, &b.definition));
            }
        }
        let kind = if min_sim >= config.duplicate_similarity_threshold {
            FindingKind::DuplicateDefinition
        } else {
            FindingKind::DivergentDefinition
        };
        let mut locations: Vec<Location> = group.iter().map(|e| entry_location(e)).collect();
        locations.sort();
        let places: Vec<String> = locations
            .iter()
            .map(|l| format!("{} {}", l.doc_id, l.clause_number))
            .collect();
        let detail = format!(
            "\"{term}\" is defined {} times ({}); minimum similarity {:.3}",
            group.len(),
            places.join(", "),
            min_sim
        );
        let mut f = ConsistencyFinding::new(kind, locations, detail);
        f.similarity = Some(min_sim);
        out.push(f);
    }
    out
}

pub fn check_adapted_definitions(entries: &[TermEntry]) -> Vec<ConsistencyFinding> {
    entries
        .iter()
        .filter_map(|e| {
            let src = e.adapted_from.as_ref()?;
            Some(ConsistencyFinding::new(
                FindingKind::AdaptedDefinition,
                vec![entry_location(e)],
                format!("\"{}\" is adapted from {src}; the degree of adaptation is not stated", e.term),
            ))
        })
        .collect()
}

/// For every single-word acronym label, the lowercase form used as an
/// ordinary word elsewhere in the corpus ("IS" vs the verb "is").
pub fn check_case_ambiguity(
    corpus: &Corpus,
    annotations: &BTreeMap<String, AnnotationSet>,
    index: &LabelIndex,
    config: &CheckerConfig,
) -> Vec<ConsistencyFinding> {
    let acronyms = index.single_word_acronyms();
    if acronyms.is_empty() {
        return Vec::new();
    }
    let lowered: BTreeMap<String, &str> = acronyms
        .iter()
        .map(|a| (a.to_lowercase(), a.as_str()))
        .filter(|(l, a)| l != a)
        .collect();
    let mut lower_hits: BTreeMap<&str, Vec<Location>> = BTreeMap::new();
    let mut acronym_hits: BTreeMap<&str, Vec<Location>> = BTreeMap::new();
    for doc in &corpus.documents {
        for t in tokenize(&doc.text) {
            if t.kind != TokenKind::Word {
                continue;
            }
            if let Some(acr) = lowered.get(&t.surface) {
                lower_hits.entry(acr).or_default().push(Location {
                    doc_id: doc.doc_id.clone(),
                    clause_number: doc.clause_number_at(t.span),
                    span: t.span,
                });
            }
        }
        let Some(set) = annotations.get(&doc.doc_id) else {
            continue;
        };
        for m in set.of_type(MENTION) {
            if let Some(label) = m.feature("matched_label") {
                if let Some(acr) = acronyms.get(label) {
                    acronym_hits.entry(acr.as_str()).or_default().push(Location {
                        doc_id: doc.doc_id.clone(),
                        clause_number: doc.clause_number_at(m.span),
                        span: m.span,
                    });
                }
            }
        }
    }
    let mut out = Vec::new();
    for (acr, lower) in lower_hits {
        if lower.len() < config.case_ambiguity_min_count.max(1) {
            continue;
        }
        let acr_locs = acronym_hits.remove(acr).unwrap_or_default();
        let detail = format!(
            "acronym \"{acr}\" ({} annotated) also occurs as the ordinary word \"{}\" ({} times)",
            acr_locs.len(),
            acr.to_lowercase(),
            lower.len()
        );
        let mut locations: Vec<Location> = acr_locs.into_iter().chain(lower).collect();
        locations.sort();
        out.push(ConsistencyFinding::new(FindingKind::CaseAmbiguity, locations, detail));
    }
    out
}

fn lead_in_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[ \t]*([\p{L}\p{N}_-]+(?:[ \t]+[\p{L}\p{N}_-]+)*)[ \t]*:").unwrap())
}

fn first_sentence(s: &str) -> &str {
    let end = s.find('\n').unwrap_or(s.len());
    let line = &s[..end];
    match line.find(". ") {
        Some(i) => &line[..=i],
        None => line,
    }
}

/// Definitions that open with `<term>:` naming a different term than the
/// clause heading.
pub fn check_title_content_mismatch(entries: &[TermEntry]) -> Vec<ConsistencyFinding> {
    entries
        .iter()
        .filter_map(|e| {
            let c = lead_in_re().captures(first_sentence(&e.definition))?;
            let lead = c[1].trim();
            if fold_term(lead) == fold_term(&e.term) {
                return None;
            }
            Some(ConsistencyFinding::new(
                FindingKind::TitleContentMismatch,
                vec![entry_location(e)],
                format!("clause heading \"{}\" but the definition introduces \"{lead}\"", e.term),
            ))
        })
        .collect()
}

pub fn check_dangling_references(corpus: &Corpus, links: &[ReferenceLink]) -> Vec<ConsistencyFinding> {
    links
        .iter()
        .filter(|l| !l.resolved)
        .map(|l| {
            let clause = corpus
                .document(&l.from_doc)
                .map(|d| d.clause_number_at(l.span))
                .unwrap_or_default();
            ConsistencyFinding::new(
                FindingKind::DanglingReference,
                vec![Location {
                    doc_id: l.from_doc.clone(),
                    clause_number: clause,
                    span: l.span,
                }],
                format!("{} is neither in the corpus nor in the registry", l.target_ref),
            )
        })
        .collect()
}

pub fn check_multi_parent_candidates(candidates: &[CandidateClass]) -> Vec<ConsistencyFinding> {
    candidates
        .iter()
        .filter(|c| c.status == CandidateStatus::Ambiguous)
        .map(|c| {
            ConsistencyFinding::new(
                FindingKind::MultiParentWarning,
                vec![Location {
                    doc_id: c.evidence.doc_id.clone(),
                    clause_number: c.evidence.clause_number.clone(),
                    span: c.evidence.span,
                }],
                format!(
                    "\"{}\" fits {} places: {}",
                    c.term,
                    c.proposed_parents.len(),
                    c.proposed_parents.join(", ")
                ),
            )
        })
        .collect()
}

pub struct CheckInputs<'a> {
    pub corpus: &'a Corpus,
    pub annotations: &'a BTreeMap<String, AnnotationSet>,
    pub term_entries: &'a [TermEntry],
    pub links: &'a [ReferenceLink],
    pub candidates: &'a [CandidateClass],
    pub index: &'a LabelIndex,
}

/// Runs every check; findings are ordered by (doc_id, start, kind).
pub fn run_all_checks(inputs: &CheckInputs, config: &CheckerConfig) -> Vec<ConsistencyFinding> {
    let mut all = Vec::new();
    all.extend(check_duplicate_definitions(inputs.term_entries, config));
    all.extend(check_adapted_definitions(inputs.term_entries));
    all.extend(check_case_ambiguity(inputs.corpus, inputs.annotations, inputs.index, config));
    all.extend(check_title_content_mismatch(inputs.term_entries));
    all.extend(check_dangling_references(inputs.corpus, inputs.links));
    all.extend(check_multi_parent_candidates(inputs.candidates));
    sort_findings(&mut all);
    all
}

pub fn sort_findings(findings: &mut [ConsistencyFinding]) {
    findings.sort_by(|a, b| {
        let (pa, pb) = (a.primary(), b.primary());
        (&pa.doc_id, pa.span.start, a.kind, &a.locations, &a.detail)
            .cmp(&(&pb.doc_id, pb.span.start, b.kind, &b.locations, &b.detail))
    });
}

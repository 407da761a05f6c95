//! Candidate ontology classes proposed from terms-and-definitions entries.
//!
//! Candidates are written for review and never merged into a model.

use serde::{Deserialize, Serialize};

use crate::annotate::{content_tokens, TokenKind};
use crate::corpus::{compare_clause_numbers, TermEntry};
use crate::ontology::LabelIndex;
use crate::span::Span;

/// Placement for candidates whose genus matches no existing class.
pub const CANDIDATE_ROOT: &str = "CandidateConcept";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CandidateStatus {
    New,
    MatchesExisting,
    Ambiguous,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub doc_id: String,
    pub clause_number: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateClass {
    pub term: String,
    pub proposed_parents: Vec<String>,
    pub evidence: Evidence,
    pub genus: Option<String>,
    pub status: CandidateStatus,
    /// Set to [`CANDIDATE_ROOT`] when there is no proposed parent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placement: Option<String>,
}

const DETERMINERS: [&str; 3] = ["a", "an", "the"];
const COPULAS: [&str; 2] = ["is", "means"];
const GENUS_STOPS: [&str; 4] = ["that", "which", "of", "for"];

/// Head noun phrase of a definition, lowercased.
///
/// A leading `<term> is|means` copula is skipped, then leading determiners;
/// the genus is the run of words up to the first of `that`, `which`, `of`,
/// `for` or any non-word token.
pub fn extract_genus(definition: &str) -> Option<String> {
    let tokens = content_tokens(definition);
    let lower: Vec<String> = tokens.iter().map(|t| t.surface.to_lowercase()).collect();
    let mut i = 0;

    let copula = tokens.iter().enumerate().find_map(|(k, t)| {
        if t.kind != TokenKind::Word || GENUS_STOPS.contains(&lower[k].as_str()) {
            return Some(None);
        }
        COPULAS.contains(&lower[k].as_str()).then_some(Some(k))
    });
    if let Some(Some(k)) = copula {
        if k > 0 {
            i = k + 1;
        }
    }
    while i < tokens.len() && tokens[i].kind == TokenKind::Word && DETERMINERS.contains(&lower[i].as_str()) {
        i += 1;
    }
    let mut words = Vec::new();
    while i < tokens.len() && tokens[i].kind == TokenKind::Word && !GENUS_STOPS.contains(&lower[i].as_str()) {
        words.push(lower[i].as_str());
        i += 1;
    }
    (!words.is_empty()).then(|| words.join(" "))
}

fn evidence(e: &TermEntry) -> Evidence {
    Evidence {
        doc_id: e.doc_id.clone(),
        clause_number: e.clause_number.clone(),
        span: e.span,
    }
}

fn distinct_iris(hits: Vec<&crate::ontology::LabelHit>) -> Vec<String> {
    let mut iris: Vec<String> = hits.into_iter().map(|h| h.iri.clone()).collect();
    iris.sort();
    iris.dedup();
    iris
}

/// Places each term entry relative to the indexed ontologies.
///
/// A term that is already a class label matches that class; a term
/// labelling several classes is ambiguous. Otherwise the genus decides:
/// no hit places the candidate under [`CANDIDATE_ROOT`], one hit under that
/// class, several hits list every placement as ambiguous.
pub fn propose_candidates(entries: &[TermEntry], index: &LabelIndex) -> Vec<CandidateClass> {
    let mut out: Vec<CandidateClass> = entries
        .iter()
        .map(|e| {
            let genus = extract_genus(&e.definition);
            let term_iris = distinct_iris(index.lookup_text(&e.term));
            let (status, parents) = match term_iris.len() {
                1 => (CandidateStatus::MatchesExisting, term_iris),
                n if n >= 2 => (CandidateStatus::Ambiguous, term_iris),
                _ => {
                    let genus_iris = genus
                        .as_deref()
                        .map(|g| distinct_iris(index.lookup_text(g)))
                        .unwrap_or_default();
                    if genus_iris.len() >= 2 {
                        (CandidateStatus::Ambiguous, genus_iris)
                    } else {
                        (CandidateStatus::New, genus_iris)
                    }
                }
            };
            CandidateClass {
                term: e.term.clone(),
                placement: parents.is_empty().then(|| CANDIDATE_ROOT.to_owned()),
                proposed_parents: parents,
                evidence: evidence(e),
                genus,
                status,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        a.evidence
            .doc_id
            .cmp(&b.evidence.doc_id)
            .then_with(|| compare_clause_numbers(&a.evidence.clause_number, &b.evidence.clause_number))
            .then_with(|| a.evidence.span.cmp(&b.evidence.span))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::parse_native;

    #[test]
    fn genus_examples() {
        assert_eq!(extract_genus("set of information about a resource").as_deref(), Some("set"));
        assert_eq!(extract_genus(""), None);
        assert_eq!(extract_genus("a resource that is not yet allocated").as_deref(), Some("resource"));
    }

    #[test]
    fn genus_copula_and_punctuation() {
        assert_eq!(
            extract_genus("flow control means control exercised over a flow").as_deref(),
            Some("control exercised over a flow")
        );
        assert_eq!(extract_genus("The Time Domain, as used here").as_deref(), Some("time domain"));
        assert_eq!(extract_genus("resource status: availability").as_deref(), Some("resource status"));
        assert_eq!(extract_genus("42 things"), None);
    }

    fn index() -> LabelIndex {
        let a = parse_native(
            r#"{"ontology_id":"iso15531","iri_base":"http://x/m#","domain_category":"DomainSpecific",
               "classes":[{"iri":"Resource","primary_label":"resource"},{"iri":"Part","primary_label":"part"}]}"#,
        )
        .unwrap()
        .model;
        let b = parse_native(
            r#"{"ontology_id":"tech","iri_base":"http://x/t#","domain_category":"ExternalTechnical",
               "classes":[{"iri":"SparePart","primary_label":"part","alt_labels":["spare part"]}]}"#,
        )
        .unwrap()
        .model;
        LabelIndex::build([&a, &b])
    }

    fn entry(term: &str, def: &str, clause: &str) -> TermEntry {
        TermEntry {
            term: term.into(),
            definition: def.into(),
            clause_number: clause.into(),
            doc_id: "p31".into(),
            adapted_from: None,
            span: Span::new(0, 1),
        }
    }

    #[test]
    fn placement_cases() {
        let idx = index();
        let c = propose_candidates(
            &[
                entry("individual resource", "resource that is identified individually", "3.1.10"),
                entry("part", "one of the documents of a multi-part standard", "3.1.2"),
                entry("resource", "anything used in manufacturing", "3.1.1"),
                entry("flux", "quantity that flows", "3.1.3"),
            ],
            &idx,
        );
        let by_term = |t: &str| c.iter().find(|x| x.term == t).unwrap();
        let ir = by_term("individual resource");
        assert_eq!(ir.status, CandidateStatus::New);
        assert_eq!(ir.proposed_parents, vec!["http://x/m#Resource".to_owned()]);
        let p = by_term("part");
        assert_eq!(p.status, CandidateStatus::Ambiguous);
        assert_eq!(p.proposed_parents.len(), 2);
        assert_eq!(by_term("resource").status, CandidateStatus::MatchesExisting);
        let f = by_term("flux");
        assert_eq!(f.status, CandidateStatus::New);
        assert!(f.proposed_parents.is_empty());
        assert_eq!(f.placement.as_deref(), Some(CANDIDATE_ROOT));
        let clauses: Vec<&str> = c.iter().map(|x| x.evidence.clause_number.as_str()).collect();
        assert_eq!(clauses, vec!["3.1.1", "3.1.2", "3.1.3", "3.1.10"]);
    }

    #[test]
    fn ambiguous_genus_lists_every_parent() {
        let c = propose_candidates(&[entry("fascicle", "part of something", "3.1")], &index());
        // genus stops at "of"
        assert_eq!(c[0].genus.as_deref(), Some("part"));
        assert_eq!(c[0].status, CandidateStatus::Ambiguous);
        assert_eq!(c[0].proposed_parents.len(), 2);
    }
}

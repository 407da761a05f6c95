use std::collections::BTreeMap;

use super::{content_tokens, AnnotationSet, AnnotationSource, Token, MENTION};
use crate::corpus::Document;
use crate::ontology::{LabelHit, LabelIndex};
use crate::span::Span;

/// A label match over content tokens `[first, last)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GazetteerMatch<'a> {
    pub first: usize,
    pub last: usize,
    pub span: Span,
    pub hit: &'a LabelHit,
}

/// Label matches kept after leftmost-longest selection, done separately for
/// each ontology so that different ontologies may annotate overlapping text.
pub fn gazetteer_matches<'a>(tokens: &[Token], index: &'a LabelIndex) -> Vec<GazetteerMatch<'a>> {
    let max_len = index.max_label_len();
    // ontology -> start token -> (longest end, hits at that span)
    let mut by_ontology: BTreeMap<&str, BTreeMap<usize, (usize, Vec<&LabelHit>)>> = BTreeMap::new();
    let surfaces: Vec<&str> = tokens.iter().map(|t| t.surface.as_str()).collect();
    for first in 0..tokens.len() {
        for len in 1..=max_len.min(tokens.len() - first) {
            for hit in index.lookup(&surfaces[first..first + len]) {
                let starts = by_ontology.entry(hit.ontology_id.as_str()).or_default();
                let slot = starts.entry(first).or_insert((0, Vec::new()));
                let last = first + len;
                if last > slot.0 {
                    *slot = (last, vec![hit]);
                } else if last == slot.0 {
                    slot.1.push(hit);
                }
            }
        }
    }
    let mut out = Vec::new();
    for starts in by_ontology.into_values() {
        let mut cursor = 0;
        for (first, (last, hits)) in starts {
            if first < cursor {
                continue;
            }
            cursor = last;
            let span = Span::new(tokens[first].span.start, tokens[last - 1].span.end);
            out.extend(hits.into_iter().map(|hit| GazetteerMatch {
                first,
                last,
                span,
                hit,
            }));
        }
    }
    out.sort_by(|a, b| {
        (a.span, &a.hit.ontology_id, &a.hit.iri).cmp(&(b.span, &b.hit.ontology_id, &b.hit.iri))
    });
    out
}

pub(crate) fn annotate_tokens(tokens: &[Token], index: &LabelIndex, set: &mut AnnotationSet) {
    for m in gazetteer_matches(tokens, index) {
        let mut features = BTreeMap::new();
        features.insert("class_iri".to_owned(), m.hit.iri.clone());
        features.insert("ontology_id".to_owned(), m.hit.ontology_id.clone());
        features.insert("matched_label".to_owned(), m.hit.label.clone());
        features.insert("case_policy".to_owned(), m.hit.policy.as_str().to_owned());
        set.add(m.span, MENTION, features, AnnotationSource::Gazetteer);
    }
}

/// Emits a `Mention` for every selected label match in the document.
pub fn gazetteer_annotate(doc: &Document, index: &LabelIndex) -> AnnotationSet {
    let mut set = AnnotationSet::new(doc.doc_id.clone());
    let tokens = content_tokens(&doc.text);
    annotate_tokens(&tokens, index, &mut set);
    set
}

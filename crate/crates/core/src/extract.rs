//! Lifts annotations to entities, cross-reference links and provenance.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotate::{Annotation, AnnotationSet, AnnotationSource, MENTION, REFERENCE, TERM_DEFINITION};
use crate::corpus::Corpus;
use crate::ontology::{CasePolicy, DomainCategory, OntologyModel};
use crate::span::Span;

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("annotation {ann_id} ({ann_type}) has no ontology or rule provenance")]
    UnknownSource { ann_id: u64, ann_type: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: invalid registry: {source}", path.display())]
    Registry {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MentionRef {
    pub doc_id: String,
    pub ann_id: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub entity_id: String,
    pub canonical_term: String,
    pub class_iri: String,
    pub mention_ann_ids: Vec<MentionRef>,
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Canonical surface of a mention: whitespace collapsed, and lowercased
/// unless the matched label is an exact-case acronym.
pub fn canonical_term(mention: &Annotation, text: &str) -> String {
    let surface = collapse_ws(mention.span.slice(text));
    if mention.feature("case_policy") == Some(CasePolicy::AcronymExact.as_str()) {
        surface
    } else {
        surface.to_lowercase()
    }
}

/// Groups mentions by (class IRI, canonical term). Co-reference is surface
/// identity only.
pub fn link_mentions(corpus: &Corpus, annotations: &BTreeMap<String, AnnotationSet>) -> Vec<Entity> {
    let mut groups: BTreeMap<(String, String), Vec<MentionRef>> = BTreeMap::new();
    for doc in &corpus.documents {
        let Some(set) = annotations.get(&doc.doc_id) else {
            continue;
        };
        for m in set.of_type(MENTION) {
            let Some(iri) = m.feature("class_iri") else {
                continue;
            };
            groups
                .entry((iri.to_owned(), canonical_term(m, &doc.text)))
                .or_default()
                .push(MentionRef {
                    doc_id: doc.doc_id.clone(),
                    ann_id: m.ann_id,
                });
        }
    }
    groups
        .into_iter()
        .enumerate()
        .map(|(i, ((class_iri, canonical_term), mut mentions))| {
            mentions.sort();
            Entity {
                entity_id: format!("E{:04}", i + 1),
                canonical_term,
                class_iri,
                mention_ann_ids: mentions,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub standard_ref: String,
    pub title: String,
}

/// Local list of known standards.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    by_ref: BTreeMap<String, RegistryEntry>,
}

impl Registry {
    pub fn new(entries: Vec<RegistryEntry>) -> Self {
        let by_ref = entries
            .into_iter()
            .map(|e| (normalize_standard_ref(&e.standard_ref), e))
            .collect();
        Registry { by_ref }
    }

    pub fn load(path: &Path) -> Result<Self, ExtractError> {
        let raw = fs::read(path).map_err(|source| ExtractError::Io {
            path: path.to_owned(),
            source,
        })?;
        let entries: Vec<RegistryEntry> =
            serde_json::from_slice(&raw).map_err(|source| ExtractError::Registry {
                path: path.to_owned(),
                source,
            })?;
        Ok(Registry::new(entries))
    }

    pub fn get(&self, normalized_ref: &str) -> Option<&RegistryEntry> {
        self.by_ref.get(normalized_ref)
    }

    pub fn len(&self) -> usize {
        self.by_ref.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_ref.is_empty()
    }
}

fn standard_ref_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"^\s*([A-Z]+(?:\s*/\s*[A-Z]+)*)\s*(\d+)(?:\s*-\s*(\d+))?").unwrap()
    })
}

/// `ORG NUMBER[-PART]`, e.g. `ISO/TS 16668` or `ISO 15531-44`. Input that
/// does not look like a reference is returned whitespace-collapsed.
pub fn normalize_standard_ref(raw: &str) -> String {
    let Some(c) = standard_ref_re().captures(raw) else {
        return collapse_ws(raw);
    };
    let org: String = c[1].chars().filter(|ch| !ch.is_whitespace()).collect();
    match c.get(3) {
        Some(part) => format!("{org} {}-{}", &c[2], part.as_str()),
        None => format!("{org} {}", &c[2]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Resolution {
    Corpus,
    Registry,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceLink {
    pub from_doc: String,
    pub span: Span,
    pub target_ref: String,
    pub resolved: bool,
    /// Corpus doc_id, or the registry's reference when resolved there.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_doc: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolved_via: Option<Resolution>,
}

/// One link per `Reference` annotation, resolved first against the corpus
/// documents' own references, then against the registry.
pub fn extract_references(
    corpus: &Corpus,
    annotations: &BTreeMap<String, AnnotationSet>,
    registry: &Registry,
) -> Vec<ReferenceLink> {
    let in_corpus: BTreeMap<String, &str> = corpus
        .documents
        .iter()
        .map(|d| (normalize_standard_ref(&d.standard_ref), d.doc_id.as_str()))
        .collect();
    let mut links = Vec::new();
    for doc in &corpus.documents {
        let Some(set) = annotations.get(&doc.doc_id) else {
            continue;
        };
        for a in set.of_type(REFERENCE) {
            let raw = a.feature("standard_ref").unwrap_or_else(|| a.span.slice(&doc.text));
            let target_ref = normalize_standard_ref(raw);
            let (target_doc, via) = if let Some(id) = in_corpus.get(&target_ref) {
                (Some((*id).to_owned()), Some(Resolution::Corpus))
            } else if let Some(e) = registry.get(&target_ref) {
                (Some(normalize_standard_ref(&e.standard_ref)), Some(Resolution::Registry))
            } else {
                (None, None)
            };
            links.push(ReferenceLink {
                from_doc: doc.doc_id.clone(),
                span: a.span,
                target_ref,
                resolved: target_doc.is_some(),
                target_doc,
                resolved_via: via,
            });
        }
    }
    links
}

/// Knowledge domain an annotation belongs to: the domain of the ontology it
/// came from, `StandardsDatabase` for standard references and
/// `DomainSpecific` for extracted term definitions.
pub fn classify_provenance(
    annotation: &Annotation,
    ontologies: &BTreeMap<String, DomainCategory>,
) -> Result<DomainCategory, ExtractError> {
    let unknown = || ExtractError::UnknownSource {
        ann_id: annotation.ann_id,
        ann_type: annotation.ann_type.clone(),
    };
    if let Some(id) = annotation.feature("ontology_id") {
        return ontologies.get(id).copied().ok_or_else(unknown);
    }
    if let Some(d) = annotation.feature("domain_category") {
        return d.parse().map_err(|_| unknown());
    }
    match (&annotation.source, annotation.ann_type.as_str()) {
        (AnnotationSource::Rule(_), REFERENCE) => Ok(DomainCategory::StandardsDatabase),
        (AnnotationSource::Extractor, TERM_DEFINITION) => Ok(DomainCategory::DomainSpecific),
        _ => Err(unknown()),
    }
}

pub fn domain_map(models: &[OntologyModel]) -> BTreeMap<String, DomainCategory> {
    models
        .iter()
        .map(|m| (m.ontology_id.clone(), m.domain_category))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ingest_document, DocumentMeta};

    fn doc(id: &str, sref: &str, text: &str) -> crate::corpus::Document {
        ingest_document(
            text.as_bytes(),
            &DocumentMeta {
                doc_id: id.into(),
                standard_ref: sref.into(),
                title: "t".into(),
            },
        )
        .unwrap()
    }

    fn mention(set: &mut AnnotationSet, span: Span, iri: &str, policy: CasePolicy) {
        let mut f = BTreeMap::new();
        f.insert("class_iri".to_owned(), iri.to_owned());
        f.insert("ontology_id".to_owned(), "o".to_owned());
        f.insert("case_policy".to_owned(), policy.as_str().to_owned());
        set.add(span, MENTION, f, AnnotationSource::Gazetteer);
    }

    #[test]
    fn mentions_group_across_documents() {
        let a = doc("a", "ISO 1-1", "flow control and Flow Control");
        let b = doc("b", "ISO 1-2", "more flow  control");
        let corpus = Corpus::new("c", vec![a, b]).unwrap();
        let mut sa = AnnotationSet::new("a");
        mention(&mut sa, Span::new(0, 12), "FC", CasePolicy::CaseInsensitive);
        mention(&mut sa, Span::new(17, 29), "FC", CasePolicy::CaseInsensitive);
        let mut sb = AnnotationSet::new("b");
        mention(&mut sb, Span::new(5, 18), "FC", CasePolicy::CaseInsensitive);
        let anns = BTreeMap::from([("a".to_owned(), sa), ("b".to_owned(), sb)]);
        let entities = link_mentions(&corpus, &anns);
        assert_eq!(entities.len(), 1);
        assert_eq!(entities[0].canonical_term, "flow control");
        assert_eq!(entities[0].mention_ann_ids.len(), 3);
        assert!(link_mentions(&corpus, &BTreeMap::new()).is_empty());
    }

    #[test]
    fn acronym_mentions_keep_case() {
        let a = doc("a", "ISO 1", "an IS here");
        let mut s = AnnotationSet::new("a");
        mention(&mut s, Span::new(3, 5), "IS", CasePolicy::AcronymExact);
        assert_eq!(canonical_term(&s.annotations()[0], &a.text), "IS");
    }

    #[test]
    fn reference_normalization() {
        assert_eq!(normalize_standard_ref("ISO 15531-44"), "ISO 15531-44");
        assert_eq!(normalize_standard_ref("ISO/TS 16668"), "ISO/TS 16668");
        assert_eq!(normalize_standard_ref("ISO / TS  16668"), "ISO/TS 16668");
        assert_eq!(normalize_standard_ref("ISO 15531 - 1"), "ISO 15531-1");
        assert_eq!(normalize_standard_ref("ISO15531-1"), "ISO 15531-1");
        assert_eq!(normalize_standard_ref("  some   text "), "some text");
    }

    #[test]
    fn references_resolve_against_corpus_then_registry() {
        let text = "see ISO 15531-1 and ISO/TS 16668 and ISO 99999";
        let d = doc("p44", "ISO 15531-44", text);
        let p1 = doc("p1", "ISO 15531-1", "overview");
        let corpus = Corpus::new("c", vec![d, p1]).unwrap();
        let mut set = AnnotationSet::new("p44");
        for r in ["ISO 15531-1", "ISO/TS 16668", "ISO 99999"] {
            let s = text.find(r).unwrap();
            let mut f = BTreeMap::new();
            f.insert("standard_ref".to_owned(), r.to_owned());
            set.add(Span::new(s, s + r.len()), REFERENCE, f, AnnotationSource::Rule("StandardRef".into()));
        }
        let anns = BTreeMap::from([("p44".to_owned(), set)]);
        let registry = Registry::new(vec![RegistryEntry {
            standard_ref: "ISO/TS 16668".into(),
            title: "Basic semantics register".into(),
        }]);
        let links = extract_references(&corpus, &anns, &registry);
        assert_eq!(links.len(), 3);
        assert!(links[0].resolved);
        assert_eq!(links[0].target_doc.as_deref(), Some("p1"));
        assert_eq!(links[1].resolved_via, Some(Resolution::Registry));
        assert_eq!(links[1].target_ref, "ISO/TS 16668");
        assert!(!links[2].resolved);
        assert_eq!(links[2].target_doc, None);
    }

    #[test]
    fn provenance() {
        let domains = BTreeMap::from([
            ("isto".to_owned(), DomainCategory::GenericStandards),
            ("iso15531".to_owned(), DomainCategory::DomainSpecific),
        ]);
        let mk = |features: &[(&str, &str)], ty: &str, source: AnnotationSource| Annotation {
            ann_id: 0,
            span: Span::new(0, 1),
            ann_type: ty.to_owned(),
            features: features.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            source,
        };
        let a = mk(&[("ontology_id", "isto")], MENTION, AnnotationSource::Gazetteer);
        assert_eq!(classify_provenance(&a, &domains).unwrap(), DomainCategory::GenericStandards);
        let a = mk(&[("ontology_id", "iso15531")], MENTION, AnnotationSource::Gazetteer);
        assert_eq!(classify_provenance(&a, &domains).unwrap(), DomainCategory::DomainSpecific);
        let a = mk(&[], REFERENCE, AnnotationSource::Rule("StandardRef".into()));
        assert_eq!(classify_provenance(&a, &domains).unwrap(), DomainCategory::StandardsDatabase);
        let a = mk(&[], "Other", AnnotationSource::Gazetteer);
        assert!(matches!(classify_provenance(&a, &domains), Err(ExtractError::UnknownSource { .. })));
        let a = mk(&[("ontology_id", "nope")], MENTION, AnnotationSource::Gazetteer);
        assert!(classify_provenance(&a, &domains).is_err());
    }
}

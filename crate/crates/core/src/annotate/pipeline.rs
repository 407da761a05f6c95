use std::collections::BTreeMap;

use rayon::prelude::*;

use super::gazetteer::annotate_tokens;
use super::rules::engine_run_on_tokens;
use super::rules::{standard_reference_phase, Phase};
use super::{content_tokens, AnnotationSet, AnnotationSource, TERM_DEFINITION};
use crate::corpus::{extract_term_entries, Corpus, Document};
use crate::ontology::{LabelIndex, OntologyModel};

/// Stages run in a fixed order: tokenize, gazetteer, rule phases in list
/// order, then the term-definition extractor.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub phases: Vec<Phase>,
    pub term_definitions: bool,
}

impl Default for Pipeline {
    fn default() -> Self {
        Pipeline {
            phases: vec![standard_reference_phase()],
            term_definitions: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PipelineOutput {
    pub annotations: BTreeMap<String, AnnotationSet>,
    pub errors: BTreeMap<String, String>,
}

impl Pipeline {
    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phases.push(phase);
        self
    }

    pub fn run_document(&self, doc: &Document, index: &LabelIndex) -> Result<AnnotationSet, String> {
        let tokens = content_tokens(&doc.text);
        let mut set = AnnotationSet::new(doc.doc_id.clone());
        annotate_tokens(&tokens, index, &mut set);
        for phase in &self.phases {
            set = engine_run_on_tokens(phase, &doc.text, &tokens, &set);
        }
        if self.term_definitions {
            for entry in extract_term_entries(doc) {
                let mut features = BTreeMap::new();
                features.insert("term".to_owned(), entry.term.clone());
                features.insert("clause".to_owned(), entry.clause_number.clone());
                if let Some(src) = &entry.adapted_from {
                    features.insert("adapted_from".to_owned(), src.clone());
                }
                set.add(entry.span, TERM_DEFINITION, features, AnnotationSource::Extractor);
            }
        }
        set.validate_offsets(&doc.text).map_err(|e| e.to_string())?;
        Ok(set)
    }
}

/// Annotates every document of `corpus`. Documents are independent; `jobs`
/// caps the worker count and never changes the result.
pub fn run_pipeline(
    pipeline: &Pipeline,
    corpus: &Corpus,
    ontologies: &[OntologyModel],
    jobs: Option<usize>,
) -> PipelineOutput {
    let index = LabelIndex::build(ontologies);
    let work = || {
        corpus
            .documents
            .par_iter()
            .map(|d| (d.doc_id.clone(), pipeline.run_document(d, &index)))
            .collect::<Vec<_>>()
    };
    let results = match jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        },
        None => work(),
    };
    let mut out = PipelineOutput::default();
    for (doc_id, r) in results {
        match r {
            Ok(set) => {
                out.annotations.insert(doc_id, set);
            }
            Err(e) => {
                out.errors.insert(doc_id, e);
            }
        }
    }
    out
}

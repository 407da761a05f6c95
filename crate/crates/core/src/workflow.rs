//! End-to-end run: ingest, annotate, extract, populate, check.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::annotate::{parse_phase, run_pipeline, AnnotationSet, Pipeline, RuleError};
use crate::consistency::{run_all_checks, CheckInputs, CheckerConfig, ConfigError, ConsistencyFinding};
use crate::corpus::{extract_term_entries, Corpus, CorpusError, Manifest, TermEntry};
use crate::extract::{extract_references, link_mentions, Entity, ExtractError, ReferenceLink, Registry};
use crate::ontology::{load_ontology, LabelIndex, LoadedOntology, OntologyError, OntologyModel};
use crate::populate::{propose_candidates, CandidateClass};
use crate::report::BundleContents;

#[derive(Debug, Error)]
pub enum WorkflowError {
    #[error("input not found: {0}")]
    MissingInput(PathBuf),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{path}: {source}")]
    Ontology {
        path: PathBuf,
        #[source]
        source: OntologyError,
    },
    #[error("{path}: {source}")]
    Rules {
        path: PathBuf,
        #[source]
        source: RuleError,
    },
    #[error("{path}: {source}")]
    RulesIo {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Registry(#[from] ExtractError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Clone, Default)]
pub struct RunInputs {
    pub manifest: PathBuf,
    pub ontologies: Vec<PathBuf>,
    pub rules: Vec<PathBuf>,
    /// Overrides the registry named in the manifest.
    pub registry: Option<PathBuf>,
    pub checker: CheckerConfig,
    pub jobs: Option<usize>,
}

impl RunInputs {
    /// Every named input file that does not exist, in argument order.
    pub fn missing_paths(&self) -> Vec<PathBuf> {
        std::iter::once(&self.manifest)
            .chain(&self.ontologies)
            .chain(&self.rules)
            .chain(&self.registry)
            .filter(|p| !p.is_file())
            .cloned()
            .collect()
    }

    pub fn validate_paths(&self) -> Result<(), WorkflowError> {
        match self.missing_paths().into_iter().next() {
            Some(p) => Err(WorkflowError::MissingInput(p)),
            None => Ok(()),
        }
    }
}

#[derive(Debug)]
pub struct RunOutputs {
    pub corpus: Corpus,
    pub ontologies: Vec<LoadedOntology>,
    pub annotations: BTreeMap<String, AnnotationSet>,
    /// doc_id to reason, for documents that failed ingestion or annotation.
    pub failures: BTreeMap<String, String>,
    pub term_entries: Vec<TermEntry>,
    pub entities: Vec<Entity>,
    pub links: Vec<ReferenceLink>,
    pub candidates: Vec<CandidateClass>,
    pub findings: Vec<ConsistencyFinding>,
}

impl RunOutputs {
    pub fn bundle(&self) -> BundleContents<'_> {
        BundleContents {
            corpus: &self.corpus,
            annotations: &self.annotations,
            entities: &self.entities,
            candidates: &self.candidates,
            links: &self.links,
            findings: &self.findings,
            failures: &self.failures,
        }
    }
}

pub fn load_ontologies(paths: &[PathBuf]) -> Result<Vec<LoadedOntology>, WorkflowError> {
    paths
        .iter()
        .map(|p| {
            load_ontology(p).map_err(|source| WorkflowError::Ontology {
                path: p.clone(),
                source,
            })
        })
        .collect()
}

pub fn load_pipeline(rule_files: &[PathBuf]) -> Result<Pipeline, WorkflowError> {
    let mut pipeline = Pipeline::default();
    for path in rule_files {
        let src = fs::read_to_string(path).map_err(|source| WorkflowError::RulesIo {
            path: path.clone(),
            source,
        })?;
        let phase = parse_phase(&src).map_err(|source| WorkflowError::Rules {
            path: path.clone(),
            source,
        })?;
        pipeline = pipeline.with_phase(phase);
    }
    Ok(pipeline)
}

fn load_registry(explicit: Option<&Path>, manifest: &Manifest) -> Result<Registry, WorkflowError> {
    match explicit.map(Path::to_owned).or_else(|| manifest.registry_path()) {
        Some(p) => Ok(Registry::load(&p)?),
        None => Ok(Registry::default()),
    }
}

/// Runs the whole pipeline. Per-document failures are collected in
/// [`RunOutputs::failures`]; any other bad input aborts the run.
pub fn run(inputs: &RunInputs) -> Result<RunOutputs, WorkflowError> {
    inputs.validate_paths()?;
    inputs.checker.validate()?;
    let manifest = Manifest::load(&inputs.manifest)?;
    let ontologies = load_ontologies(&inputs.ontologies)?;
    let pipeline = load_pipeline(&inputs.rules)?;
    let registry = load_registry(inputs.registry.as_deref(), &manifest)?;

    let (mut corpus, doc_failures) = manifest.load_corpus();
    let mut failures: BTreeMap<String, String> = doc_failures
        .into_iter()
        .map(|f| (f.doc_id, f.error.to_string()))
        .collect();

    let models: Vec<OntologyModel> = ontologies.iter().map(|o| o.model.clone()).collect();
    let out = run_pipeline(&pipeline, &corpus, &models, inputs.jobs);
    failures.extend(out.errors);
    corpus.documents.retain(|d| out.annotations.contains_key(&d.doc_id));
    let annotations = out.annotations;

    let index = LabelIndex::build(&models);
    let term_entries: Vec<TermEntry> = corpus.documents.iter().flat_map(extract_term_entries).collect();
    let entities = link_mentions(&corpus, &annotations);
    let links = extract_references(&corpus, &annotations, &registry);
    let candidates = propose_candidates(&term_entries, &index);
    let findings = run_all_checks(
        &CheckInputs {
            corpus: &corpus,
            annotations: &annotations,
            term_entries: &term_entries,
            links: &links,
            candidates: &candidates,
            index: &index,
        },
        &inputs.checker,
    );
    Ok(RunOutputs {
        corpus,
        ontologies,
        annotations,
        failures,
        term_entries,
        entities,
        links,
        candidates,
        findings,
    })
}

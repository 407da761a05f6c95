//! Stand-off annotation: tokenizer, ontology gazetteer, pattern-rule phases
//! and the pipeline that chains them.

mod gazetteer;
mod pipeline;
pub mod rules;
mod token;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::span::Span;

pub use gazetteer::{gazetteer_annotate, gazetteer_matches, GazetteerMatch};
pub use pipeline::{run_pipeline, Pipeline, PipelineOutput};
pub use rules::{parse_phase, run_phase, Phase, Rule, RuleError};
pub use token::{content_tokens, orth_of, tokenize, Orth, Token, TokenKind};

pub const MENTION: &str = "Mention";
pub const REFERENCE: &str = "Reference";
pub const TERM_DEFINITION: &str = "TermDefinition";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AnnotationSource {
    Gazetteer,
    Rule(String),
    Extractor,
}

impl fmt::Display for AnnotationSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnnotationSource::Gazetteer => f.write_str("gazetteer"),
            AnnotationSource::Rule(name) => write!(f, "rule:{name}"),
            AnnotationSource::Extractor => f.write_str("extractor"),
        }
    }
}

impl FromStr for AnnotationSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gazetteer" => Ok(AnnotationSource::Gazetteer),
            "extractor" => Ok(AnnotationSource::Extractor),
            _ => s
                .strip_prefix("rule:")
                .filter(|n| !n.is_empty())
                .map(|n| AnnotationSource::Rule(n.to_owned()))
                .ok_or_else(|| format!("unknown annotation source `{s}`")),
        }
    }
}

impl Serialize for AnnotationSource {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AnnotationSource {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub ann_id: u64,
    #[serde(flatten)]
    pub span: Span,
    #[serde(rename = "type")]
    pub ann_type: String,
    pub features: BTreeMap<String, String>,
    pub source: AnnotationSource,
}

impl Annotation {
    pub fn feature(&self, key: &str) -> Option<&str> {
        self.features.get(key).map(String::as_str)
    }

    fn sort_key(&self) -> (usize, usize, &str, u64) {
        (self.span.start, self.span.end, self.ann_type.as_str(), self.ann_id)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnnotationError {
    #[error("annotation {ann_id} span {span} is empty or outside the text (len {len})")]
    OutOfBounds { ann_id: u64, span: Span, len: usize },
    #[error("annotation {ann_id} span {span} splits a UTF-8 sequence")]
    NotCharBoundary { ann_id: u64, span: Span },
}

/// Annotations kept in (start, end, type) order; ids are unique and
/// assigned in creation order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationSet {
    pub set_name: String,
    annotations: Vec<Annotation>,
    next_id: u64,
}

impl AnnotationSet {
    pub fn new(set_name: impl Into<String>) -> Self {
        AnnotationSet {
            set_name: set_name.into(),
            annotations: Vec::new(),
            next_id: 0,
        }
    }

    pub fn add(
        &mut self,
        span: Span,
        ann_type: impl Into<String>,
        features: BTreeMap<String, String>,
        source: AnnotationSource,
    ) -> u64 {
        let ann = Annotation {
            ann_id: self.next_id,
            span,
            ann_type: ann_type.into(),
            features,
            source,
        };
        self.next_id += 1;
        let key = ann.sort_key();
        let at = self.annotations.partition_point(|a| a.sort_key() < key);
        let id = ann.ann_id;
        self.annotations.insert(at, ann);
        id
    }

    pub fn annotations(&self) -> &[Annotation] {
        &self.annotations
    }

    pub fn of_type<'a>(&'a self, ann_type: &'a str) -> impl Iterator<Item = &'a Annotation> + 'a {
        self.annotations.iter().filter(move |a| a.ann_type == ann_type)
    }

    pub fn get(&self, ann_id: u64) -> Option<&Annotation> {
        self.annotations.iter().find(|a| a.ann_id == ann_id)
    }

    pub fn len(&self) -> usize {
        self.annotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.annotations.is_empty()
    }

    /// Checks every span against the annotated text.
    pub fn validate_offsets(&self, text: &str) -> Result<(), AnnotationError> {
        for a in &self.annotations {
            if a.span.start >= a.span.end || a.span.end > text.len() {
                return Err(AnnotationError::OutOfBounds {
                    ann_id: a.ann_id,
                    span: a.span,
                    len: text.len(),
                });
            }
            if !text.is_char_boundary(a.span.start) || !text.is_char_boundary(a.span.end) {
                return Err(AnnotationError::NotCharBoundary {
                    ann_id: a.ann_id,
                    span: a.span,
                });
            }
        }
        Ok(())
    }
}

/// Serialized stand-off form of one document's annotations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandoffFile {
    pub doc_id: String,
    pub annotations: Vec<Annotation>,
}

impl StandoffFile {
    pub fn new(doc_id: &str, set: &AnnotationSet) -> Self {
        StandoffFile {
            doc_id: doc_id.to_owned(),
            annotations: set.annotations().to_vec(),
        }
    }
}

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::OntologyModel;
use crate::annotate::{content_tokens, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CasePolicy {
    /// Short all-uppercase labels match only their exact surface ("IS").
    AcronymExact,
    CaseInsensitive,
}

impl CasePolicy {
    pub fn for_label(label: &str) -> CasePolicy {
        let has_upper = label.chars().any(char::is_uppercase);
        let has_lower = label.chars().any(char::is_lowercase);
        if has_upper && !has_lower && label.chars().count() <= 6 {
            CasePolicy::AcronymExact
        } else {
            CasePolicy::CaseInsensitive
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            CasePolicy::AcronymExact => "AcronymExact",
            CasePolicy::CaseInsensitive => "CaseInsensitive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LabelKind {
    Primary,
    Alternate,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabelHit {
    pub ontology_id: String,
    pub iri: String,
    pub label: String,
    pub kind: LabelKind,
    pub policy: CasePolicy,
    /// Label surfaces as written, without whitespace tokens.
    pub tokens: Vec<String>,
}

/// Label lookup over one or more ontologies, keyed by the lowercased
/// non-whitespace token sequence of each label.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelIndex {
    entries: BTreeMap<Vec<String>, Vec<LabelHit>>,
    folded: BTreeMap<Vec<String>, Vec<LabelHit>>,
    max_len: usize,
}

fn fold_plural(key: &mut [String]) {
    if let Some(last) = key.last_mut() {
        if last.chars().count() > 3 && last.ends_with('s') && last.chars().all(char::is_alphabetic) {
            last.pop();
        }
    }
}

fn lower_key<S: AsRef<str>>(surfaces: &[S]) -> Vec<String> {
    surfaces.iter().map(|s| s.as_ref().to_lowercase()).collect()
}

impl LabelIndex {
    pub fn build<'a, I>(models: I) -> LabelIndex
    where
        I: IntoIterator<Item = &'a OntologyModel>,
    {
        let mut index = LabelIndex::default();
        for model in models {
            for class in &model.classes {
                let labels = std::iter::once((class.primary_label.as_str(), LabelKind::Primary))
                    .chain(class.alt_labels.iter().map(|l| (l.as_str(), LabelKind::Alternate)));
                for (label, kind) in labels {
                    let tokens: Vec<String> =
                        content_tokens(label).into_iter().map(|t| t.surface).collect();
                    if tokens.is_empty() {
                        continue;
                    }
                    let policy = CasePolicy::for_label(label);
                    let mut key = lower_key(&tokens);
                    let hit = LabelHit {
                        ontology_id: model.ontology_id.clone(),
                        iri: class.iri.clone(),
                        label: label.to_owned(),
                        kind,
                        policy,
                        tokens,
                    };
                    index.max_len = index.max_len.max(key.len());
                    let map = if model.plural_fold && policy == CasePolicy::CaseInsensitive {
                        fold_plural(&mut key);
                        &mut index.folded
                    } else {
                        &mut index.entries
                    };
                    map.entry(key).or_default().push(hit);
                }
            }
        }
        for hits in index.entries.values_mut().chain(index.folded.values_mut()) {
            hits.sort();
        }
        index
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty() && self.folded.is_empty()
    }

    /// Longest label, in content tokens.
    pub fn max_label_len(&self) -> usize {
        self.max_len
    }

    /// Classes whose label matches the given token surfaces under that
    /// label's case policy. One hit per (ontology, class), primary label
    /// preferred; unknown sequences give an empty list.
    pub fn lookup<S: AsRef<str>>(&self, surfaces: &[S]) -> Vec<&LabelHit> {
        if surfaces.is_empty() {
            return Vec::new();
        }
        let key = lower_key(surfaces);
        let mut hits: Vec<&LabelHit> = Vec::new();
        if let Some(found) = self.entries.get(&key) {
            hits.extend(found.iter().filter(|h| match h.policy {
                CasePolicy::CaseInsensitive => true,
                CasePolicy::AcronymExact => h
                    .tokens
                    .iter()
                    .zip(surfaces)
                    .all(|(a, b)| a == b.as_ref()),
            }));
        }
        if !self.folded.is_empty() {
            let mut folded = key;
            fold_plural(&mut folded);
            if let Some(found) = self.folded.get(&folded) {
                hits.extend(found.iter());
            }
        }
        hits.sort_by(|a, b| {
            (&a.ontology_id, &a.iri, a.kind, &a.label).cmp(&(&b.ontology_id, &b.iri, b.kind, &b.label))
        });
        hits.dedup_by(|a, b| a.ontology_id == b.ontology_id && a.iri == b.iri);
        hits
    }

    /// Tokenizes `text` and looks it up as a whole label.
    pub fn lookup_text(&self, text: &str) -> Vec<&LabelHit> {
        let surfaces: Vec<String> = content_tokens(text).into_iter().map(|t| t.surface).collect();
        self.lookup(&surfaces)
    }

    /// Every indexed acronym label that is a single word, deduplicated by
    /// surface.
    pub fn single_word_acronyms(&self) -> BTreeSet<String> {
        self.entries
            .values()
            .flatten()
            .filter(|h| h.policy == CasePolicy::AcronymExact && h.tokens.len() == 1)
            .filter(|h| {
                crate::annotate::tokenize(&h.tokens[0])
                    .first()
                    .is_some_and(|t| t.kind == TokenKind::Word)
            })
            .map(|h| h.tokens[0].clone())
            .collect()
    }

    pub fn hits(&self) -> impl Iterator<Item = &LabelHit> {
        self.entries.values().chain(self.folded.values()).flatten()
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_native, OntologyModel};
    use super::*;

    fn model(id: &str, labels: &[(&str, &str)], fold: bool) -> OntologyModel {
        let classes: Vec<String> = labels
            .iter()
            .map(|(iri, l)| format!(r#"{{"iri":"{iri}","primary_label":"{l}"}}"#))
            .collect();
        let json = format!(
            r#"{{"ontology_id":"{id}","iri_base":"http://x/{id}#","domain_category":"DomainSpecific","classes":[{}],"plural_fold":{fold}}}"#,
            classes.join(",")
        );
        parse_native(&json).unwrap().model
    }

    #[test]
    fn acronym_policy() {
        assert_eq!(CasePolicy::for_label("IS"), CasePolicy::AcronymExact);
        assert_eq!(CasePolicy::for_label("ISO/TS"), CasePolicy::AcronymExact);
        assert_eq!(CasePolicy::for_label("ISO/IEC"), CasePolicy::CaseInsensitive);
        assert_eq!(CasePolicy::for_label("Flow Control"), CasePolicy::CaseInsensitive);
        assert_eq!(CasePolicy::for_label("42"), CasePolicy::CaseInsensitive);
    }

    #[test]
    fn acronym_matches_exact_surface_only() {
        let idx = LabelIndex::build([&model("isto", &[("IS", "IS")], false)]);
        assert_eq!(idx.lookup(&["IS"]).len(), 1);
        assert!(idx.lookup(&["is"]).is_empty());
        assert!(idx.lookup(&["Is"]).is_empty());
        assert_eq!(idx.lookup(&["IS"])[0].policy, CasePolicy::AcronymExact);
    }

    #[test]
    fn case_insensitive_label() {
        let idx = LabelIndex::build([&model("m", &[("FC", "Flow Control")], false)]);
        assert_eq!(idx.lookup(&["flow", "control"]).len(), 1);
        assert_eq!(idx.lookup(&["FLOW", "CONTROL"]).len(), 1);
        assert_eq!(idx.lookup_text("flow\n  control").len(), 1);
        assert!(idx.lookup(&["flow"]).is_empty());
    }

    #[test]
    fn shared_label_across_ontologies() {
        let a = model("a", &[("Resource", "resource")], false);
        let b = model("b", &[("Res", "resource")], false);
        let idx = LabelIndex::build([&a, &b]);
        let hits = idx.lookup(&["resource"]);
        assert_eq!(hits.len(), 2);
        assert_eq!(hits[0].ontology_id, "a");
        assert_eq!(hits[1].ontology_id, "b");
    }

    #[test]
    fn plural_fold_is_opt_in() {
        let plain = LabelIndex::build([&model("a", &[("R", "resource")], false)]);
        assert!(plain.lookup(&["resources"]).is_empty());
        let folded = LabelIndex::build([&model("a", &[("R", "resource")], true)]);
        assert_eq!(folded.lookup(&["resources"]).len(), 1);
        assert_eq!(folded.lookup(&["Resource"]).len(), 1);
    }

    #[test]
    fn empty_index() {
        let idx = LabelIndex::build(std::iter::empty::<&OntologyModel>());
        assert!(idx.is_empty());
        assert!(idx.lookup(&["anything"]).is_empty());
        let none: [&str; 0] = [];
        assert!(idx.lookup(&none).is_empty());
    }
}

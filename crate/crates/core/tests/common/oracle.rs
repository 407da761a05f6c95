//! Brute-force reference for gazetteer matching, shared by the property
//! tests and the acceptance suite.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use normcheck_core::annotate::{tokenize, TokenKind};
use normcheck_core::ontology::{parse_native, OntologyModel};
use normcheck_core::Span;

pub const VOCAB: &[&str] = &[
    "resource", "resources", "Resource", "status", "flow", "flows", "control", "IS", "is", "Is", "ISO",
    "iso", "part", "parts", "time", "point", "data", "view", "the", "of",
];
pub const SEPARATORS: &[&str] = &[" ", "  ", ", ", "\n", "-", ". ", "\t", " (", ") "];

pub fn random_doc() -> impl Strategy<Value = String> {
    prop::collection::vec((0..VOCAB.len(), 0..SEPARATORS.len()), 0..60).prop_map(|parts| {
        parts
            .into_iter()
            .map(|(w, s)| format!("{}{}", VOCAB[w], SEPARATORS[s]))
            .collect()
    })
}

/// `(ontology index, label words)` pairs.
pub fn random_labels() -> impl Strategy<Value = Vec<(usize, Vec<usize>)>> {
    prop::collection::vec((0..2usize, prop::collection::vec(0..VOCAB.len(), 1..4)), 1..12)
}

pub fn models(labels: &[(usize, Vec<usize>)], fold: [bool; 2]) -> Vec<OntologyModel> {
    (0..2)
        .map(|o| {
            let classes: Vec<String> = labels
                .iter()
                .enumerate()
                .filter(|(_, (onto, _))| *onto == o)
                .map(|(i, (_, words))| {
                    let label: Vec<&str> = words.iter().map(|w| VOCAB[*w]).collect();
                    format!(r#"{{"iri":"C{i}","primary_label":"{}"}}"#, label.join(" "))
                })
                .collect();
            let json = format!(
                r#"{{"ontology_id":"o{o}","iri_base":"http://x/o{o}#","domain_category":"DomainSpecific","plural_fold":{},"classes":[{}]}}"#,
                fold[o],
                classes.join(",")
            );
            parse_native(&json).unwrap().model
        })
        .collect()
}

pub fn oracle_fold(word: &str) -> String {
    let w = word.to_lowercase();
    if w.chars().count() > 3 && w.ends_with('s') && w.chars().all(char::is_alphabetic) {
        w[..w.len() - 1].to_owned()
    } else {
        w
    }
}

pub fn oracle_is_acronym(label: &str) -> bool {
    label.chars().any(char::is_uppercase) && !label.chars().any(char::is_lowercase) && label.chars().count() <= 6
}

/// Brute force over every token range and every label: keep the longest
/// match at each start, then pick leftmost-longest per ontology.
pub fn oracle(text: &str, labels: &[(usize, Vec<usize>)], fold: [bool; 2]) -> BTreeSet<(String, Span, String)> {
    let words: Vec<(Span, &str)> = tokenize(text)
        .into_iter()
        .filter(|t| t.kind != TokenKind::Space)
        .map(|t| (t.span, &text[t.span.range()]))
        .collect();
    let mut out = BTreeSet::new();
    for (o, &fold_o) in fold.iter().enumerate() {
        // start -> (end, iris)
        let mut best: BTreeMap<usize, (usize, BTreeSet<String>)> = BTreeMap::new();
        for (ci, (onto, lw)) in labels.iter().enumerate() {
            if *onto != o {
                continue;
            }
            let label: Vec<&str> = lw.iter().map(|w| VOCAB[*w]).collect();
            let exact = oracle_is_acronym(&label.join(" "));
            for i in 0..words.len() {
                let j = i + label.len();
                if j > words.len() {
                    continue;
                }
                let got: Vec<&str> = words[i..j].iter().map(|w| w.1).collect();
                let n = label.len();
                let hit = if exact {
                    got == label
                } else if fold_o {
                    got[..n - 1].iter().map(|s| s.to_lowercase()).eq(label[..n - 1].iter().map(|s| s.to_lowercase()))
                        && oracle_fold(got[n - 1]) == oracle_fold(label[n - 1])
                } else {
                    got.iter().map(|s| s.to_lowercase()).eq(label.iter().map(|s| s.to_lowercase()))
                };
                if hit {
                    let slot = best.entry(i).or_insert((0, BTreeSet::new()));
                    if j > slot.0 {
                        *slot = (j, BTreeSet::new());
                    }
                    if j == slot.0 {
                        slot.1.insert(format!("http://x/o{o}#C{ci}"));
                    }
                }
            }
        }
        let mut cursor = 0;
        for (i, (j, iris)) in best {
            if i < cursor {
                continue;
            }
            cursor = j;
            let span = Span::new(words[i].0.start, words[j - 1].0.end);
            for iri in iris {
                out.insert((format!("o{o}"), span, iri));
            }
        }
    }
    out
}

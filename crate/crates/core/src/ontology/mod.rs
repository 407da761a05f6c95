//! Lightweight ontologies used as annotation vocabularies.
//!
//! Only what annotation needs is modelled: classes with their labels, the
//! subclass hierarchy, and the declared object and datatype properties (kept
//! as IRIs so they can be counted). Two loaders produce the same model: the
//! native JSON format and a constrained RDF/XML subset.

mod index;
mod native;
mod rdfxml;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A `(child, parent)` subclass edge.
pub type Edge = (String, String);

pub use index::{CasePolicy, LabelHit, LabelIndex, LabelKind};
pub use native::{load_ontology_native, parse_native};
pub use rdfxml::{load_ontology_rdfxml_subset, parse_rdfxml_subset};

#[derive(Debug, Error)]
pub enum OntologyError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("subclass edge ({child}, {parent}) references undeclared class `{missing}`")]
    DanglingEdge {
        child: String,
        parent: String,
        missing: String,
    },
    #[error("duplicate IRI `{0}`")]
    DuplicateIri(String),
    #[error("class `{0}` has an empty primary label")]
    EmptyLabel(String),
}

/// The four knowledge domains a vocabulary can cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DomainCategory {
    GenericStandards,
    StandardsDatabase,
    ExternalTechnical,
    DomainSpecific,
}

impl fmt::Display for DomainCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DomainCategory::GenericStandards => "GenericStandards",
            DomainCategory::StandardsDatabase => "StandardsDatabase",
            DomainCategory::ExternalTechnical => "ExternalTechnical",
            DomainCategory::DomainSpecific => "DomainSpecific",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for DomainCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "GenericStandards" => Ok(DomainCategory::GenericStandards),
            "StandardsDatabase" => Ok(DomainCategory::StandardsDatabase),
            "ExternalTechnical" => Ok(DomainCategory::ExternalTechnical),
            "DomainSpecific" => Ok(DomainCategory::DomainSpecific),
            other => Err(format!("unknown domain category `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassEntry {
    pub iri: String,
    pub primary_label: String,
    #[serde(default)]
    pub alt_labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub definition: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_ref: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OntologyModel {
    pub ontology_id: String,
    pub iri_base: String,
    pub domain_category: DomainCategory,
    /// Sorted by IRI.
    pub classes: Vec<ClassEntry>,
    pub subclass_edges: BTreeSet<(String, String)>,
    pub object_properties: BTreeSet<String>,
    pub datatype_properties: BTreeSet<String>,
    /// Fold a trailing "s" on the last word when matching labels.
    #[serde(default)]
    pub plural_fold: bool,
}

/// Non-fatal observations made while loading.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LoadWarning {
    MultiParent { iri: String, parents: Vec<String> },
    Cycle { edges_dropped: Vec<(String, String)> },
    Unsupported { construct: String, context: String },
    MissingLabel { iri: String },
}

impl fmt::Display for LoadWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadWarning::MultiParent { iri, parents } => {
                write!(f, "class {iri} has multiple parents: {}", parents.join(", "))
            }
            LoadWarning::Cycle { edges_dropped } => {
                write!(f, "subclass cycle; edges dropped for traversal:")?;
                for (c, p) in edges_dropped {
                    write!(f, " ({c}, {p})")?;
                }
                Ok(())
            }
            LoadWarning::Unsupported { construct, context } => {
                write!(f, "skipped unsupported construct {construct} in {context}")
            }
            LoadWarning::MissingLabel { iri } => {
                write!(f, "class {iri} has no label; local name used")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedOntology {
    pub model: OntologyModel,
    pub warnings: Vec<LoadWarning>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OntologyStats {
    pub classes: usize,
    pub object_properties: usize,
    pub datatype_properties: usize,
    pub subclass_edges: usize,
    pub roots: usize,
}

impl fmt::Display for OntologyStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "classes={} object_properties={} datatype_properties={} subclass_edges={} roots={}",
            self.classes,
            self.object_properties,
            self.datatype_properties,
            self.subclass_edges,
            self.roots
        )
    }
}

impl OntologyModel {
    pub fn class(&self, iri: &str) -> Option<&ClassEntry> {
        self.classes
            .binary_search_by(|c| c.iri.as_str().cmp(iri))
            .ok()
            .map(|i| &self.classes[i])
    }

    pub fn parents_of(&self, iri: &str) -> Vec<&str> {
        self.subclass_edges
            .iter()
            .filter(|(c, _)| c == iri)
            .map(|(_, p)| p.as_str())
            .collect()
    }

    /// Classes with no outgoing subclass edge.
    pub fn roots(&self) -> Vec<&str> {
        let children: BTreeSet<&str> = self.subclass_edges.iter().map(|(c, _)| c.as_str()).collect();
        self.classes
            .iter()
            .map(|c| c.iri.as_str())
            .filter(|iri| !children.contains(iri))
            .collect()
    }

    /// Subclass edges with cycles broken: while a cycle remains, its
    /// lowest edge is dropped.
    pub fn acyclic_edges(&self) -> (BTreeSet<Edge>, Vec<Edge>) {
        let mut edges = self.subclass_edges.clone();
        let mut dropped = Vec::new();
        while let Some(cycle) = find_cycle(&edges) {
            let lowest = cycle.into_iter().min().expect("cycle has edges");
            edges.remove(&lowest);
            dropped.push(lowest);
        }
        (edges, dropped)
    }
}

pub fn ontology_stats(model: &OntologyModel) -> OntologyStats {
    OntologyStats {
        classes: model.classes.len(),
        object_properties: model.object_properties.len(),
        datatype_properties: model.datatype_properties.len(),
        subclass_edges: model.subclass_edges.len(),
        roots: model.roots().len(),
    }
}

/// Loads by file extension: `.json` is native, `.owl`, `.rdf` and `.xml`
/// go through the RDF/XML subset loader.
pub fn load_ontology(path: &Path) -> Result<LoadedOntology, OntologyError> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase) {
        Some(ext) if ext == "owl" || ext == "rdf" || ext == "xml" => load_ontology_rdfxml_subset(path),
        _ => load_ontology_native(path),
    }
}

/// Edges of some cycle in the subclass graph, if any.
fn find_cycle(edges: &BTreeSet<(String, String)>) -> Option<Vec<(String, String)>> {
    let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (c, p) in edges {
        adj.entry(c.as_str()).or_default().push(p.as_str());
    }
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    let mut marks: BTreeMap<&str, Mark> = BTreeMap::new();
    let nodes: Vec<&str> = adj.keys().copied().collect();
    for start in nodes {
        if marks.contains_key(start) {
            continue;
        }
        // iterative DFS keeping the current path
        let mut path: Vec<(&str, usize)> = vec![(start, 0)];
        marks.insert(start, Mark::Active);
        while let Some(&mut (node, ref mut next)) = path.last_mut() {
            let succ = adj.get(node).map(Vec::as_slice).unwrap_or(&[]);
            if *next < succ.len() {
                let s = succ[*next];
                *next += 1;
                match marks.get(s) {
                    Some(Mark::Active) => {
                        let pos = path.iter().position(|(n, _)| *n == s).expect("active node on path");
                        let mut cycle: Vec<(String, String)> = path[pos..]
                            .windows(2)
                            .map(|w| (w[0].0.to_owned(), w[1].0.to_owned()))
                            .collect();
                        cycle.push((node.to_owned(), s.to_owned()));
                        return Some(cycle);
                    }
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(s, Mark::Active);
                        path.push((s, 0));
                    }
                }
            } else {
                marks.insert(node, Mark::Done);
                path.pop();
            }
        }
    }
    None
}

/// Resolves a possibly relative IRI reference against `base`.
pub(crate) fn resolve_iri(base: &str, reference: &str) -> String {
    let r = reference.trim();
    if r.contains("://") || r.starts_with("urn:") || r.starts_with("mailto:") {
        return r.to_owned();
    }
    if let Some(frag) = r.strip_prefix('#') {
        let stem = base.trim_end_matches('#');
        return format!("{stem}#{frag}");
    }
    if base.ends_with('#') || base.ends_with('/') {
        format!("{base}{r}")
    } else {
        format!("{base}#{r}")
    }
}

pub(crate) fn local_name(iri: &str) -> &str {
    iri.rsplit(['#', '/']).next().unwrap_or(iri)
}

/// Validates a freshly assembled model and collects structural warnings.
pub(crate) fn validate(
    model: &mut OntologyModel,
    warnings: &mut Vec<LoadWarning>,
) -> Result<(), OntologyError> {
    for c in &mut model.classes {
        c.primary_label = c.primary_label.trim().to_owned();
        for l in &mut c.alt_labels {
            *l = l.trim().to_owned();
        }
        c.alt_labels.retain(|l| !l.is_empty());
        if c.primary_label.is_empty() {
            return Err(OntologyError::EmptyLabel(c.iri.clone()));
        }
    }
    model.classes.sort();
    for w in model.classes.windows(2) {
        if w[0].iri == w[1].iri {
            return Err(OntologyError::DuplicateIri(w[0].iri.clone()));
        }
    }
    let declared: BTreeSet<&str> = model.classes.iter().map(|c| c.iri.as_str()).collect();
    for (child, parent) in &model.subclass_edges {
        for end in [child, parent] {
            if !declared.contains(end.as_str()) {
                return Err(OntologyError::DanglingEdge {
                    child: child.clone(),
                    parent: parent.clone(),
                    missing: end.clone(),
                });
            }
        }
    }
    let mut parents: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for (c, p) in &model.subclass_edges {
        parents.entry(c.as_str()).or_default().push(p.clone());
    }
    for (iri, ps) in parents {
        if ps.len() >= 2 {
            warnings.push(LoadWarning::MultiParent {
                iri: iri.to_owned(),
                parents: ps,
            });
        }
    }
    let (_, dropped) = model.acyclic_edges();
    if !dropped.is_empty() {
        warnings.push(LoadWarning::Cycle {
            edges_dropped: dropped,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(iri: &str, label: &str) -> ClassEntry {
        ClassEntry {
            iri: iri.into(),
            primary_label: label.into(),
            alt_labels: vec![],
            definition: None,
            source_ref: None,
        }
    }

    fn model(classes: Vec<ClassEntry>, edges: &[(&str, &str)]) -> OntologyModel {
        OntologyModel {
            ontology_id: "t".into(),
            iri_base: "http://x/t#".into(),
            domain_category: DomainCategory::DomainSpecific,
            classes,
            subclass_edges: edges.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            object_properties: BTreeSet::new(),
            datatype_properties: BTreeSet::new(),
            plural_fold: false,
        }
    }

    #[test]
    fn chain_has_single_root() {
        let m = model(
            vec![class("A", "a"), class("B", "b"), class("C", "c")],
            &[("A", "B"), ("B", "C")],
        );
        assert_eq!(m.roots(), vec!["C"]);
        let s = ontology_stats(&m);
        assert_eq!((s.classes, s.subclass_edges, s.roots), (3, 2, 1));
    }

    #[test]
    fn empty_stats() {
        let s = ontology_stats(&model(vec![], &[]));
        assert_eq!(
            (s.classes, s.object_properties, s.datatype_properties, s.subclass_edges, s.roots),
            (0, 0, 0, 0, 0)
        );
    }

    #[test]
    fn cycle_is_warned_and_broken_at_lowest_edge() {
        let mut m = model(
            vec![class("A", "a"), class("B", "b"), class("C", "c")],
            &[("A", "B"), ("B", "C"), ("C", "A")],
        );
        let mut w = Vec::new();
        validate(&mut m, &mut w).unwrap();
        assert_eq!(
            w,
            vec![LoadWarning::Cycle {
                edges_dropped: vec![("A".into(), "B".into())]
            }]
        );
        let (edges, _) = m.acyclic_edges();
        assert_eq!(edges.len(), 2);
        assert!(find_cycle(&edges).is_none());
    }

    #[test]
    fn multi_parent_is_a_note_not_an_error() {
        let mut m = model(
            vec![class("A", "a"), class("B", "b"), class("C", "c")],
            &[("A", "B"), ("A", "C")],
        );
        let mut w = Vec::new();
        validate(&mut m, &mut w).unwrap();
        assert!(matches!(&w[0], LoadWarning::MultiParent { iri, parents } if iri == "A" && parents.len() == 2));
    }

    #[test]
    fn validation_errors() {
        let mut m = model(vec![class("A", "a")], &[("A", "B")]);
        assert!(matches!(
            validate(&mut m, &mut vec![]),
            Err(OntologyError::DanglingEdge { missing, .. }) if missing == "B"
        ));
        let mut m = model(vec![class("A", "a"), class("A", "b")], &[]);
        assert!(matches!(validate(&mut m, &mut vec![]), Err(OntologyError::DuplicateIri(_))));
        let mut m = model(vec![class("A", "  ")], &[]);
        assert!(matches!(validate(&mut m, &mut vec![]), Err(OntologyError::EmptyLabel(_))));
    }

    #[test]
    fn iri_resolution() {
        assert_eq!(resolve_iri("http://x/o#", "Res"), "http://x/o#Res");
        assert_eq!(resolve_iri("http://x/o", "#Res"), "http://x/o#Res");
        assert_eq!(resolve_iri("http://x/o#", "#Res"), "http://x/o#Res");
        assert_eq!(resolve_iri("http://x/o", "Res"), "http://x/o#Res");
        assert_eq!(resolve_iri("http://x/o#", "http://y/z#Q"), "http://y/z#Q");
        assert_eq!(local_name("http://x/o#Res"), "Res");
    }
}

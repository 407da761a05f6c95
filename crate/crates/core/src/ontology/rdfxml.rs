//! RDF/XML import restricted to the constructs annotation needs.
//!
//! Recognized: `owl:Ontology`, named `owl:Class` (`rdf:about` or `rdf:ID`)
//! with `rdfs:label`, `skos:altLabel`, `skos:definition`, `dcterms:source`
//! and `rdfs:subClassOf rdf:resource=...`, plus named `owl:ObjectProperty`
//! and `owl:DatatypeProperty`. The first `rdfs:label` is the primary label;
//! further labels become alternates. Everything else (restrictions,
//! anonymous classes, imports) is skipped with a warning.
//!
//! Ontology metadata uses the `https://normcheck.dev/ns#` vocabulary on the
//! `owl:Ontology` element: `ontologyId`, `domainCategory`, `pluralFold`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use roxmltree::{Document, Node};

use super::{
    local_name, resolve_iri, validate, ClassEntry, DomainCategory, LoadWarning, LoadedOntology,
    OntologyError, OntologyModel,
};

const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
const OWL: &str = "http://www.w3.org/2002/07/owl#";
const SKOS: &str = "http://www.w3.org/2004/02/skos/core#";
const DCTERMS: &str = "http://purl.org/dc/terms/";
const XML: &str = "http://www.w3.org/XML/1998/namespace";
pub const NORMCHECK_NS: &str = "https://normcheck.dev/ns#";

pub fn load_ontology_rdfxml_subset(path: &Path) -> Result<LoadedOntology, OntologyError> {
    let raw = fs::read_to_string(path).map_err(|source| OntologyError::Io {
        path: path.to_owned(),
        source,
    })?;
    let fallback_id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("ontology")
        .to_owned();
    parse_rdfxml_subset(&raw, &fallback_id)
}

fn is(node: &Node, ns: &str, name: &str) -> bool {
    node.is_element() && node.tag_name().namespace() == Some(ns) && node.tag_name().name() == name
}

fn describe(node: &Node) -> String {
    match node.tag_name().namespace() {
        Some(RDF) => format!("rdf:{}", node.tag_name().name()),
        Some(RDFS) => format!("rdfs:{}", node.tag_name().name()),
        Some(OWL) => format!("owl:{}", node.tag_name().name()),
        Some(SKOS) => format!("skos:{}", node.tag_name().name()),
        Some(ns) => format!("{{{ns}}}{}", node.tag_name().name()),
        None => node.tag_name().name().to_owned(),
    }
}

fn text_of(node: &Node) -> String {
    node.children()
        .filter(|c| c.is_text())
        .filter_map(|c| c.text())
        .collect::<String>()
        .trim()
        .to_owned()
}

#[derive(Default)]
struct ClassAcc {
    labels: Vec<String>,
    alt_labels: Vec<String>,
    definition: Option<String>,
    source_ref: Option<String>,
}

/// Parses RDF/XML text. `fallback_id` names the ontology when the document
/// does not carry an explicit identifier.
pub fn parse_rdfxml_subset(xml: &str, fallback_id: &str) -> Result<LoadedOntology, OntologyError> {
    let doc = Document::parse(xml).map_err(|e| OntologyError::Parse(e.to_string()))?;
    let root = doc.root_element();
    if !is(&root, RDF, "RDF") {
        return Err(OntologyError::Parse(format!(
            "root element is {}, expected rdf:RDF",
            describe(&root)
        )));
    }
    let mut warnings = Vec::new();
    let mut base = root.attribute((XML, "base")).map(str::to_owned);
    let mut ontology_id = None;
    let mut category = None;
    let mut plural_fold = false;
    let mut classes: BTreeMap<String, ClassAcc> = BTreeMap::new();
    let mut edges = BTreeSet::new();
    let mut object_properties = BTreeSet::new();
    let mut datatype_properties = BTreeSet::new();

    // The ontology header may set the base, so read it first.
    for node in root.children().filter(|n| is(n, OWL, "Ontology")) {
        if base.is_none() {
            if let Some(about) = node.attribute((RDF, "about")) {
                base = Some(format!("{}#", about.trim_end_matches('#')));
            }
        }
        for child in node.children().filter(Node::is_element) {
            if is(&child, NORMCHECK_NS, "ontologyId") {
                ontology_id = Some(text_of(&child));
            } else if is(&child, NORMCHECK_NS, "domainCategory") {
                let v = text_of(&child);
                category = Some(v.parse::<DomainCategory>().map_err(OntologyError::Parse)?);
            } else if is(&child, NORMCHECK_NS, "pluralFold") {
                plural_fold = text_of(&child) == "true";
            } else if is(&child, OWL, "imports") {
                warnings.push(LoadWarning::Unsupported {
                    construct: "owl:imports".into(),
                    context: "owl:Ontology".into(),
                });
            }
        }
    }
    let base = base.unwrap_or_default();
    let subject = |node: &Node| -> Option<String> {
        if let Some(about) = node.attribute((RDF, "about")) {
            Some(resolve_iri(&base, about))
        } else {
            node.attribute((RDF, "ID")).map(|id| resolve_iri(&base, &format!("#{id}")))
        }
    };

    for node in root.children().filter(Node::is_element) {
        if is(&node, OWL, "Ontology") {
            continue;
        }
        if is(&node, OWL, "ObjectProperty") || is(&node, OWL, "DatatypeProperty") {
            let Some(iri) = subject(&node) else {
                warnings.push(LoadWarning::Unsupported {
                    construct: format!("anonymous {}", describe(&node)),
                    context: "rdf:RDF".into(),
                });
                continue;
            };
            let set = if is(&node, OWL, "ObjectProperty") {
                &mut object_properties
            } else {
                &mut datatype_properties
            };
            set.insert(iri);
            continue;
        }
        if !is(&node, OWL, "Class") {
            warnings.push(LoadWarning::Unsupported {
                construct: describe(&node),
                context: "rdf:RDF".into(),
            });
            continue;
        }
        let Some(iri) = subject(&node) else {
            warnings.push(LoadWarning::Unsupported {
                construct: "anonymous owl:Class".into(),
                context: "rdf:RDF".into(),
            });
            continue;
        };
        let acc = classes.entry(iri.clone()).or_default();
        for child in node.children().filter(Node::is_element) {
            if is(&child, RDFS, "label") {
                acc.labels.push(text_of(&child));
            } else if is(&child, SKOS, "altLabel") {
                acc.alt_labels.push(text_of(&child));
            } else if is(&child, SKOS, "definition") {
                acc.definition = Some(text_of(&child));
            } else if is(&child, DCTERMS, "source") {
                acc.source_ref = Some(text_of(&child));
            } else if is(&child, RDFS, "subClassOf") {
                if let Some(parent) = child.attribute((RDF, "resource")) {
                    edges.insert((iri.clone(), resolve_iri(&base, parent)));
                } else {
                    let inner = child
                        .children()
                        .find(Node::is_element)
                        .map(|n| describe(&n))
                        .unwrap_or_else(|| "empty rdfs:subClassOf".into());
                    warnings.push(LoadWarning::Unsupported {
                        construct: inner,
                        context: format!("rdfs:subClassOf of {iri}"),
                    });
                }
            } else {
                warnings.push(LoadWarning::Unsupported {
                    construct: describe(&child),
                    context: iri.clone(),
                });
            }
        }
    }

    let classes = classes
        .into_iter()
        .map(|(iri, acc)| {
            let mut labels = acc.labels.into_iter();
            let primary_label = match labels.next() {
                Some(l) => l,
                None => {
                    warnings.push(LoadWarning::MissingLabel { iri: iri.clone() });
                    local_name(&iri).to_owned()
                }
            };
            let alt_labels = labels.chain(acc.alt_labels).collect();
            ClassEntry {
                iri,
                primary_label,
                alt_labels,
                definition: acc.definition,
                source_ref: acc.source_ref,
            }
        })
        .collect();

    let mut model = OntologyModel {
        ontology_id: ontology_id.unwrap_or_else(|| fallback_id.to_owned()),
        iri_base: base,
        domain_category: category.unwrap_or(DomainCategory::DomainSpecific),
        classes,
        subclass_edges: edges,
        object_properties,
        datatype_properties,
        plural_fold,
    };
    validate(&mut model, &mut warnings)?;
    Ok(LoadedOntology { model, warnings })
}

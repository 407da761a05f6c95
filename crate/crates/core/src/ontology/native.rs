use std::fs;
use std::path::Path;

use serde::Deserialize;

use super::{
    resolve_iri, validate, ClassEntry, DomainCategory, LoadedOntology, OntologyError,
    OntologyModel,
};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NativeClass {
    iri: String,
    primary_label: String,
    #[serde(default)]
    alt_labels: Vec<String>,
    #[serde(default)]
    definition: Option<String>,
    #[serde(default)]
    source_ref: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NativeOntology {
    ontology_id: String,
    iri_base: String,
    domain_category: DomainCategory,
    #[serde(default)]
    classes: Vec<NativeClass>,
    #[serde(default)]
    subclass_edges: Vec<(String, String)>,
    #[serde(default)]
    object_properties: Vec<String>,
    #[serde(default)]
    datatype_properties: Vec<String>,
    #[serde(default)]
    plural_fold: bool,
}

pub fn load_ontology_native(path: &Path) -> Result<LoadedOntology, OntologyError> {
    let raw = fs::read_to_string(path).map_err(|source| OntologyError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_native(&raw)
}

pub fn parse_native(json: &str) -> Result<LoadedOntology, OntologyError> {
    let n: NativeOntology =
        serde_json::from_str(json).map_err(|e| OntologyError::Parse(e.to_string()))?;
    let base = n.iri_base.clone();
    let iri = |r: &str| resolve_iri(&base, r);

    let mut object_properties = std::collections::BTreeSet::new();
    for p in &n.object_properties {
        if !object_properties.insert(iri(p)) {
            return Err(OntologyError::DuplicateIri(iri(p)));
        }
    }
    let mut datatype_properties = std::collections::BTreeSet::new();
    for p in &n.datatype_properties {
        if !datatype_properties.insert(iri(p)) {
            return Err(OntologyError::DuplicateIri(iri(p)));
        }
    }

    let mut model = OntologyModel {
        ontology_id: n.ontology_id,
        iri_base: n.iri_base.clone(),
        domain_category: n.domain_category,
        classes: n
            .classes
            .into_iter()
            .map(|c| ClassEntry {
                iri: iri(&c.iri),
                primary_label: c.primary_label,
                alt_labels: c.alt_labels,
                definition: c.definition,
                source_ref: c.source_ref,
            })
            .collect(),
        subclass_edges: n
            .subclass_edges
            .iter()
            .map(|(c, p)| (iri(c), iri(p)))
            .collect(),
        object_properties,
        datatype_properties,
        plural_fold: n.plural_fold,
    };
    let mut warnings = Vec::new();
    validate(&mut model, &mut warnings)?;
    Ok(LoadedOntology { model, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_ontology_is_valid() {
        let l = parse_native(
            r#"{"ontology_id":"e","iri_base":"http://x/e#","domain_category":"GenericStandards","classes":[]}"#,
        )
        .unwrap();
        assert!(l.model.classes.is_empty());
        assert!(l.warnings.is_empty());
    }

    #[test]
    fn dangling_edge() {
        let err = parse_native(
            r#"{"ontology_id":"e","iri_base":"http://x/e#","domain_category":"GenericStandards",
                "classes":[{"iri":"A","primary_label":"a"}],"subclass_edges":[["A","B"]]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, OntologyError::DanglingEdge { missing, .. } if missing == "http://x/e#B"));
    }

    #[test]
    fn malformed_json() {
        assert!(matches!(parse_native("{"), Err(OntologyError::Parse(_))));
        assert!(matches!(
            parse_native(r#"{"ontology_id":"e","iri_base":"b","domain_category":"Nope"}"#),
            Err(OntologyError::Parse(_))
        ));
    }

    #[test]
    fn duplicate_property() {
        let err = parse_native(
            r#"{"ontology_id":"e","iri_base":"http://x/e#","domain_category":"GenericStandards",
                "object_properties":["p","p"]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, OntologyError::DuplicateIri(_)));
    }
}

//! Regenerates the ontology fixtures under `fixtures/ontologies/`, each in
//! the native JSON format and as an RDF/XML twin.
//!
//! ```text
//! cargo run -p normcheck-core --example gen_fixtures -- fixtures/ontologies
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use serde_json::json;

struct Spec {
    id: &'static str,
    base: &'static str,
    category: &'static str,
    plural_fold: bool,
    /// `Local|primary label|alt;alt|Parent;Parent`, one class per line.
    classes: &'static str,
    object_properties: &'static [&'static str],
    datatype_properties: &'static [&'static str],
}

const ISTO: Spec = Spec {
    id: "isto",
    base: "https://normcheck.dev/fixtures/isto#",
    category: "GenericStandards",
    plural_fold: false,
    classes: "\
Standardization|standardization||
StandardizationActivity|standardization activity||Standardization
NormativeDocument|normative document||Standardization
Deliverable|deliverable||NormativeDocument
Standard|standard||Deliverable
InternationalStandard|International Standard|IS|Standard
EuropeanStandard|European Standard||Standard
NationalStandard|national standard||Standard
TechnicalSpecification|Technical Specification|TS|Deliverable
TechnicalReport|Technical Report|TR|Deliverable
PubliclyAvailableSpecification|Publicly Available Specification|PAS|Deliverable
InternationalWorkshopAgreement|International Workshop Agreement|IWA|Deliverable
Guide|guide||Deliverable
Amendment|amendment||Deliverable
TechnicalCorrigendum|technical corrigendum||Deliverable
Series|series||NormativeDocument
MultiPartStandard|multi-part standard||Standard;Series
Directive|directive||NormativeDocument
Regulation|regulation||NormativeDocument
CodeOfPractice|code of practice||NormativeDocument
Directives|ISO/IEC Directives||NormativeDocument
DraftingRules|drafting rules||NormativeDocument
Register|register||NormativeDocument
Vocabulary|vocabulary||NormativeDocument
DocumentElement|document element||Standardization
Clause|clause||DocumentElement
Subclause|subclause||Clause
Scope|scope||Clause
NormativeReferences|normative references||Clause
TermsAndDefinitions|terms and definitions||Clause
Annex|annex||DocumentElement
NormativeAnnex|normative annex||Annex
InformativeAnnex|informative annex||Annex
Bibliography|bibliography||DocumentElement
Foreword|foreword||DocumentElement
Introduction|introduction||DocumentElement
Note|note||DocumentElement
Example|example||DocumentElement
Table|table||DocumentElement
Figure|figure||DocumentElement
Formula|formula||DocumentElement
Title|title||DocumentElement
TermEntry|term entry||DocumentElement
Definition|definition||DocumentElement
StandardNumber|standard number||DocumentElement
PartNumber|part number||DocumentElement
PublicationDate|publication date||DocumentElement
Term|term||DocumentElement
PreferredTerm|preferred term||Term
AdmittedTerm|admitted term||Term
DeprecatedTerm|deprecated term||Term
AbbreviatedTerm|abbreviated term||Term
Symbol|symbol||DocumentElement
Provision|provision||DocumentElement
Requirement|requirement||Provision
Recommendation|recommendation||Provision
Statement|statement||Provision
Permission|permission||Statement
Possibility|possibility||Statement
Instruction|instruction||Provision
StandardsOrganization|standards organization||Standardization
SDO|standards developing organization|SDO|StandardsOrganization
ISO|ISO|International Organization for Standardization|SDO
IEC|IEC|International Electrotechnical Commission|SDO
CEN|CEN|European Committee for Standardization|SDO
CENELEC|CENELEC||SDO
ITU|ITU|International Telecommunication Union|SDO
NationalBody|national body||StandardsOrganization
MemberBody|member body||NationalBody
LiaisonOrganization|liaison organization||StandardsOrganization
MaintenanceAgency|maintenance agency||StandardsOrganization
RegistrationAuthority|registration authority|RA|StandardsOrganization
Secretariat|secretariat||StandardsOrganization
Committee|committee||StandardsOrganization
TechnicalCommittee|technical committee|TC|Committee
JointTechnicalCommittee|joint technical committee|JTC|TechnicalCommittee
Subcommittee|subcommittee|SC|Committee
WorkingGroup|working group|WG|Committee
Role|role||Standardization
Convenor|convenor||Role
ProjectLeader|project leader||Role
Expert|expert||Role
CommitteeChair|committee chair||Role
Delegate|delegate||Role
Stakeholder|stakeholder||Role
StandardUser|standard user||Role
DevelopmentProcess|standards development process||StandardizationActivity
DevelopmentTrack|standards development track||StandardizationActivity
Stage|stage||StandardizationActivity
PreliminaryStage|preliminary stage||Stage
ProposalStage|proposal stage||Stage
PreparatoryStage|preparatory stage||Stage
CommitteeStage|committee stage||Stage
EnquiryStage|enquiry stage||Stage
ApprovalStage|approval stage||Stage
PublicationStage|publication stage||Stage
ReviewStage|review stage||Stage
WithdrawalStage|withdrawal stage||Stage
SystematicReview|systematic review||StandardizationActivity
Ballot|ballot||StandardizationActivity
Vote|vote||Ballot
Comment|comment||StandardizationActivity
Consensus|consensus||StandardizationActivity
Draft|draft||Deliverable
NewWorkItemProposal|new work item proposal|NP|Draft
WorkingDraft|working draft|WD|Draft
CommitteeDraft|committee draft|CD|Draft
DraftInternationalStandard|draft International Standard|DIS|Draft
FinalDraftInternationalStandard|final draft International Standard|FDIS|Draft
Publication|publication||StandardizationActivity
Edition|edition||Publication
Revision|revision||Publication
Withdrawal|withdrawal||Publication
ConformityAssessment|conformity assessment||StandardizationActivity
Certification|certification||ConformityAssessment
Accreditation|accreditation||ConformityAssessment
Conformance|conformance||ConformityAssessment
Interoperability|interoperability||Standardization
Copyright|copyright||Standardization
ICS|International Classification for Standards|ICS|Standardization
Terminology|terminology||Standardization
Concept|concept||Terminology
ConceptSystem|concept system||Terminology
Designation|designation||Terminology
DataElement|data element||Terminology
",
    object_properties: &[
        "hasPart", "isPartOf", "developedBy", "publishedBy", "references", "isReferencedBy",
        "supersedes", "isSupersededBy", "amends", "hasAmendment", "corrects", "hasCorrigendum",
        "hasStage", "followsStage", "precedesStage", "hasTrack", "hasSecretariat", "hasConvenor",
        "hasMember", "isMemberOf", "hasScope", "hasClause", "hasAnnex", "hasTermEntry", "defines",
        "isDefinedIn", "adaptedFrom", "hasEdition", "hasRevision", "reviewedBy", "approvedBy",
        "votedBy", "hasBallot", "hasComment", "liaisesWith", "isResponsibleFor", "hasDeliverable",
        "hasRequirement", "citesNormatively", "citesInformatively", "adopts", "isAdoptedAs",
        "hasDesignation", "classifiedUnder",
    ],
    datatype_properties: &["hasNumber", "hasTitle", "hasPublicationDate", "hasPageCount"],
};

const ISO15531: Spec = Spec {
    id: "iso15531",
    base: "https://normcheck.dev/fixtures/iso15531#",
    category: "DomainSpecific",
    plural_fold: true,
    classes: "\
ManufacturingManagement|manufacturing management||
ManagementData|manufacturing management data||ManufacturingManagement
Part|part||ManufacturingManagement
Resource|resource||ManufacturingManagement
ResourceInformation|resource information||ManagementData
ResourceHierarchy|resource hierarchy||ResourceInformation
ResourceCharacteristics|resource characteristics||ResourceInformation
ResourceAdministration|resource administration||ResourceInformation
ResourceStatus|resource status||ResourceInformation
ResourceView|resource view||ResourceInformation
ResourceRepresentation|resource representation||ResourceInformation
ResourceConfiguration|resource configuration||ResourceInformation
ResourceUsage|resource usage||ResourceInformation
ResourceCapability|resource capability||ResourceInformation
Capacity|capacity||ResourceInformation
Availability|availability||ResourceInformation
Machine|machine||Resource
MachineTool|machine tool||Machine
Robot|robot||Machine
Conveyor|conveyor||Machine
Tool|tool||Resource
Fixture|fixture||Resource
Operator|operator||Resource
Personnel|personnel||Resource
Energy|energy||Resource
Material|material||ManufacturingManagement
RawMaterial|raw material||Material
Consumable|consumable||Material
Waste|waste||Material
Inventory|inventory||Material
Stock|stock||Inventory
Product|product||ManufacturingManagement
Component|component||Product
Assembly|assembly||Product
Batch|batch||Product
Lot|lot||Batch
Order|order||ManufacturingManagement
ProductionOrder|production order||Order
CustomerOrder|customer order||Order
PurchaseOrder|purchase order||Order
WorkOrder|work order||Order
Demand|demand||Order
ManufacturingProcess|manufacturing process||ManufacturingManagement
Operation|operation||ManufacturingProcess
Task|task||ManufacturingProcess
Activity|activity||ManufacturingProcess
Routing|routing||ManufacturingProcess
ProcessPlan|process plan||ManufacturingProcess
Setup|setup||Operation
Maintenance|maintenance||Operation
Inspection|inspection||Operation
Transport|transport||Operation
Storage|storage||Operation
Flow|flow||ManufacturingManagement
ManufacturingFlow|manufacturing flow||Flow
MaterialFlow|material flow||Flow
InformationFlow|information flow||Flow
FlowControl|flow control||Flow
FlowMonitoring|flow monitoring||Flow
Buffer|buffer||Flow
Queue|queue||Flow
Time|time||ManufacturingManagement
TimeDomain|time domain||Time
TimeInterval|time interval||Time
TimePoint|time point||Time
Duration|duration||Time
Date|date||Time
Calendar|calendar||Time
TimeUnit|time unit||Time
Clock|clock||Time
Event|event||Time
Schedule|schedule||Time
Timetable|timetable||Schedule
Deadline|deadline||Time
Delay|delay||Time
Shift|shift||Time
PlanningHorizon|planning horizon||Time
ShopFloor|shop floor||ManufacturingManagement
DataAcquisition|data acquisition||ShopFloor
Sensor|sensor||ShopFloor
Measurement|measurement||DataAcquisition
AcquisitionDevice|acquisition device||DataAcquisition
Workstation|workstation||ShopFloor
ManufacturingCell|manufacturing cell||ShopFloor
ProductionLine|production line||ShopFloor
Plant|plant||ShopFloor
Enterprise|enterprise||ManufacturingManagement
Supplier|supplier||Enterprise
Customer|customer||Enterprise
ProductionPlanning|production planning||ManufacturingManagement
Scheduling|scheduling||ProductionPlanning
ProductionControl|production control||ManufacturingManagement
Monitoring|monitoring||ProductionControl
Dispatching|dispatching||ProductionControl
Quality|quality||ManufacturingManagement
Cost|cost||ManufacturingManagement
Constraint|constraint||ManufacturingManagement
State|state||ManufacturingManagement
",
    object_properties: &[
        "usesResource", "producesProduct", "consumesMaterial", "hasOperation", "hasStatus",
        "hasView", "hasCharacteristic", "occursAt", "lastsFor", "followedBy", "belongsToOrder",
        "locatedIn",
    ],
    datatype_properties: &["hasIdentifier", "hasQuantity", "hasStartTime", "hasEndTime"],
};

const TECH: Spec = Spec {
    id: "tech",
    base: "https://normcheck.dev/fixtures/tech#",
    category: "ExternalTechnical",
    plural_fold: false,
    classes: "\
TechnicalConcept|technical concept||
ModellingLanguage|modelling language||TechnicalConcept
EXPRESS|EXPRESS||ModellingLanguage
EXPRESSG|EXPRESS-G||ModellingLanguage
UML|UML|Unified Modeling Language|ModellingLanguage
OWL|OWL|Web Ontology Language|ModellingLanguage
RDF|RDF|Resource Description Framework|ModellingLanguage
XML|XML|Extensible Markup Language|ModellingLanguage
SPARQL|SPARQL||ModellingLanguage
Schema|schema||TechnicalConcept
ModelElement|model element||TechnicalConcept
Entity|entity||ModelElement
Attribute|attribute||ModelElement
DataType|data type||ModelElement
SelectType|select type||DataType
EnumerationType|enumeration type||DataType
AggregationType|aggregation type||DataType
DefinedType|defined type||DataType
GlobalRule|global rule||ModelElement
WhereRule|where rule||ModelElement
Function|function||ModelElement
Procedure|procedure||ModelElement
Inheritance|inheritance||ModelElement
Subtype|subtype||ModelElement
Supertype|supertype||ModelElement
Ontology|ontology||TechnicalConcept
OntologyClass|class||Ontology
ObjectProperty|object property||Ontology
DatatypeProperty|datatype property||Ontology
Axiom|axiom||Ontology
Individual|individual||Ontology
Taxonomy|taxonomy||Ontology
Thesaurus|thesaurus||Ontology
Namespace|namespace||Ontology
IRI|IRI|Internationalized Resource Identifier|Ontology
Reasoner|reasoner||Ontology
ProductData|product data||TechnicalConcept
ProductModel|product model||ProductData
ExchangeStructure|exchange structure||ProductData
DataExchange|data exchange||ProductData
ApplicationProtocol|application protocol|AP|ProductData
IntegratedResource|integrated resource||ProductData
ImplementationMethod|implementation method||ProductData
ConformanceClass|conformance class||ProductData
PartsLibrary|parts library|P-LIB|ProductData
SparePart|part|spare part|PartsLibrary
TextProcessing|text processing||TechnicalConcept
Corpus|corpus||TextProcessing
Annotation|annotation||TextProcessing
SemanticAnnotation|semantic annotation||Annotation
Gazetteer|gazetteer||TextProcessing
Tokenizer|tokenizer||TextProcessing
Token|token||TextProcessing
NamedEntity|named entity||TextProcessing
InformationExtraction|information extraction||TextProcessing
PatternRule|pattern rule||TextProcessing
GATE|GATE|General Architecture for Text Engineering|TextProcessing
JAPE|JAPE||PatternRule
Database|database||TechnicalConcept
Record|record||Database
Identifier|identifier||Database
Metadata|metadata||Database
Repository|repository||Database
Network|network||TechnicalConcept
Internet|Internet||Network
WebService|web service||Network
CommunicationProtocol|communication protocol||Network
Message|message||Network
Software|software||TechnicalConcept
SoftwareApplication|software application||Software
Interface|interface||Software
API|API|application programming interface|Interface
Middleware|middleware||Software
File|file||Software
FileFormat|file format||File
",
    object_properties: &[
        "declaresEntity", "hasAttribute", "subtypeOf", "importsSchema", "annotates", "describedBy",
        "exchangedVia", "implements",
    ],
    datatype_properties: &["hasName", "hasVersion", "hasMediaType"],
};

struct Class<'a> {
    local: &'a str,
    label: &'a str,
    alts: Vec<&'a str>,
    parents: Vec<&'a str>,
}

fn classes(spec: &Spec) -> Vec<Class<'_>> {
    spec.classes
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split('|').collect();
            assert_eq!(f.len(), 4, "bad class line: {line}");
            let list = |s: &'static str| s.split(';').filter(|x| !x.is_empty()).collect::<Vec<_>>();
            Class {
                local: f[0],
                label: f[1],
                alts: list(f[2]),
                parents: list(f[3]),
            }
        })
        .collect()
}

fn native_json(spec: &Spec) -> String {
    let cs = classes(spec);
    let class_values: Vec<_> = cs
        .iter()
        .map(|c| {
            let mut v = json!({ "iri": c.local, "primary_label": c.label });
            if !c.alts.is_empty() {
                v["alt_labels"] = json!(c.alts);
            }
            v
        })
        .collect();
    let edges: Vec<[&str; 2]> = cs
        .iter()
        .flat_map(|c| c.parents.iter().map(move |p| [c.local, *p]))
        .collect();
    let doc = json!({
        "ontology_id": spec.id,
        "iri_base": spec.base,
        "domain_category": spec.category,
        "plural_fold": spec.plural_fold,
        "classes": class_values,
        "subclass_edges": edges,
        "object_properties": spec.object_properties,
        "datatype_properties": spec.datatype_properties,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json");
    s.push('\n');
    s
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn rdf_xml(spec: &Spec) -> String {
    let mut x = String::new();
    let _ = writeln!(x, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        x,
        r#"<rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"
         xmlns:rdfs="http://www.w3.org/2000/01/rdf-schema#"
         xmlns:owl="http://www.w3.org/2002/07/owl#"
         xmlns:skos="http://www.w3.org/2004/02/skos/core#"
         xmlns:nc="https://normcheck.dev/ns#"
         xml:base="{}">"#,
        spec.base
    );
    let _ = writeln!(x, r#"  <owl:Ontology rdf:about="{}">"#, spec.base.trim_end_matches('#'));
    let _ = writeln!(x, "    <nc:ontologyId>{}</nc:ontologyId>", spec.id);
    let _ = writeln!(x, "    <nc:domainCategory>{}</nc:domainCategory>", spec.category);
    let _ = writeln!(x, "    <nc:pluralFold>{}</nc:pluralFold>", spec.plural_fold);
    let _ = writeln!(x, "  </owl:Ontology>");
    for c in classes(spec) {
        let _ = writeln!(x, r##"  <owl:Class rdf:about="#{}">"##, c.local);
        let _ = writeln!(x, "    <rdfs:label>{}</rdfs:label>", esc(c.label));
        for a in &c.alts {
            let _ = writeln!(x, "    <skos:altLabel>{}</skos:altLabel>", esc(a));
        }
        for p in &c.parents {
            let _ = writeln!(x, r##"    <rdfs:subClassOf rdf:resource="#{p}"/>"##);
        }
        let _ = writeln!(x, "  </owl:Class>");
    }
    for p in spec.object_properties {
        let _ = writeln!(x, r##"  <owl:ObjectProperty rdf:about="#{p}"/>"##);
    }
    for p in spec.datatype_properties {
        let _ = writeln!(x, r##"  <owl:DatatypeProperty rdf:about="#{p}"/>"##);
    }
    x.push_str("</rdf:RDF>\n");
    x
}

/// Lowercased label with the plural fold applied, as the label index keys it.
fn label_key(label: &str) -> String {
    let mut words: Vec<String> = label.split_whitespace().map(str::to_lowercase).collect();
    if let Some(last) = words.last_mut() {
        if last.chars().count() > 3 && last.ends_with('s') && last.chars().all(char::is_alphabetic) {
            last.pop();
        }
    }
    words.join(" ")
}

fn main() {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures/ontologies".into()));
    fs::create_dir_all(&out).expect("create output dir");

    let specs = [ISTO, ISO15531, TECH];
    let mut keys: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for spec in &specs {
        for c in classes(spec) {
            for l in std::iter::once(c.label).chain(c.alts.iter().copied()) {
                keys.entry(label_key(l)).or_default().push(format!("{}:{}", spec.id, c.local));
            }
        }
    }
    for (k, owners) in &keys {
        // "part" is deliberately shared by two ontologies
        if owners.len() > 1 && k != "part" {
            panic!("label {k:?} is not unique: {owners:?}");
        }
    }
    assert_eq!(classes(&ISTO).len(), 125);
    assert_eq!(ISTO.object_properties.len(), 44);
    assert_eq!(ISTO.datatype_properties.len(), 4);

    for spec in &specs {
        let stem = format!("{}_fixture", spec.id);
        fs::write(out.join(format!("{stem}.json")), native_json(spec)).expect("write json");
        fs::write(out.join(format!("{stem}.owl")), rdf_xml(spec)).expect("write owl");
        println!("{stem}: {} classes", classes(spec).len());
    }
}

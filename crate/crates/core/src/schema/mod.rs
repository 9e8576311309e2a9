//! Class and property inventory of a knowledge graph, gathered from
//! terminological declarations (a Turtle subset) and from instance data.
//!
//! Evidence from both sources is unioned. A property's kind is decided by
//! its declaration when there is one, otherwise by the objects it was
//! observed with, otherwise by its declared range.

mod rdf;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::sparql::{Position, XSD};

pub use rdf::{parse_ntriples, parse_turtle, NTriples, Node, ResolvedTriple, OWL, RDF, RDFS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("syntax error at {position}: {message}")]
    Syntax { position: Position, message: String },
    #[error("unresolvable prefix '{0}:'")]
    UnresolvablePrefix(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PropertyKind {
    Datatype,
    Object,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Tbox,
    Abox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct KindEvidence {
    pub declared_datatype: bool,
    pub declared_object: bool,
    pub literal_objects: bool,
    pub resource_objects: bool,
    pub literal_range: bool,
    pub class_range: bool,
}

impl KindEvidence {
    pub fn kind(&self) -> PropertyKind {
        let pick = |lit: bool, res: bool| match (lit, res) {
            (true, false) => Some(PropertyKind::Datatype),
            (false, true) => Some(PropertyKind::Object),
            (true, true) => Some(PropertyKind::Unknown),
            (false, false) => None,
        };
        pick(self.declared_datatype, self.declared_object)
            .or_else(|| pick(self.literal_objects, self.resource_objects))
            .or_else(|| pick(self.literal_range, self.class_range))
            .unwrap_or(PropertyKind::Unknown)
    }

    fn union(&mut self, other: &KindEvidence) {
        self.declared_datatype |= other.declared_datatype;
        self.declared_object |= other.declared_object;
        self.literal_objects |= other.literal_objects;
        self.resource_objects |= other.resource_objects;
        self.literal_range |= other.literal_range;
        self.class_range |= other.class_range;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyInfo {
    pub iri: String,
    pub label: Option<String>,
    pub kind: PropertyKind,
    pub domains: BTreeSet<String>,
    pub source: BTreeSet<Source>,
    pub evidence: KindEvidence,
}

impl PropertyInfo {
    fn new(iri: &str) -> Self {
        PropertyInfo {
            iri: iri.to_string(),
            label: None,
            kind: PropertyKind::Unknown,
            domains: BTreeSet::new(),
            source: BTreeSet::new(),
            evidence: KindEvidence::default(),
        }
    }

    fn merge(&mut self, other: &PropertyInfo) {
        self.label = min_label(self.label.take(), other.label.clone());
        self.domains.extend(other.domains.iter().cloned());
        self.source.extend(other.source.iter().copied());
        self.evidence.union(&other.evidence);
        self.kind = self.evidence.kind();
    }
}

/// Order-independent label choice used when two sources disagree.
fn min_label(a: Option<String>, b: Option<String>) -> Option<String> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindFilter {
    Datatype,
    Any,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SchemaGraph {
    pub classes: BTreeSet<String>,
    pub class_labels: BTreeMap<String, String>,
    pub properties: BTreeMap<String, PropertyInfo>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemaWarning {
    UndeclaredDomainClass { property: String, class: String },
    ConflictingKind { property: String },
    NonIriDomain { property: String },
    UnusedLabel { iri: String },
}

impl fmt::Display for SchemaWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemaWarning::UndeclaredDomainClass { property, class } => {
                write!(
                    f,
                    "domain {class} of {property} is not a declared class; registered without label"
                )
            }
            SchemaWarning::ConflictingKind { property } => {
                write!(
                    f,
                    "{property} has both literal and resource evidence; kind left unknown"
                )
            }
            SchemaWarning::NonIriDomain { property } => write!(f, "rdfs:domain of {property} is not an IRI; ignored"),
            SchemaWarning::UnusedLabel { iri } => write!(f, "label for {iri} which is neither a class nor a property"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedSchema {
    pub graph: SchemaGraph,
    pub warnings: Vec<SchemaWarning>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AboxInduction {
    pub delta: SchemaGraph,
    pub warnings: Vec<SchemaWarning>,
    /// Triples that could not contribute (literal subjects, non-IRI types).
    pub skipped: usize,
}

/// Builds a schema graph from terminological Turtle.
pub fn load_schema(turtle_text: &str) -> Result<LoadedSchema, SchemaError> {
    let triples = parse_turtle(turtle_text)?;
    Ok(schema_from_tbox(&triples))
}

fn schema_from_tbox(triples: &[ResolvedTriple]) -> LoadedSchema {
    let rdf_type = format!("{RDF}type");
    let class_types = [format!("{OWL}Class"), format!("{RDFS}Class")];
    let property_types = [
        format!("{OWL}DatatypeProperty"),
        format!("{OWL}ObjectProperty"),
        format!("{RDF}Property"),
        format!("{OWL}AnnotationProperty"),
    ];
    let domain = format!("{RDFS}domain");
    let range = format!("{RDFS}range");
    let label = format!("{RDFS}label");

    let mut graph = SchemaGraph::default();
    let mut warnings = Vec::new();
    let mut labels: BTreeMap<String, Vec<(u8, String)>> = BTreeMap::new();
    let mut ranges: Vec<(String, String)> = Vec::new();

    for t in triples {
        let Some(s) = t.subject.iri() else { continue };
        let p = t.predicate.as_str();
        let object_iri = t.object.iri();
        if p == rdf_type {
            match object_iri {
                Some(o) if class_types.iter().any(|c| c == o) => {
                    graph.classes.insert(s.to_string());
                }
                Some(o) if property_types.iter().any(|c| c == o) => {
                    let prop = graph.property_entry(s);
                    if o == property_types[0] {
                        prop.evidence.declared_datatype = true;
                    } else if o == property_types[1] {
                        prop.evidence.declared_object = true;
                    }
                }
                _ => {}
            }
        } else if p == domain {
            match object_iri {
                Some(o) => {
                    graph.property_entry(s).domains.insert(o.to_string());
                }
                None => warnings.push(SchemaWarning::NonIriDomain {
                    property: s.to_string(),
                }),
            }
        } else if p == range {
            graph.property_entry(s);
            if let Some(o) = object_iri {
                ranges.push((s.to_string(), o.to_string()));
            }
        } else if p == label {
            if let Node::Literal { value, language, .. } = &t.object {
                let rank = match language.as_deref() {
                    None => 0,
                    Some(l) if l.eq_ignore_ascii_case("en") || l.to_ascii_lowercase().starts_with("en-") => 1,
                    Some(_) => 2,
                };
                labels.entry(s.to_string()).or_default().push((rank, value.clone()));
            }
        }
    }

    for prop in graph.properties.values_mut() {
        prop.source.insert(Source::Tbox);
        for class in &prop.domains {
            if graph.classes.insert(class.clone()) {
                warnings.push(SchemaWarning::UndeclaredDomainClass {
                    property: prop.iri.clone(),
                    class: class.clone(),
                });
            }
        }
    }
    for (prop, target) in ranges {
        let literal = target.starts_with(XSD) || target == format!("{RDFS}Literal");
        let is_class = graph.classes.contains(&target);
        let evidence = &mut graph.property_entry(&prop).evidence;
        evidence.literal_range |= literal;
        evidence.class_range |= is_class;
    }
    for prop in graph.properties.values_mut() {
        prop.kind = prop.evidence.kind();
        if prop.evidence.declared_datatype && prop.evidence.declared_object {
            warnings.push(SchemaWarning::ConflictingKind {
                property: prop.iri.clone(),
            });
        }
    }
    for (iri, mut candidates) in labels {
        candidates.sort();
        let best = candidates.swap_remove(0).1;
        let mut used = false;
        if graph.classes.contains(&iri) {
            graph.class_labels.insert(iri.clone(), best.clone());
            used = true;
        }
        if let Some(prop) = graph.properties.get_mut(&iri) {
            prop.label = Some(best);
            used = true;
        }
        if !used {
            warnings.push(SchemaWarning::UnusedLabel { iri });
        }
    }
    LoadedSchema { graph, warnings }
}

/// Induces property domains and kinds from instance triples.
///
/// Only subjects with at least one `rdf:type` contribute. The stream is
/// buffered, so type triples may appear after the facts they qualify.
pub fn induce_from_abox(triples: impl IntoIterator<Item = ResolvedTriple>) -> AboxInduction {
    let rdf_type = format!("{RDF}type");
    let mut types: BTreeMap<Node, BTreeSet<String>> = BTreeMap::new();
    let mut facts: Vec<(Node, String, bool)> = Vec::new();
    let mut skipped = 0;
    for t in triples {
        if t.subject.is_literal() {
            skipped += 1;
            continue;
        }
        if t.predicate == rdf_type {
            match t.object {
                Node::Iri(class) => {
                    types.entry(t.subject).or_default().insert(class);
                }
                _ => skipped += 1,
            }
        } else {
            let literal = t.object.is_literal();
            facts.push((t.subject, t.predicate, literal));
        }
    }

    let mut delta = SchemaGraph::default();
    for classes in types.values() {
        delta.classes.extend(classes.iter().cloned());
    }
    for (subject, predicate, literal) in facts {
        let Some(classes) = types.get(&subject) else { continue };
        let prop = delta.property_entry(&predicate);
        prop.domains.extend(classes.iter().cloned());
        prop.source.insert(Source::Abox);
        if literal {
            prop.evidence.literal_objects = true;
        } else {
            prop.evidence.resource_objects = true;
        }
    }
    let mut warnings = Vec::new();
    for prop in delta.properties.values_mut() {
        prop.kind = prop.evidence.kind();
        if prop.evidence.literal_objects && prop.evidence.resource_objects {
            warnings.push(SchemaWarning::ConflictingKind {
                property: prop.iri.clone(),
            });
        }
    }
    AboxInduction {
        delta,
        warnings,
        skipped,
    }
}

impl SchemaGraph {
    fn property_entry(&mut self, iri: &str) -> &mut PropertyInfo {
        self.properties
            .entry(iri.to_string())
            .or_insert_with(|| PropertyInfo::new(iri))
    }

    /// Set union of classes, domains, sources and kind evidence. Labels
    /// resolve to the lexicographically smallest candidate so that merge
    /// order never matters.
    pub fn merge(&mut self, other: &SchemaGraph) {
        self.classes.extend(other.classes.iter().cloned());
        for (iri, label) in &other.class_labels {
            let current = self.class_labels.remove(iri);
            let chosen = min_label(current, Some(label.clone())).expect("label present");
            self.class_labels.insert(iri.clone(), chosen);
        }
        for (iri, info) in &other.properties {
            match self.properties.get_mut(iri) {
                Some(existing) => existing.merge(info),
                None => {
                    let mut info = info.clone();
                    info.kind = info.evidence.kind();
                    self.properties.insert(iri.clone(), info);
                }
            }
        }
    }

    /// Properties whose domains contain `class`, sorted by IRI.
    pub fn properties_for_class(&self, class: &str, filter: KindFilter) -> Vec<&PropertyInfo> {
        self.properties
            .values()
            .filter(|p| p.domains.contains(class))
            .filter(|p| filter == KindFilter::Any || p.kind == PropertyKind::Datatype)
            .collect()
    }

    /// The declared label of a class or property, else a label derived
    /// from the IRI's local name.
    pub fn label_of(&self, iri: &str) -> Option<String> {
        if let Some(label) = self.class_labels.get(iri) {
            return Some(label.clone());
        }
        if let Some(label) = self.properties.get(iri).and_then(|p| p.label.clone()) {
            return Some(label);
        }
        label_from_iri(iri)
    }

    pub fn has_term(&self, iri: &str) -> bool {
        self.classes.contains(iri) || self.properties.contains_key(iri)
    }
}

pub fn properties_for_class<'a>(schema: &'a SchemaGraph, class: &str, filter: KindFilter) -> Vec<&'a PropertyInfo> {
    schema.properties_for_class(class, filter)
}

pub fn label_of(schema: &SchemaGraph, iri: &str) -> Option<String> {
    schema.label_of(iri)
}

/// The text after the last `#`, `/` or `:` of an IRI.
pub fn local_name(iri: &str) -> &str {
    iri.rfind(['#', '/', ':']).map(|i| &iri[i + 1..]).unwrap_or(iri)
}

/// Splits a local name on `_`, `-`, `.` and camel-case boundaries and
/// lowercases the pieces. Local names with digits are treated as opaque
/// codes (for example `RO_0002162`) and yield `None`.
pub fn label_from_iri(iri: &str) -> Option<String> {
    let local = local_name(iri);
    if local.is_empty() || local.chars().any(|c| c.is_ascii_digit()) {
        return None;
    }
    let mut words: Vec<String> = Vec::new();
    for part in local.split(['_', '-', '.']).filter(|p| !p.is_empty()) {
        let chars: Vec<char> = part.chars().collect();
        let mut current = String::new();
        for (i, &c) in chars.iter().enumerate() {
            let prev = i.checked_sub(1).map(|j| chars[j]);
            let next = chars.get(i + 1).copied();
            let boundary = c.is_uppercase()
                && prev
                    .is_some_and(|p| p.is_lowercase() || (p.is_uppercase() && next.is_some_and(|n| n.is_lowercase())));
            if boundary && !current.is_empty() {
                words.push(std::mem::take(&mut current));
            }
            current.extend(c.to_lowercase());
        }
        if !current.is_empty() {
            words.push(current);
        }
    }
    (!words.is_empty()).then(|| words.join(" "))
}

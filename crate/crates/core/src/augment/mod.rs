//! Seed augmentation: every variable standing for an instance of a known
//! class is extended, one property at a time, with each datatype property
//! the schema attaches to that class.

mod question;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::rewrite::Strategy;
use crate::schema::{local_name, KindFilter, SchemaGraph};
use crate::sparql::{
    parse_query, resolve_term, serialize, PatternElement, Projection, SelectQuery, SparqlError, Term, TriplePattern,
    Variable, RDF_TYPE,
};
use crate::template::TemplateError;

pub use question::{normalize_question, question_for_property, QuestionTemplateSet, DEFAULT_TEMPLATE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AugmentError {
    #[error("seed {id}: {source}")]
    SeedParseFailure { id: String, source: SparqlError },
    #[error("duplicate seed id {0}")]
    DuplicateSeedId(String),
    #[error("invalid seed: {0}")]
    InvalidSeed(String),
    #[error("unknown template id {0}")]
    UnknownTemplateId(String),
    #[error("invalid label {0:?}")]
    InvalidLabel(String),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Query(#[from] SparqlError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedExample {
    pub id: String,
    pub question: String,
    pub query: SelectQuery,
}

impl SeedExample {
    pub fn parse(id: &str, question: &str, query_text: &str) -> Result<Self, AugmentError> {
        if id.is_empty() {
            return Err(AugmentError::InvalidSeed("empty id".into()));
        }
        if question.trim().is_empty() {
            return Err(AugmentError::InvalidSeed(format!("seed {id} has an empty question")));
        }
        let query = parse_query(query_text).map_err(|source| AugmentError::SeedParseFailure {
            id: id.to_string(),
            source,
        })?;
        Ok(SeedExample {
            id: id.to_string(),
            question: question.to_string(),
            query,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Evidence {
    ExplicitType,
    DomainInference,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarClassBinding {
    pub variable: Variable,
    pub class: String,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BindingWarning {
    MultipleExplicitTypes { variable: Variable, classes: Vec<String> },
    AmbiguousDomain { variable: Variable, classes: Vec<String> },
}

impl fmt::Display for BindingWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BindingWarning::MultipleExplicitTypes { variable, classes } => {
                write!(
                    f,
                    "{variable} has several explicit types ({}); skipped",
                    classes.join(", ")
                )
            }
            BindingWarning::AmbiguousDomain { variable, classes } => {
                write!(f, "{variable} could denote any of {}; skipped", classes.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BindingAnalysis {
    pub bindings: Vec<VarClassBinding>,
    pub warnings: Vec<BindingWarning>,
}

pub fn find_class_instance_vars(query: &SelectQuery, schema: &SchemaGraph) -> Vec<VarClassBinding> {
    analyze_class_instance_vars(query, schema).bindings
}

/// Binds variables to classes, preferring explicit `rdf:type` triples over
/// domain inference. Output follows the variables' first occurrence.
pub fn analyze_class_instance_vars(query: &SelectQuery, schema: &SchemaGraph) -> BindingAnalysis {
    let mut triples = Vec::new();
    query.where_clause.for_each_triple(&mut |t| triples.push(t));
    let predicate_of = |t: &TriplePattern| resolve_term(&t.predicate, &query.prologue).ok();

    let mut analysis = BindingAnalysis::default();
    for var in query.variables() {
        let subject_triples = triples.iter().filter(|t| t.subject.as_variable() == Some(&var));
        let mut explicit = BTreeSet::new();
        let mut inferred = BTreeSet::new();
        for t in subject_triples {
            let Some(p) = predicate_of(t) else { continue };
            if p == RDF_TYPE {
                if t.object.is_constant_iri() {
                    if let Ok(class) = resolve_term(&t.object, &query.prologue) {
                        explicit.insert(class);
                    }
                }
            } else if let Some(info) = schema.properties.get(&p) {
                if info.domains.len() == 1 {
                    inferred.extend(info.domains.iter().cloned());
                }
            }
        }
        let (classes, evidence) = if explicit.is_empty() {
            (inferred, Evidence::DomainInference)
        } else {
            (explicit, Evidence::ExplicitType)
        };
        match classes.len() {
            0 => {}
            1 => analysis.bindings.push(VarClassBinding {
                variable: var,
                class: classes.into_iter().next().expect("one class"),
                evidence,
            }),
            _ => {
                let classes = classes.into_iter().collect();
                analysis.warnings.push(match evidence {
                    Evidence::ExplicitType => BindingWarning::MultipleExplicitTypes { variable: var, classes },
                    Evidence::DomainInference => BindingWarning::AmbiguousDomain { variable: var, classes },
                });
            }
        }
    }
    analysis
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedExample {
    pub id: String,
    pub seed_id: String,
    pub question: String,
    pub query: SelectQuery,
    pub query_text: String,
    /// Unset until a rewriting strategy has been applied.
    pub strategy: Option<Strategy>,
    pub added_property: Option<String>,
    pub added_variable: Option<Variable>,
}

impl AugmentedExample {
    pub fn is_pass_through(&self) -> bool {
        self.added_property.is_none()
    }
}

/// Human-readable name of a schema term: its label, else its local name,
/// else the IRI itself.
pub fn display_label(schema: &SchemaGraph, iri: &str) -> String {
    schema
        .label_of(iri)
        .or_else(|| Some(local_name(iri).to_string()).filter(|l| !l.is_empty()))
        .unwrap_or_else(|| iri.to_string())
}

/// Emits one example per (bound variable, missing datatype property), in
/// binding order and then property IRI order. Ids are left empty.
pub fn augment_seed(
    seed: &SeedExample,
    schema: &SchemaGraph,
    templates: &QuestionTemplateSet,
) -> Result<Vec<AugmentedExample>, AugmentError> {
    let query = &seed.query;
    let mut present: HashSet<(Variable, String)> = HashSet::new();
    query.where_clause.for_each_triple(&mut |t| {
        if let (Some(v), Ok(p)) = (t.subject.as_variable(), resolve_term(&t.predicate, &query.prologue)) {
            present.insert((v.clone(), p));
        }
    });
    let taken: HashSet<String> = query.variables().iter().map(|v| v.as_str().to_string()).collect();

    let mut out = Vec::new();
    for binding in find_class_instance_vars(query, schema) {
        let class_label = display_label(schema, &binding.class);
        for prop in schema.properties_for_class(&binding.class, KindFilter::Datatype) {
            if present.contains(&(binding.variable.clone(), prop.iri.clone())) {
                continue;
            }
            let property_label = display_label(schema, &prop.iri);
            let new_var = fresh_variable(schema.label_of(&prop.iri).as_deref(), &taken);
            let augmented = extend_query(query, &binding.variable, &prop.iri, &new_var);
            let query_text = serialize(&augmented, true)?;
            out.push(AugmentedExample {
                id: String::new(),
                seed_id: seed.id.clone(),
                question: templates.render(&seed.question, &class_label, &property_label)?,
                query: augmented,
                query_text,
                strategy: None,
                added_property: Some(prop.iri.clone()),
                added_variable: Some(new_var),
            });
        }
    }
    Ok(out)
}

/// Augments every seed. A pass-through keeps the seed id; augmentations are
/// numbered `<seed_id>/aug1`, `<seed_id>/aug2`, ...
pub fn augment_catalog(
    seeds: &[SeedExample],
    schema: &SchemaGraph,
    templates: &QuestionTemplateSet,
    include_seeds: bool,
) -> Result<Vec<AugmentedExample>, AugmentError> {
    let mut ids = HashSet::new();
    if let Some(dup) = seeds.iter().find(|s| !ids.insert(s.id.as_str())) {
        return Err(AugmentError::DuplicateSeedId(dup.id.clone()));
    }
    let mut out = Vec::new();
    for seed in seeds {
        if include_seeds {
            out.push(AugmentedExample {
                id: seed.id.clone(),
                seed_id: seed.id.clone(),
                question: seed.question.clone(),
                query: seed.query.clone(),
                query_text: serialize(&seed.query, true)?,
                strategy: None,
                added_property: None,
                added_variable: None,
            });
        }
        for (k, mut example) in augment_seed(seed, schema, templates)?.into_iter().enumerate() {
            example.id = format!("{}/aug{}", seed.id, k + 1);
            out.push(example);
        }
    }
    Ok(out)
}

fn fresh_variable(label: Option<&str>, taken: &HashSet<String>) -> Variable {
    let base = label
        .map(identifier_from_label)
        .filter(|b| !b.is_empty())
        .unwrap_or_else(|| "value".to_string());
    let mut candidate = base.clone();
    let mut k = 2;
    while taken.contains(&candidate) {
        candidate = format!("{base}{k}");
        k += 1;
    }
    Variable::new(candidate).expect("identifier is a valid variable name")
}

/// Lowercase ASCII alphanumerics of a label, prefixed with `v` when the
/// result would start with a digit. May be empty.
pub fn identifier_from_label(label: &str) -> String {
    let mut id: String = label
        .chars()
        .filter(char::is_ascii_alphanumeric)
        .map(|c| c.to_ascii_lowercase())
        .collect();
    if id.starts_with(|c: char| c.is_ascii_digit()) {
        id.insert(0, 'v');
    }
    id
}

fn extend_query(query: &SelectQuery, var: &Variable, property: &str, new_var: &Variable) -> SelectQuery {
    let mut q = query.clone();
    let elements = &mut q.where_clause.elements;
    let is_triple = |e: &PatternElement| matches!(e, PatternElement::Triple(_));
    let mentions = |e: &PatternElement| matches!(e, PatternElement::Triple(t) if t.mentions(var));
    let at = elements
        .iter()
        .rposition(mentions)
        .or_else(|| elements.iter().rposition(is_triple))
        .map_or(0, |i| i + 1);
    let triple = TriplePattern::new(
        Term::Variable(var.clone()),
        q.prologue.compact(property),
        Term::Variable(new_var.clone()),
    );
    elements.insert(at, PatternElement::Triple(triple));
    if let Projection::Variables(vars) = &mut q.projection {
        vars.push(new_var.clone());
    }
    q
}

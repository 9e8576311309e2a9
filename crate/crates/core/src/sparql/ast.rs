//! Abstract syntax tree for the supported SELECT subset.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use super::lexer::raw_variables;
use super::SparqlError;

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

/// A query variable name, without its `?` sigil.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable(String);

impl Variable {
    pub fn new(name: impl Into<String>) -> Result<Self, SparqlError> {
        let name = name.into();
        if is_valid_var_name(&name) {
            Ok(Variable(name))
        } else {
            Err(SparqlError::InvalidVariableName(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub(crate) fn is_valid_var_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrefixedName {
    pub prefix: String,
    pub local: String,
}

impl fmt::Display for PrefixedName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.prefix, self.local)
    }
}

/// Datatype annotation of a typed literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Datatype {
    Iri(String),
    Prefixed(PrefixedName),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    /// Unescaped lexical form.
    pub lexical: String,
    pub datatype: Option<Datatype>,
    pub language: Option<String>,
}

impl Literal {
    pub fn plain(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: None,
            language: None,
        }
    }

    pub fn typed_xsd(lexical: impl Into<String>, local: &str) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: Some(Datatype::Iri(format!("{XSD}{local}"))),
            language: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Iri(String),
    PrefixedName(PrefixedName),
    Variable(Variable),
    Literal(Literal),
    /// The `a` shorthand for `rdf:type`.
    A,
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Variable(Variable::new(name).expect("valid variable name"))
    }

    pub fn prefixed(prefix: &str, local: &str) -> Term {
        Term::PrefixedName(PrefixedName {
            prefix: prefix.to_string(),
            local: local.to_string(),
        })
    }

    pub fn as_variable(&self) -> Option<&Variable> {
        match self {
            Term::Variable(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_constant_iri(&self) -> bool {
        matches!(self, Term::Iri(_) | Term::PrefixedName(_) | Term::A)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
    pub trailing_comment: Option<String>,
}

impl TriplePattern {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Self {
        TriplePattern {
            subject,
            predicate,
            object,
            trailing_comment: None,
        }
    }

    pub fn with_comment(mut self, comment: impl Into<String>) -> Self {
        self.trailing_comment = Some(comment.into());
        self
    }

    pub fn mentions(&self, var: &Variable) -> bool {
        [&self.subject, &self.predicate, &self.object]
            .iter()
            .any(|t| t.as_variable() == Some(var))
    }

    fn terms_mut(&mut self) -> [&mut Term; 3] {
        [&mut self.subject, &mut self.predicate, &mut self.object]
    }
}

#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternElement {
    Triple(TriplePattern),
    Optional(GraphPattern),
    /// Raw expression text following the `FILTER` keyword, e.g. `(?a != ?b)`.
    Filter(String),
    Union(GraphPattern, GraphPattern),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GraphPattern {
    pub elements: Vec<PatternElement>,
}

impl GraphPattern {
    pub fn new(elements: Vec<PatternElement>) -> Self {
        GraphPattern { elements }
    }

    /// Visits every triple pattern in document order, descending into
    /// OPTIONAL and UNION blocks.
    pub fn for_each_triple<'a>(&'a self, f: &mut impl FnMut(&'a TriplePattern)) {
        for element in &self.elements {
            match element {
                PatternElement::Triple(t) => f(t),
                PatternElement::Optional(g) => g.for_each_triple(f),
                PatternElement::Union(l, r) => {
                    l.for_each_triple(f);
                    r.for_each_triple(f);
                }
                PatternElement::Filter(_) => {}
            }
        }
    }

    pub fn for_each_triple_mut(&mut self, f: &mut impl FnMut(&mut TriplePattern)) {
        for element in &mut self.elements {
            match element {
                PatternElement::Triple(t) => f(t),
                PatternElement::Optional(g) => g.for_each_triple_mut(f),
                PatternElement::Union(l, r) => {
                    l.for_each_triple_mut(f);
                    r.for_each_triple_mut(f);
                }
                PatternElement::Filter(_) => {}
            }
        }
    }

    fn for_each_filter_mut(&mut self, f: &mut impl FnMut(&mut String)) {
        for element in &mut self.elements {
            match element {
                PatternElement::Filter(raw) => f(raw),
                PatternElement::Optional(g) => g.for_each_filter_mut(f),
                PatternElement::Union(l, r) => {
                    l.for_each_filter_mut(f);
                    r.for_each_filter_mut(f);
                }
                PatternElement::Triple(_) => {}
            }
        }
    }

    fn collect_variables(&self, out: &mut Vec<Variable>, seen: &mut HashSet<Variable>) {
        fn push(v: Variable, out: &mut Vec<Variable>, seen: &mut HashSet<Variable>) {
            if seen.insert(v.clone()) {
                out.push(v);
            }
        }
        for element in &self.elements {
            match element {
                PatternElement::Triple(t) => {
                    for term in [&t.subject, &t.predicate, &t.object] {
                        if let Term::Variable(v) = term {
                            push(v.clone(), out, seen);
                        }
                    }
                }
                PatternElement::Filter(raw) => {
                    for rv in raw_variables(raw) {
                        push(Variable(raw[rv.start..rv.end].to_string()), out, seen);
                    }
                }
                PatternElement::Optional(g) => g.collect_variables(out, seen),
                PatternElement::Union(l, r) => {
                    l.collect_variables(out, seen);
                    r.collect_variables(out, seen);
                }
            }
        }
    }

    pub fn triple_count(&self) -> usize {
        let mut n = 0;
        self.for_each_triple(&mut |_| n += 1);
        n
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Prologue {
    pub base: Option<String>,
    pub prefixes: BTreeMap<String, String>,
}

impl Prologue {
    pub fn with_prefix(mut self, prefix: &str, iri: &str) -> Self {
        self.prefixes.insert(prefix.to_string(), iri.to_string());
        self
    }

    /// Abbreviates an absolute IRI with the longest matching namespace whose
    /// remainder is a valid local name.
    pub fn compact(&self, iri: &str) -> Term {
        self.prefixes
            .iter()
            .filter_map(|(prefix, ns)| {
                let local = iri.strip_prefix(ns.as_str())?;
                is_plain_local(local).then_some((ns.len(), prefix, local))
            })
            .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(a.1)))
            .map(|(_, prefix, local)| Term::prefixed(prefix, local))
            .unwrap_or_else(|| Term::Iri(iri.to_string()))
    }
}

fn is_plain_local(local: &str) -> bool {
    !local.is_empty()
        && local.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        && !local.starts_with('-')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Projection {
    Star,
    Variables(Vec<Variable>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderDirection {
    Asc,
    Desc,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Modifiers {
    pub order_by: Vec<(Variable, OrderDirection)>,
    pub limit: Option<u64>,
    pub offset: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SelectQuery {
    pub prologue: Prologue,
    pub distinct: bool,
    pub projection: Projection,
    pub where_clause: GraphPattern,
    pub modifiers: Modifiers,
}

impl SelectQuery {
    /// Variables in first-occurrence order over the projection, the WHERE
    /// clause (including FILTER spans) and finally ORDER BY.
    pub fn variables(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        if let Projection::Variables(vars) = &self.projection {
            for v in vars {
                if seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
        }
        self.where_clause.collect_variables(&mut out, &mut seen);
        for (v, _) in &self.modifiers.order_by {
            if seen.insert(v.clone()) {
                out.push(v.clone());
            }
        }
        out
    }

    pub fn where_variables(&self) -> HashSet<Variable> {
        let mut out = Vec::new();
        self.where_clause.collect_variables(&mut out, &mut HashSet::new());
        out.into_iter().collect()
    }

    /// Checks the structural invariants that the parser enforces.
    pub fn check_invariants(&self) -> Result<(), SparqlError> {
        if let Projection::Variables(vars) = &self.projection {
            let bound = self.where_variables();
            if let Some(missing) = vars.iter().find(|v| !bound.contains(*v)) {
                return Err(SparqlError::Semantic(format!(
                    "projected variable {missing} does not occur in the WHERE clause"
                )));
            }
            let mut seen = HashSet::new();
            if let Some(dup) = vars.iter().find(|v| !seen.insert(*v)) {
                return Err(SparqlError::Semantic(format!("variable {dup} projected twice")));
            }
        }
        Ok(())
    }

    pub fn triple_count(&self) -> usize {
        self.where_clause.triple_count()
    }

    pub fn projected_count(&self) -> Option<usize> {
        match &self.projection {
            Projection::Star => None,
            Projection::Variables(v) => Some(v.len()),
        }
    }

    /// Simultaneous variable substitution. Variables absent from `renames`
    /// keep their names. FILTER spans are rewritten token by token.
    pub fn rename_variables(&self, renames: &HashMap<Variable, Variable>) -> SelectQuery {
        let mut q = self.clone();
        let map = |v: &mut Variable| {
            if let Some(new) = renames.get(v) {
                *v = new.clone();
            }
        };
        if let Projection::Variables(vars) = &mut q.projection {
            vars.iter_mut().for_each(map);
        }
        q.where_clause.for_each_triple_mut(&mut |t| {
            for term in t.terms_mut() {
                if let Term::Variable(v) = term {
                    map(v);
                }
            }
        });
        q.where_clause.for_each_filter_mut(&mut |raw| {
            *raw = rename_in_raw(raw, renames);
        });
        for (v, _) in &mut q.modifiers.order_by {
            map(v);
        }
        q
    }

    pub fn strip_comments(&self) -> SelectQuery {
        let mut q = self.clone();
        q.where_clause.for_each_triple_mut(&mut |t| t.trailing_comment = None);
        q
    }

    pub fn comments(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.where_clause.for_each_triple(&mut |t| {
            if let Some(c) = &t.trailing_comment {
                out.push(c.clone());
            }
        });
        out
    }
}

fn rename_in_raw(raw: &str, renames: &HashMap<Variable, Variable>) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut last = 0;
    for rv in raw_variables(raw) {
        let name = &raw[rv.start..rv.end];
        if let Some(new) = renames.get(&Variable(name.to_string())) {
            out.push_str(&raw[last..rv.start]);
            out.push_str(new.as_str());
            last = rv.end;
        }
    }
    out.push_str(&raw[last..]);
    out
}

/// Collects the distinct variables of a query in first-occurrence order.
pub fn collect_variables(query: &SelectQuery) -> Vec<Variable> {
    query.variables()
}

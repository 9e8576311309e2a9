//! Surface-form rewriting strategies. Each strategy changes only variable
//! names and trailing comments, never the structure of a query.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::augment::{analyze_class_instance_vars, identifier_from_label, AugmentedExample, VarClassBinding};
use crate::schema::SchemaGraph;
use crate::sparql::{resolve_term, serialize, SelectQuery, SparqlError, Term, Variable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Original,
    OriginalWithComments,
    RandomVars,
    MeaningfulVars,
    MeaningfulVarsComments,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Original,
        Strategy::OriginalWithComments,
        Strategy::RandomVars,
        Strategy::MeaningfulVars,
        Strategy::MeaningfulVarsComments,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Original => "original",
            Strategy::OriginalWithComments => "original-with-comments",
            Strategy::RandomVars => "random-vars",
            Strategy::MeaningfulVars => "meaningful-vars",
            Strategy::MeaningfulVarsComments => "meaningful-vars-comments",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownStrategy(pub String);

impl fmt::Display for UnknownStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tags: Vec<_> = Strategy::ALL.iter().map(|s| s.as_str()).collect();
        write!(f, "unknown strategy '{}' (expected one of {})", self.0, tags.join(", "))
    }
}

impl std::error::Error for UnknownStrategy {}

impl FromStr for Strategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| UnknownStrategy(s.to_string()))
    }
}

/// Renames every variable to `x<k>` by first occurrence and drops comments.
pub fn rename_sequential(query: &SelectQuery) -> SelectQuery {
    let renames: HashMap<Variable, Variable> = query
        .variables()
        .into_iter()
        .enumerate()
        .map(|(k, v)| (v, Variable::new(format!("x{k}")).expect("valid name")))
        .collect();
    query.rename_variables(&renames).strip_comments()
}

/// Renames bound variables after their class label. Unbound variables, and
/// bound ones whose class has no usable label, keep their names; fresh
/// names never collide with kept ones.
pub fn rename_meaningful(query: &SelectQuery, bindings: &[VarClassBinding], schema: &SchemaGraph) -> SelectQuery {
    let mut targets: Vec<(&Variable, String)> = Vec::new();
    let mut seen = HashSet::new();
    for b in bindings {
        if !seen.insert(&b.variable) {
            continue;
        }
        let base = schema
            .label_of(&b.class)
            .map(|l| identifier_from_label(&l))
            .unwrap_or_default();
        if !base.is_empty() {
            targets.push((&b.variable, base));
        }
    }
    let renamed: HashSet<&Variable> = targets.iter().map(|(v, _)| *v).collect();
    let mut used: HashSet<String> = query
        .variables()
        .iter()
        .filter(|v| !renamed.contains(v))
        .map(|v| v.as_str().to_string())
        .collect();
    let mut renames = HashMap::new();
    for (var, base) in targets {
        let mut name = base.clone();
        let mut k = 2;
        while used.contains(&name) {
            name = format!("{base}{k}");
            k += 1;
        }
        used.insert(name.clone());
        renames.insert(var.clone(), Variable::new(name).expect("valid name"));
    }
    query.rename_variables(&renames)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CommentSummary {
    pub labeled: usize,
    /// Constant predicates that are unknown to the schema or have no label.
    pub unlabeled: BTreeSet<String>,
    pub unlabeled_triples: usize,
}

/// Sets each triple's comment to the label of its predicate. Triples with
/// variable or unlabeled predicates are left as they are.
pub fn inject_comments(query: &SelectQuery, schema: &SchemaGraph) -> (SelectQuery, CommentSummary) {
    let mut q = query.clone();
    let mut summary = CommentSummary::default();
    let prologue = query.prologue.clone();
    q.where_clause.for_each_triple_mut(&mut |t| {
        if matches!(t.predicate, Term::Variable(_)) {
            return;
        }
        let Ok(iri) = resolve_term(&t.predicate, &prologue) else {
            return;
        };
        let label = schema
            .has_term(&iri)
            .then(|| schema.label_of(&iri))
            .flatten()
            .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
            .filter(|l| !l.is_empty());
        match label {
            Some(label) => {
                t.trailing_comment = Some(label);
                summary.labeled += 1;
            }
            None => {
                summary.unlabeled.insert(iri);
                summary.unlabeled_triples += 1;
            }
        }
    });
    (q, summary)
}

pub fn apply_strategy(
    query: &SelectQuery,
    strategy: Strategy,
    bindings: &[VarClassBinding],
    schema: &SchemaGraph,
) -> SelectQuery {
    match strategy {
        Strategy::Original => query.strip_comments(),
        Strategy::OriginalWithComments => inject_comments(query, schema).0,
        Strategy::RandomVars => rename_sequential(query),
        Strategy::MeaningfulVars => rename_meaningful(query, bindings, schema).strip_comments(),
        Strategy::MeaningfulVarsComments => inject_comments(&rename_meaningful(query, bindings, schema), schema).0,
    }
}

/// Applies a strategy with bindings computed from the query itself.
pub fn rewrite(query: &SelectQuery, strategy: Strategy, schema: &SchemaGraph) -> SelectQuery {
    let bindings = analyze_class_instance_vars(query, schema).bindings;
    apply_strategy(query, strategy, &bindings, schema)
}

/// Rewrites an example's query and refreshes its text. The recorded added
/// variable follows the renaming.
pub fn rewrite_example(
    example: &AugmentedExample,
    strategy: Strategy,
    schema: &SchemaGraph,
) -> Result<AugmentedExample, SparqlError> {
    let bindings = analyze_class_instance_vars(&example.query, schema).bindings;
    let query = apply_strategy(&example.query, strategy, &bindings, schema);
    let added_variable = example.added_variable.as_ref().map(|v| {
        let position = example.query.variables().iter().position(|x| x == v);
        position.map_or_else(|| v.clone(), |i| query.variables()[i].clone())
    });
    Ok(AugmentedExample {
        query_text: serialize(&query, true)?,
        query,
        strategy: Some(strategy),
        added_variable,
        ..example.clone()
    })
}

/// Comment-free serialization after sequential renaming. Two queries that
/// differ only in variable names and comments share a canonical form.
pub fn canonicalize(query: &SelectQuery) -> Result<String, SparqlError> {
    serialize(&rename_sequential(query), false)
}

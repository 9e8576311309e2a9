//! A comment-preserving parser and canonical serializer for a subset of
//! SPARQL 1.1 SELECT queries.
//!
//! Accepted: `PREFIX`/`BASE`, `SELECT [DISTINCT]` with `*` or a variable
//! list, basic graph patterns with `;`/`,` abbreviations, `OPTIONAL`,
//! `FILTER`, `UNION`, `ORDER BY`, `LIMIT`, `OFFSET` and `#` comments.
//! Property paths, subqueries, blank nodes and the other query forms are
//! rejected with [`SparqlError::UnsupportedConstruct`].

mod ast;
pub(crate) mod lexer;
mod parser;
mod serialize;

pub use ast::{
    collect_variables, Datatype, GraphPattern, Literal, Modifiers, OrderDirection, PatternElement, PrefixedName,
    Projection, Prologue, SelectQuery, Term, TriplePattern, Variable, RDF_TYPE, XSD,
};
pub use lexer::Position;
pub use parser::parse_query;
pub use serialize::serialize;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SparqlError {
    #[error("syntax error at {position}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        position: Position,
        expected: Vec<String>,
        found: String,
    },
    #[error("unsupported construct {name} at {position}")]
    UnsupportedConstruct { name: String, position: Position },
    #[error("invalid query: {0}")]
    Semantic(String),
    #[error("unresolvable prefix '{0}:'")]
    UnresolvablePrefix(String),
    #[error("invalid variable name '{0}'")]
    InvalidVariableName(String),
    #[error("term {0} does not denote an IRI")]
    NotAnIri(String),
}

/// Resolves an IRI-denoting term to absolute IRI text.
pub fn resolve_term(term: &Term, prologue: &Prologue) -> Result<String, SparqlError> {
    match term {
        Term::A => Ok(RDF_TYPE.to_string()),
        Term::Iri(iri) => Ok(resolve_relative(prologue.base.as_deref(), iri)),
        Term::PrefixedName(p) => prologue
            .prefixes
            .get(&p.prefix)
            .map(|ns| format!("{}{}", resolve_relative(prologue.base.as_deref(), ns), p.local))
            .ok_or_else(|| SparqlError::UnresolvablePrefix(p.prefix.clone())),
        Term::Variable(v) => Err(SparqlError::NotAnIri(v.to_string())),
        Term::Literal(l) => Err(SparqlError::NotAnIri(format!("\"{}\"", l.lexical))),
    }
}

pub(crate) fn resolve_relative(base: Option<&str>, iri: &str) -> String {
    match base {
        Some(base) if url::Url::parse(iri).is_err() => url::Url::parse(base)
            .and_then(|b| b.join(iri))
            .map(|u| u.to_string())
            .unwrap_or_else(|_| format!("{base}{iri}")),
        _ => iri.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_a_to_rdf_type() {
        assert_eq!(
            resolve_term(&Term::A, &Prologue::default()).unwrap(),
            "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
        );
    }

    #[test]
    fn resolve_prefixed_name() {
        let p = Prologue::default().with_prefix("obo", "http://purl.obolibrary.org/obo/");
        assert_eq!(
            resolve_term(&Term::prefixed("obo", "RO_0002162"), &p).unwrap(),
            "http://purl.obolibrary.org/obo/RO_0002162"
        );
    }

    #[test]
    fn resolve_unbound_prefix_fails() {
        let err = resolve_term(&Term::prefixed("up", "Taxon"), &Prologue::default()).unwrap_err();
        assert_eq!(err, SparqlError::UnresolvablePrefix("up".into()));
    }

    #[test]
    fn resolve_relative_against_base() {
        let p = Prologue {
            base: Some("http://example.org/data/".into()),
            ..Prologue::default()
        };
        assert_eq!(
            resolve_term(&Term::Iri("gene".into()), &p).unwrap(),
            "http://example.org/data/gene"
        );
        assert!(resolve_term(&Term::var("x"), &p).is_err());
    }
}

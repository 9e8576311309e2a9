//! SPARQL 1.1 Protocol client for SELECT queries and a bounded-parallel
//! validator that executes whole datasets against an endpoint.

mod validate;

use std::collections::BTreeMap;
use std::time::Duration;

use reqwest::blocking::Client;
use reqwest::header::ACCEPT;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::sparql::{parse_query, serialize, SelectQuery, SparqlError};

pub use validate::{validate_dataset, Outcome, Totals, ValidateOptions, ValidationReport};

pub const RESULTS_JSON: &str = "application/sparql-results+json";
const EXCERPT_CHARS: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EndpointError {
    #[error("network error: {0}")]
    Network(String),
    #[error("HTTP {status}: {excerpt}")]
    Http { status: u16, excerpt: String },
    #[error("malformed results: {0}")]
    MalformedResults(String),
    #[error("request timed out")]
    Timeout,
    #[error("a LIMIT override of 0 would hide every result")]
    ZeroLimit,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Query(#[from] SparqlError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    Iri,
    Literal,
    Bnode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundValue {
    pub value: String,
    pub kind: ValueKind,
    pub datatype: Option<String>,
    pub language: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct BindingsTable {
    pub variables: Vec<String>,
    pub rows: Vec<BTreeMap<String, BoundValue>>,
}

impl BindingsTable {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Decodes a `application/sparql-results+json` SELECT document.
pub fn decode_results(body: &str) -> Result<BindingsTable, EndpointError> {
    let malformed = |m: &str| EndpointError::MalformedResults(m.to_string());
    let doc: Value = serde_json::from_str(body).map_err(|e| EndpointError::MalformedResults(e.to_string()))?;
    let variables: Vec<String> = doc
        .pointer("/head/vars")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("missing head.vars"))?
        .iter()
        .map(|v| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| malformed("non-string variable name"))
        })
        .collect::<Result<_, _>>()?;
    let bindings = doc
        .pointer("/results/bindings")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("missing results.bindings"))?;
    let mut rows = Vec::with_capacity(bindings.len());
    for binding in bindings {
        let object = binding
            .as_object()
            .ok_or_else(|| malformed("binding is not an object"))?;
        let mut row = BTreeMap::new();
        for (name, term) in object {
            if !variables.contains(name) {
                return Err(EndpointError::MalformedResults(format!(
                    "binding for undeclared variable {name}"
                )));
            }
            let field = |key: &str| term.get(key).and_then(Value::as_str).map(str::to_string);
            let kind = match field("type").as_deref() {
                Some("uri") => ValueKind::Iri,
                Some("literal" | "typed-literal") => ValueKind::Literal,
                Some("bnode") => ValueKind::Bnode,
                other => return Err(EndpointError::MalformedResults(format!("unknown term type {other:?}"))),
            };
            row.insert(
                name.clone(),
                BoundValue {
                    value: field("value").ok_or_else(|| malformed("term without value"))?,
                    kind,
                    datatype: field("datatype"),
                    language: field("xml:lang"),
                },
            );
        }
        rows.push(row);
    }
    Ok(BindingsTable { variables, rows })
}

/// Replaces the query's LIMIT, or adds one.
pub fn with_limit(query: &SelectQuery, limit: u64) -> Result<SelectQuery, EndpointError> {
    if limit == 0 {
        return Err(EndpointError::ZeroLimit);
    }
    let mut q = query.clone();
    q.modifiers.limit = Some(limit);
    Ok(q)
}

#[derive(Debug, Clone)]
pub struct EndpointClient {
    client: Client,
    endpoint: String,
}

impl EndpointClient {
    pub fn new(endpoint: &str, timeout: Duration) -> Result<Self, EndpointError> {
        url::Url::parse(endpoint).map_err(|e| EndpointError::InvalidConfig(format!("endpoint {endpoint}: {e}")))?;
        let client = Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| EndpointError::InvalidConfig(e.to_string()))?;
        Ok(EndpointClient {
            client,
            endpoint: endpoint.to_string(),
        })
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    /// POSTs a form-encoded `query=` request.
    pub fn execute(&self, query: &SelectQuery, limit_override: Option<u64>) -> Result<BindingsTable, EndpointError> {
        let query = match limit_override {
            Some(limit) => with_limit(query, limit)?,
            None => query.clone(),
        };
        let text = serialize(&query, false)?;
        let response = self
            .client
            .post(&self.endpoint)
            .header(ACCEPT, RESULTS_JSON)
            .form(&[("query", text.as_str())])
            .send()
            .map_err(transport_error)?;
        let status = response.status();
        let body = response.text().map_err(transport_error)?;
        if !status.is_success() {
            return Err(EndpointError::Http {
                status: status.as_u16(),
                excerpt: body.chars().take(EXCERPT_CHARS).collect(),
            });
        }
        decode_results(&body)
    }

    pub fn execute_text(&self, query_text: &str, limit_override: Option<u64>) -> Result<BindingsTable, EndpointError> {
        self.execute(&parse_query(query_text)?, limit_override)
    }
}

fn transport_error(e: reqwest::Error) -> EndpointError {
    if e.is_timeout() {
        EndpointError::Timeout
    } else {
        EndpointError::Network(error_chain(&e))
    }
}

fn error_chain(e: &dyn std::error::Error) -> String {
    let mut text = e.to_string();
    let mut source = e.source();
    while let Some(s) = source {
        text.push_str(": ");
        text.push_str(&s.to_string());
        source = s.source();
    }
    text
}

/// One-shot SELECT execution.
pub fn execute_select(
    endpoint: &str,
    query_text: &str,
    timeout: Duration,
    limit_override: Option<u64>,
) -> Result<BindingsTable, EndpointError> {
    EndpointClient::new(endpoint, timeout)?.execute_text(query_text, limit_override)
}

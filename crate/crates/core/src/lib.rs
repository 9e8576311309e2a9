//! Generation of question-to-SPARQL training data from a small seed
//! catalog and a knowledge-graph schema.
//!
//! The pipeline parses seed queries ([`sparql`]), reads the schema
//! ([`schema`]), adds one datatype property per generated query
//! ([`augment`]), rewrites variable names and comments ([`rewrite`]),
//! stores and partitions the result ([`dataset`]), scores model output
//! ([`metrics`]) and checks queries against a live endpoint ([`endpoint`]).

pub mod augment;
pub mod dataset;
pub mod endpoint;
pub mod metrics;
pub mod rewrite;
pub mod schema;
pub mod sparql;
pub mod template;

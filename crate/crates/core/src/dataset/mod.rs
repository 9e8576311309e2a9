//! Line-delimited dataset files, seeded nested partitions, stratified
//! train/test splits and fine-tuning prompt text.

mod records;
mod split;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::rewrite::Strategy;
use crate::template::{render, TemplateError};

pub use records::{from_jsonl, read_dataset, read_seeds, to_jsonl, write_dataset, DatasetRecord, Keyed, SeedRecord};
pub use split::{partition_size, shuffle, split_nested, train_test_split, SplitMix64, SplitSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatasetError {
    #[error("cannot write {path}: {message}")]
    DestinationUnwritable { path: String, message: String },
    #[error("cannot read {path}: {message}")]
    SourceUnreadable { path: String, message: String },
    #[error("line {line}: malformed record: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("duplicate id {id}{}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    DuplicateId { id: String, line: Option<usize> },
    #[error("invalid record: {0}")]
    InvalidRecord(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("invalid split: {0}")]
    InvalidSplitSpec(String),
    #[error("cannot stratify: {0}")]
    UnsatisfiableStratification(String),
    #[error("unknown template id {0}")]
    UnknownTemplateId(String),
    #[error(transparent)]
    Template(#[from] TemplateError),
}

pub const DEFAULT_TEST_FRACTION: f64 = 0.2;

pub const DEFAULT_PROMPT: &str = "Translate the question into a SPARQL query.\nQuestion: {question}\nQuery:\n{query}";

const PROMPTS: &[(&str, &str)] = &[
    ("default", DEFAULT_PROMPT),
    ("question-only", "Question: {question}\nSPARQL:\n{query}"),
];

pub fn prompt_template_ids() -> impl Iterator<Item = &'static str> {
    PROMPTS.iter().map(|(id, _)| *id)
}

/// Renders a record with one of the built-in prompt templates.
pub fn format_prompt(record: &DatasetRecord, template_id: &str) -> Result<String, DatasetError> {
    let template = PROMPTS
        .iter()
        .find(|(id, _)| *id == template_id)
        .map(|(_, t)| *t)
        .ok_or_else(|| DatasetError::UnknownTemplateId(template_id.to_string()))?;
    format_prompt_with(record, template)
}

/// Placeholders: `{id}`, `{question}`, `{query}`, `{strategy}`.
pub fn format_prompt_with(record: &DatasetRecord, template: &str) -> Result<String, DatasetError> {
    Ok(render(
        template,
        &[
            ("id", &record.id),
            ("question", &record.question),
            ("query", &record.query),
            ("strategy", record.strategy.as_str()),
        ],
    )?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub count: usize,
    pub strategy: Strategy,
    pub schema_sha256: String,
}

impl Manifest {
    pub fn new(count: usize, strategy: Strategy, schema_bytes: &[u8]) -> Self {
        Manifest {
            count,
            strategy,
            schema_sha256: hex::encode(Sha256::digest(schema_bytes)),
        }
    }
}

/// `data.jsonl` has its manifest at `data.jsonl.manifest.json`.
pub fn manifest_path(dataset: &Path) -> PathBuf {
    let mut name = dataset.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn write_manifest(dataset: &Path, manifest: &Manifest) -> Result<PathBuf, DatasetError> {
    let path = manifest_path(dataset);
    let line = serde_json::to_string(manifest).expect("manifest serializes") + "\n";
    fs::write(&path, line).map_err(|e| DatasetError::DestinationUnwritable {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(path)
}

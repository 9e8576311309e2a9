use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::augment::AugmentedExample;
use crate::rewrite::Strategy;

use super::DatasetError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetRecord {
    pub id: String,
    pub question: String,
    pub query: String,
    pub strategy: Strategy,
    pub seed_id: String,
    pub added_property: Option<String>,
}

impl DatasetRecord {
    pub fn from_example(example: &AugmentedExample, strategy: Strategy) -> Self {
        DatasetRecord {
            id: example.id.clone(),
            question: example.question.clone(),
            query: example.query_text.clone(),
            strategy,
            seed_id: example.seed_id.clone(),
            added_property: example.added_property.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedRecord {
    pub id: String,
    pub question: String,
    pub query: String,
}

pub trait Keyed {
    fn key(&self) -> &str;
}

impl Keyed for DatasetRecord {
    fn key(&self) -> &str {
        &self.id
    }
}

impl Keyed for SeedRecord {
    fn key(&self) -> &str {
        &self.id
    }
}

/// One JSON object per line, each terminated by `\n`.
pub fn to_jsonl<T: Serialize + Keyed>(records: &[T]) -> Result<String, DatasetError> {
    let mut seen = HashSet::new();
    let mut out = String::new();
    for r in records {
        if !seen.insert(r.key()) {
            return Err(DatasetError::DuplicateId {
                id: r.key().to_string(),
                line: None,
            });
        }
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    Ok(out)
}

/// Parses line-delimited records. Blank lines are skipped; line numbers
/// in errors are 1-based.
pub fn from_jsonl<T: DeserializeOwned + Keyed>(text: &str) -> Result<Vec<T>, DatasetError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: T = serde_json::from_str(line).map_err(|e| DatasetError::MalformedRecord {
            line: i + 1,
            message: e.to_string(),
        })?;
        if !seen.insert(record.key().to_string()) {
            return Err(DatasetError::DuplicateId {
                id: record.key().to_string(),
                line: Some(i + 1),
            });
        }
        out.push(record);
    }
    Ok(out)
}

pub fn write_dataset(records: &[DatasetRecord], destination: &Path) -> Result<usize, DatasetError> {
    if let Some(r) = records.iter().find(|r| r.id.is_empty() || r.query.trim().is_empty()) {
        return Err(DatasetError::InvalidRecord(format!(
            "record '{}' has an empty id or query",
            r.id
        )));
    }
    let text = to_jsonl(records)?;
    fs::write(destination, text).map_err(|e| DatasetError::DestinationUnwritable {
        path: destination.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(records.len())
}

fn read_text(source: &Path) -> Result<String, DatasetError> {
    fs::read_to_string(source).map_err(|e| DatasetError::SourceUnreadable {
        path: source.display().to_string(),
        message: e.to_string(),
    })
}

pub fn read_dataset(source: &Path) -> Result<Vec<DatasetRecord>, DatasetError> {
    from_jsonl(&read_text(source)?)
}

pub fn read_seeds(source: &Path) -> Result<Vec<SeedRecord>, DatasetError> {
    from_jsonl(&read_text(source)?)
}

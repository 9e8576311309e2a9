use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Result;
use serde_json::json;
use sparql_augment::augment::{analyze_class_instance_vars, augment_catalog, QuestionTemplateSet, SeedExample};
use sparql_augment::dataset::{
    format_prompt, read_dataset, read_seeds, split_nested, train_test_split, write_dataset, write_manifest,
    DatasetError, DatasetRecord, Manifest, SplitSpec,
};
use sparql_augment::endpoint::{validate_dataset, ValidateOptions};
use sparql_augment::metrics::{evaluate_corpus, EvalOptions, SubwordVocabulary};
use sparql_augment::rewrite::{rewrite_example, Strategy};
use sparql_augment::schema::{induce_from_abox, load_schema, parse_ntriples, SchemaError, SchemaGraph};
use sparql_augment::sparql::{parse_query, serialize, SparqlError};

use crate::diag::{warn, StageError};
use crate::SchemaArgs;

fn read_file(stage: &'static str, path: &Path) -> Result<String, StageError> {
    fs::read_to_string(path).map_err(|e| StageError::new(stage, e).file(path))
}

fn dataset_error(stage: &'static str, path: &Path, e: DatasetError) -> StageError {
    let line = match &e {
        DatasetError::MalformedRecord { line, .. } => Some(*line),
        DatasetError::DuplicateId { line, .. } => *line,
        _ => None,
    };
    let err = StageError::new(stage, e).file(path);
    match line {
        Some(l) => err.line(l),
        None => err,
    }
}

fn load_records(stage: &'static str, path: &Path) -> Result<Vec<DatasetRecord>, StageError> {
    read_dataset(path).map_err(|e| dataset_error(stage, path, e))
}

/// 1-based line numbers of the non-blank lines of a record file.
fn record_lines(text: &str) -> Vec<usize> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, _)| i + 1)
        .collect()
}

fn query_error(stage: &'static str, path: &Path, line: usize, id: &str, e: &SparqlError) -> StageError {
    StageError::new(stage, format!("record {id}: {e}"))
        .file(path)
        .line(line)
}

pub fn load_schema_graph(args: &SchemaArgs) -> Result<(SchemaGraph, Vec<u8>), StageError> {
    const STAGE: &str = "load schema";
    let text = read_file(STAGE, &args.schema)?;
    let loaded = load_schema(&text).map_err(|e| {
        let err = StageError::new(STAGE, &e).file(&args.schema);
        match e {
            SchemaError::Syntax { position, .. } => err.line(position.line).column(position.column),
            _ => err,
        }
    })?;
    for w in &loaded.warnings {
        warn(STAGE, w);
    }
    let mut graph = loaded.graph;
    if let Some(abox) = &args.abox {
        const ABOX: &str = "induce from abox";
        let parsed = parse_ntriples(&read_file(ABOX, abox)?);
        for line in &parsed.malformed_lines {
            warn(ABOX, format!("{}:{line}: malformed triple skipped", abox.display()));
        }
        let induction = induce_from_abox(parsed.triples);
        for w in &induction.warnings {
            warn(ABOX, w);
        }
        graph.merge(&induction.delta);
    }
    Ok((graph, text.into_bytes()))
}

fn summary(value: serde_json::Value) {
    println!("{value}");
}

pub fn gen_dataset(
    schema_args: &SchemaArgs,
    seeds_path: &Path,
    strategy: Strategy,
    out: &Path,
    include_seeds: bool,
    template: &str,
) -> Result<ExitCode> {
    let (schema, schema_bytes) = load_schema_graph(schema_args)?;
    const SEEDS: &str = "parse seeds";
    let text = read_file(SEEDS, seeds_path)?;
    let lines = record_lines(&text);
    let records = read_seeds(seeds_path).map_err(|e| dataset_error(SEEDS, seeds_path, e))?;
    let mut seeds = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        let seed = SeedExample::parse(&r.id, &r.question, &r.query)
            .map_err(|e| StageError::new(SEEDS, e).file(seeds_path).line(lines[i]))?;
        for w in analyze_class_instance_vars(&seed.query, &schema).warnings {
            warn("augment", format!("seed {}: {w}", seed.id));
        }
        seeds.push(seed);
    }
    let templates = QuestionTemplateSet::default()
        .select(template)
        .map_err(|e| StageError::new("augment", e))?;
    let examples =
        augment_catalog(&seeds, &schema, &templates, include_seeds).map_err(|e| StageError::new("augment", e))?;
    let mut out_records = Vec::with_capacity(examples.len());
    for example in &examples {
        let rewritten = rewrite_example(example, strategy, &schema)
            .map_err(|e| StageError::new("rewrite", format!("example {}: {e}", example.id)))?;
        out_records.push(DatasetRecord::from_example(&rewritten, strategy));
    }
    let count = write_dataset(&out_records, out).map_err(|e| dataset_error("write dataset", out, e))?;
    let manifest = write_manifest(out, &Manifest::new(count, strategy, &schema_bytes))
        .map_err(|e| dataset_error("write manifest", out, e))?;
    summary(json!({
        "command": "gen-dataset",
        "records": count,
        "seeds": seeds.len(),
        "strategy": strategy,
        "out": out.display().to_string(),
        "manifest": manifest.display().to_string(),
    }));
    Ok(ExitCode::SUCCESS)
}

pub fn rewrite(schema_args: &SchemaArgs, input: &Path, strategy: Strategy, out: &Path) -> Result<ExitCode> {
    let (schema, _) = load_schema_graph(schema_args)?;
    const STAGE: &str = "rewrite";
    let lines = record_lines(&read_file(STAGE, input)?);
    let records = load_records(STAGE, input)?;
    let mut out_records = Vec::with_capacity(records.len());
    for (i, record) in records.into_iter().enumerate() {
        let query = parse_query(&record.query).map_err(|e| query_error(STAGE, input, lines[i], &record.id, &e))?;
        let rewritten = sparql_augment::rewrite::rewrite(&query, strategy, &schema);
        let text = serialize(&rewritten, true).map_err(|e| query_error(STAGE, input, lines[i], &record.id, &e))?;
        out_records.push(DatasetRecord {
            query: text,
            strategy,
            ..record
        });
    }
    let count = write_dataset(&out_records, out).map_err(|e| dataset_error("write dataset", out, e))?;
    summary(json!({
        "command": "rewrite",
        "records": count,
        "strategy": strategy,
        "out": out.display().to_string(),
    }));
    Ok(ExitCode::SUCCESS)
}

/// Accepts percentages (`25`) as well as fractions (`0.25`).
fn to_fraction(value: f64) -> f64 {
    if value > 1.0 {
        value / 100.0
    } else {
        value
    }
}

fn output_path(input: &Path, out_dir: Option<&Path>, suffix: &str) -> PathBuf {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let dir = out_dir
        .map(Path::to_path_buf)
        .or_else(|| input.parent().map(Path::to_path_buf))
        .unwrap_or_default();
    dir.join(format!("{stem}_{suffix}.jsonl"))
}

fn write_prompts(records: &[DatasetRecord], template: &str, path: &Path) -> Result<(), StageError> {
    let mut text = String::new();
    for r in records {
        let prompt = format_prompt(r, template).map_err(|e| StageError::new("format prompts", e))?;
        text.push_str(&json!({ "id": r.id, "text": prompt }).to_string());
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| StageError::new("format prompts", e).file(path))
}

pub fn split(
    input: &Path,
    fractions: &[f64],
    test_fraction: Option<f64>,
    seed: u64,
    out_dir: Option<&Path>,
    prompts: Option<&str>,
) -> Result<ExitCode> {
    const STAGE: &str = "split";
    let records = load_records(STAGE, input)?;
    let mut parts: Vec<(String, Vec<DatasetRecord>)> = Vec::new();
    match test_fraction {
        Some(f) => {
            let (train, test) =
                train_test_split(&records, to_fraction(f), seed).map_err(|e| dataset_error(STAGE, input, e))?;
            parts.push(("train".into(), train));
            parts.push(("test".into(), test));
        }
        None => {
            let fractions: Vec<f64> = fractions.iter().copied().map(to_fraction).collect();
            let spec = SplitSpec::new(fractions.clone(), seed).map_err(|e| StageError::new(STAGE, e))?;
            let partitions = split_nested(&records, &spec).map_err(|e| dataset_error(STAGE, input, e))?;
            for (f, part) in fractions.iter().zip(partitions) {
                parts.push((format!("p{}", (f * 100.0).round() as u64), part));
            }
        }
    }
    let mut files = Vec::new();
    for (suffix, part) in &parts {
        let path = output_path(input, out_dir, suffix);
        write_dataset(part, &path).map_err(|e| dataset_error("write partition", &path, e))?;
        if let Some(template) = prompts {
            write_prompts(part, template, &path.with_extension("prompts.jsonl"))?;
        }
        files.push(json!({ "path": path.display().to_string(), "records": part.len() }));
    }
    summary(json!({ "command": "split", "seed": seed, "files": files }));
    Ok(ExitCode::SUCCESS)
}

pub fn evaluate(candidates: &Path, references: &Path, vocab: Option<&Path>, lowercase: bool) -> Result<ExitCode> {
    const STAGE: &str = "evaluate";
    let cands = load_records(STAGE, candidates)?;
    let refs = load_records(STAGE, references)?;
    let by_id: HashMap<&str, &DatasetRecord> = refs.iter().map(|r| (r.id.as_str(), r)).collect();
    let cand_ids: HashMap<&str, ()> = cands.iter().map(|r| (r.id.as_str(), ())).collect();
    let mut unmatched: Vec<&str> = cands
        .iter()
        .map(|r| r.id.as_str())
        .filter(|id| !by_id.contains_key(id))
        .collect();
    unmatched.extend(
        refs.iter()
            .map(|r| r.id.as_str())
            .filter(|id| !cand_ids.contains_key(id)),
    );
    if !unmatched.is_empty() {
        unmatched.sort_unstable();
        let shown = unmatched.iter().take(20).copied().collect::<Vec<_>>().join(", ");
        let more = unmatched.len().saturating_sub(20);
        let tail = if more > 0 {
            format!(" and {more} more")
        } else {
            String::new()
        };
        return Err(StageError::new(
            STAGE,
            format!("IdMismatch: {} unmatched ids: {shown}{tail}", unmatched.len()),
        )
        .file(candidates)
        .into());
    }
    let vocab = match vocab {
        Some(path) => {
            let text = read_file("load vocabulary", path)?;
            Some(SubwordVocabulary::parse(&text).map_err(|e| StageError::new("load vocabulary", e).file(path))?)
        }
        None => None,
    };
    let pairs: Vec<(&str, &str)> = cands
        .iter()
        .map(|c| (c.query.as_str(), by_id[c.id.as_str()].query.as_str()))
        .collect();
    let report =
        evaluate_corpus(&pairs, vocab.as_ref(), EvalOptions { lowercase }).map_err(|e| StageError::new(STAGE, e))?;
    let sp = report.sp_bleu.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"));
    println!(
        "{:<8}{:<8}{:<8}{:<8}{:<8}",
        "BLEU", "SP-BLEU", "METEOR", "ROUGE-L", "F1"
    );
    println!(
        "{:<8}{:<8}{:<8}{:<8}{:<8}",
        format!("{:.3}", report.bleu),
        sp,
        format!("{:.3}", report.meteor),
        format!("{:.3}", report.rouge_l),
        format!("{:.3}", report.f1)
    );
    summary(json!({ "command": "evaluate", "report": report }));
    Ok(ExitCode::SUCCESS)
}

pub fn validate(
    dataset: &Path,
    endpoint: &str,
    concurrency: usize,
    limit: u64,
    timeout: f64,
    report_path: Option<&Path>,
) -> Result<ExitCode> {
    const STAGE: &str = "validate";
    let records = load_records(STAGE, dataset)?;
    let options = ValidateOptions {
        concurrency,
        limit_override: limit,
        timeout: Duration::from_secs_f64(timeout),
        ..ValidateOptions::default()
    };
    let report = validate_dataset(&records, endpoint, &options).map_err(|e| StageError::new(STAGE, e))?;
    let path = report_path.map(Path::to_path_buf).unwrap_or_else(|| {
        let mut p = dataset.as_os_str().to_owned();
        p.push(".validation.json");
        PathBuf::from(p)
    });
    let text = serde_json::to_string_pretty(&report)? + "\n";
    fs::write(&path, text).map_err(|e| StageError::new("write report", e).file(&path))?;
    for o in report.outcomes.iter().filter(|o| !o.parsed) {
        eprintln!(
            "error: [{STAGE}] record {}: {}",
            o.id,
            o.error.as_deref().unwrap_or("unparseable")
        );
    }
    summary(json!({
        "command": "validate",
        "report": path.display().to_string(),
        "totals": report.totals,
    }));
    Ok(if report.all_parsed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

pub fn stats(input: &Path) -> Result<ExitCode> {
    const STAGE: &str = "stats";
    let lines = record_lines(&read_file(STAGE, input)?);
    let records = load_records(STAGE, input)?;
    let mut strategies: BTreeMap<String, usize> = BTreeMap::new();
    let mut properties: BTreeMap<&str, usize> = BTreeMap::new();
    let mut seeds: BTreeMap<&str, usize> = BTreeMap::new();
    let mut triples = 0usize;
    let mut comments = 0usize;
    for (i, r) in records.iter().enumerate() {
        let q = parse_query(&r.query).map_err(|e| query_error(STAGE, input, lines[i], &r.id, &e))?;
        triples += q.triple_count();
        comments += q.comments().len();
        *strategies.entry(r.strategy.to_string()).or_default() += 1;
        *seeds.entry(&r.seed_id).or_default() += 1;
        if let Some(p) = &r.added_property {
            *properties.entry(p).or_default() += 1;
        }
    }
    let n = records.len();
    summary(json!({
        "command": "stats",
        "records": n,
        "seeds": seeds.len(),
        "augmented": records.iter().filter(|r| r.added_property.is_some()).count(),
        "pass_through": records.iter().filter(|r| r.added_property.is_none()).count(),
        "strategies": strategies,
        "added_properties": properties,
        "mean_triples": if n == 0 { 0.0 } else { triples as f64 / n as f64 },
        "comments": comments,
    }));
    Ok(ExitCode::SUCCESS)
}

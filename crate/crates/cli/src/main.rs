mod commands;
mod diag;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sparql_augment::rewrite::Strategy;

#[derive(Parser)]
#[command(
    name = "sparql-augment",
    version,
    about = "Build, rewrite, split, score and validate question-to-SPARQL datasets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct SchemaArgs {
    /// Terminological schema in Turtle.
    #[arg(long)]
    pub schema: PathBuf,
    /// Instance triples in N-Triples, used to induce extra domains.
    #[arg(long)]
    pub abox: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Augment a seed catalog and write the dataset with its manifest.
    GenDataset {
        #[command(flatten)]
        schema: SchemaArgs,
        #[arg(long)]
        seeds: PathBuf,
        #[arg(long)]
        strategy: Strategy,
        #[arg(long)]
        out: PathBuf,
        /// Also emit each seed unchanged (apart from the strategy).
        #[arg(long)]
        include_seeds: bool,
        /// Question template id.
        #[arg(long, default_value = "default")]
        template: String,
    },
    /// Apply a strategy to every query of an existing dataset.
    Rewrite {
        #[command(flatten)]
        schema: SchemaArgs,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        strategy: Strategy,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write nested training partitions, or a stratified train/test pair.
    Split {
        #[arg(long)]
        input: PathBuf,
        /// Percentages or fractions, for example `25,50,75,100`.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "25,50,75,100",
            conflicts_with = "test_fraction"
        )]
        fractions: Vec<f64>,
        /// Write `<stem>_train.jsonl` and `<stem>_test.jsonl` instead. Without a
        /// value, a fifth of the seed groups go to the test side.
        #[arg(long, num_args = 0..=1, default_missing_value = "0.2")]
        test_fraction: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory; defaults to the input's directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Also write prompt files rendered with this template id.
        #[arg(long)]
        prompts: Option<String>,
    },
    /// Score candidate queries against references, matched by id.
    Evaluate {
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        references: PathBuf,
        /// Subword vocabulary (one piece per line) for SP-BLEU.
        #[arg(long)]
        vocab: Option<PathBuf>,
        #[arg(long)]
        lowercase: bool,
    },
    /// Execute every query against a SPARQL endpoint.
    Validate {
        #[arg(long, alias = "input")]
        dataset: PathBuf,
        #[arg(long, env = "SPARQL_ENDPOINT")]
        endpoint: String,
        #[arg(long, default_value_t = 4)]
        concurrency: usize,
        #[arg(long, default_value_t = 10)]
        limit: u64,
        /// Per-request timeout in seconds.
        #[arg(long, default_value_t = 30.0)]
        timeout: f64,
        /// Report path; defaults to `<dataset>.validation.json`.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Summarize a dataset.
    Stats {
        #[arg(long, alias = "dataset")]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenDataset {
            schema,
            seeds,
            strategy,
            out,
            include_seeds,
            template,
        } => commands::gen_dataset(&schema, &seeds, strategy, &out, include_seeds, &template),
        Command::Rewrite {
            schema,
            input,
            strategy,
            out,
        } => commands::rewrite(&schema, &input, strategy, &out),
        Command::Split {
            input,
            fractions,
            test_fraction,
            seed,
            out_dir,
            prompts,
        } => commands::split(
            &input,
            &fractions,
            test_fraction,
            seed,
            out_dir.as_deref(),
            prompts.as_deref(),
        ),
        Command::Evaluate {
            candidates,
            references,
            vocab,
            lowercase,
        } => commands::evaluate(&candidates, &references, vocab.as_deref(), lowercase),
        Command::Validate {
            dataset,
            endpoint,
            concurrency,
            limit,
            timeout,
            report,
        } => commands::validate(&dataset, &endpoint, concurrency, limit, timeout, report.as_deref()),
        Command::Stats { input } => commands::stats(&input),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

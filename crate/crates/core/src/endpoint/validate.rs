use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::dataset::DatasetRecord;
use crate::sparql::parse_query;

use super::{EndpointClient, EndpointError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidateOptions {
    pub concurrency: usize,
    pub limit_override: u64,
    pub timeout: Duration,
    /// Extra attempts after a transport failure.
    pub retries: u32,
    /// Delay before the first retry; doubled for each further one.
    pub backoff: Duration,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            concurrency: 4,
            limit_override: 10,
            timeout: Duration::from_secs(30),
            retries: 2,
            backoff: Duration::from_millis(200),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub id: String,
    pub parsed: bool,
    pub executed: bool,
    pub nonempty: bool,
    pub error: Option<String>,
    #[serde(skip)]
    pub latency: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Totals {
    pub records: usize,
    pub parsed: usize,
    pub executed: usize,
    pub nonempty: usize,
}

/// Outcomes sorted by record id. Latencies are not serialized, so the
/// serialized report does not depend on timing or concurrency.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub endpoint: String,
    pub limit_override: u64,
    pub totals: Totals,
    pub outcomes: Vec<Outcome>,
}

impl ValidationReport {
    pub fn all_parsed(&self) -> bool {
        self.totals.parsed == self.totals.records
    }
}

/// Parses every record locally and executes the parseable ones with at
/// most `options.concurrency` requests in flight.
pub fn validate_dataset(
    records: &[DatasetRecord],
    endpoint: &str,
    options: &ValidateOptions,
) -> Result<ValidationReport, EndpointError> {
    if options.concurrency == 0 {
        return Err(EndpointError::InvalidConfig("concurrency must be at least 1".into()));
    }
    if options.limit_override == 0 {
        return Err(EndpointError::ZeroLimit);
    }
    let client = EndpointClient::new(endpoint, options.timeout)?;
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Outcome>>> = Mutex::new(vec![None; records.len()]);
    thread::scope(|scope| {
        for _ in 0..options.concurrency.min(records.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(record) = records.get(i) else { break };
                let outcome = check_record(&client, record, options);
                results.lock().expect("no worker panics while holding the lock")[i] = Some(outcome);
            });
        }
    });
    let mut outcomes: Vec<Outcome> = results
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|o| o.expect("every record checked"))
        .collect();
    outcomes.sort_by(|a, b| a.id.cmp(&b.id));
    let totals = Totals {
        records: outcomes.len(),
        parsed: outcomes.iter().filter(|o| o.parsed).count(),
        executed: outcomes.iter().filter(|o| o.executed).count(),
        nonempty: outcomes.iter().filter(|o| o.nonempty).count(),
    };
    Ok(ValidationReport {
        endpoint: endpoint.to_string(),
        limit_override: options.limit_override,
        totals,
        outcomes,
    })
}

fn check_record(client: &EndpointClient, record: &DatasetRecord, options: &ValidateOptions) -> Outcome {
    let start = Instant::now();
    let mut outcome = Outcome {
        id: record.id.clone(),
        parsed: false,
        executed: false,
        nonempty: false,
        error: None,
        latency: Duration::ZERO,
    };
    match parse_query(&record.query) {
        Err(e) => outcome.error = Some(e.to_string()),
        Ok(query) => {
            outcome.parsed = true;
            let mut attempt = 0;
            let result = loop {
                match client.execute(&query, Some(options.limit_override)) {
                    Err(EndpointError::Network(_)) if attempt < options.retries => {
                        thread::sleep(options.backoff * 2u32.pow(attempt));
                        attempt += 1;
                    }
                    other => break other,
                }
            };
            match result {
                Ok(table) => {
                    outcome.executed = true;
                    outcome.nonempty = !table.is_empty();
                }
                Err(e) => outcome.error = Some(e.to_string()),
            }
        }
    }
    outcome.latency = start.elapsed();
    outcome
}

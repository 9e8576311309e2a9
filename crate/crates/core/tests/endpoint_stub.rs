use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use sparql_augment::dataset::DatasetRecord;
use sparql_augment::endpoint::{execute_select, validate_dataset, EndpointError, ValidateOptions, ValueKind};
use sparql_augment::rewrite::Strategy;
use tiny_http::{Header, Method, Response, Server};

const ONE_ROW: &str = r#"{"head":{"vars":["x"]},"results":{"bindings":[{"x":{"type":"uri","value":"http://e/g1"}}]}}"#;
const NO_ROWS: &str = r#"{"head":{"vars":["x"]},"results":{"bindings":[]}}"#;

/// Answers SELECT requests according to markers in the query text:
/// `:Missing` gives no rows, `:Reject` a 400, `:Garbled` a non-JSON body.
struct Stub {
    url: String,
    server: Arc<Server>,
    workers: Vec<JoinHandle<()>>,
    seen: Arc<Mutex<Vec<String>>>,
}

impl Stub {
    fn start(threads: usize) -> Stub {
        let server = Arc::new(Server::http("127.0.0.1:0").unwrap());
        let url = format!("http://{}/sparql", server.server_addr().to_ip().unwrap());
        let seen = Arc::new(Mutex::new(Vec::new()));
        let workers = (0..threads)
            .map(|_| {
                let server = Arc::clone(&server);
                let seen = Arc::clone(&seen);
                thread::spawn(move || {
                    while let Ok(mut request) = server.recv() {
                        let mut body = String::new();
                        request.as_reader().read_to_string(&mut body).unwrap();
                        let accept = request
                            .headers()
                            .iter()
                            .find(|h| h.field.equiv("Accept"))
                            .map(|h| h.value.to_string());
                        let query = url::form_urlencoded::parse(body.as_bytes())
                            .find(|(k, _)| k == "query")
                            .map(|(_, v)| v.into_owned())
                            .unwrap_or_default();
                        let (status, text) = if *request.method() != Method::Post
                            || accept.as_deref() != Some("application/sparql-results+json")
                        {
                            (405, "bad request shape")
                        } else if query.contains(":Reject") {
                            (400, "Parse error: unknown predicate")
                        } else if query.contains(":Garbled") {
                            (200, "<html>oops</html>")
                        } else if query.contains(":Missing") {
                            (200, NO_ROWS)
                        } else {
                            (200, ONE_ROW)
                        };
                        seen.lock().unwrap().push(query);
                        let header = Header::from_bytes("Content-Type", "application/sparql-results+json").unwrap();
                        request
                            .respond(Response::from_string(text).with_status_code(status).with_header(header))
                            .unwrap();
                    }
                })
            })
            .collect();
        Stub {
            url,
            server,
            workers,
            seen,
        }
    }
}

impl Drop for Stub {
    fn drop(&mut self) {
        for _ in &self.workers {
            self.server.unblock();
        }
        for w in self.workers.drain(..) {
            w.join().unwrap();
        }
    }
}

fn record(id: &str, query: &str) -> DatasetRecord {
    DatasetRecord {
        id: id.into(),
        question: "q".into(),
        query: query.into(),
        strategy: Strategy::Original,
        seed_id: "s".into(),
        added_property: None,
    }
}

fn mixed_corpus() -> Vec<DatasetRecord> {
    let mut records = Vec::new();
    for i in 0..40 {
        let query = match i % 5 {
            0 => "PREFIX : <http://e/> SELECT ?x WHERE { ?x a :Gene } LIMIT 500".to_string(),
            1 => "PREFIX : <http://e/> SELECT ?x WHERE { ?x a :Missing }".to_string(),
            2 => "PREFIX : <http://e/> SELECT ?x WHERE { ?x a :Reject }".to_string(),
            3 => format!("SELECT ?x WHERE {{ ?x ?p ?o . FILTER( }} # broken {i}"),
            _ => "PREFIX : <http://e/> SELECT ?x WHERE { ?x a :Garbled }".to_string(),
        };
        records.push(record(&format!("r{i:02}"), &query));
    }
    records
}

fn fast_options(concurrency: usize) -> ValidateOptions {
    ValidateOptions {
        concurrency,
        backoff: Duration::from_millis(1),
        timeout: Duration::from_secs(5),
        ..ValidateOptions::default()
    }
}

#[test]
fn implication_invariants_and_totals() {
    let stub = Stub::start(4);
    let report = validate_dataset(&mixed_corpus(), &stub.url, &fast_options(4)).unwrap();
    assert_eq!(report.totals.records, 40);
    assert_eq!(report.totals.parsed, 32);
    assert_eq!(report.totals.executed, 16);
    assert_eq!(report.totals.nonempty, 8);
    for o in &report.outcomes {
        assert!(!o.executed || o.parsed, "{o:?}");
        assert!(!o.nonempty || o.executed, "{o:?}");
        assert_eq!(o.error.is_some(), !o.executed, "{o:?}");
    }
    let ids: Vec<_> = report.outcomes.iter().map(|o| o.id.clone()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    assert!(report.outcomes[2].error.as_deref().unwrap().starts_with("HTTP 400"));
    assert!(report.outcomes[4]
        .error
        .as_deref()
        .unwrap()
        .starts_with("malformed results"));

    let seen = stub.seen.lock().unwrap();
    assert_eq!(seen.len(), 32);
    assert!(seen.iter().all(|q| q.trim_end().ends_with("LIMIT 10")), "{seen:?}");
}

#[test]
fn report_independent_of_concurrency() {
    let stub = Stub::start(8);
    let records = mixed_corpus();
    let one = validate_dataset(&records, &stub.url, &fast_options(1)).unwrap();
    let eight = validate_dataset(&records, &stub.url, &fast_options(8)).unwrap();
    let strip = |r: &sparql_augment::endpoint::ValidationReport| serde_json::to_string(r).unwrap();
    assert_eq!(strip(&one), strip(&eight));
}

#[test]
fn single_query_execution() {
    let stub = Stub::start(1);
    let table = execute_select(&stub.url, "SELECT ?x WHERE { ?x ?p ?o }", Duration::from_secs(5), None).unwrap();
    assert_eq!(table.variables, ["x"]);
    assert_eq!(table.rows[0]["x"].kind, ValueKind::Iri);
    let err = execute_select(
        &stub.url,
        "PREFIX : <http://e/> SELECT ?x WHERE { ?x a :Reject }",
        Duration::from_secs(5),
        None,
    )
    .unwrap_err();
    assert!(matches!(err, EndpointError::Http { status: 400, ref excerpt } if excerpt.starts_with("Parse error")));
    assert!(matches!(
        execute_select(
            "not a url",
            "SELECT ?x WHERE { ?x ?p ?o }",
            Duration::from_secs(1),
            None
        ),
        Err(EndpointError::InvalidConfig(_))
    ));
}

#[test]
fn timeout_is_reported() {
    let server = Server::http("127.0.0.1:0").unwrap();
    let url = format!("http://{}/sparql", server.server_addr().to_ip().unwrap());
    let hold = thread::spawn(move || {
        let request = server.recv().unwrap();
        thread::sleep(Duration::from_millis(600));
        drop(request);
    });
    let err = execute_select(&url, "SELECT ?x WHERE { ?x ?p ?o }", Duration::from_millis(200), None).unwrap_err();
    assert_eq!(err, EndpointError::Timeout);
    hold.join().unwrap();
}

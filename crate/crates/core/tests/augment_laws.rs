use std::collections::HashSet;
use std::fs;
use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use sparql_augment::augment::{augment_catalog, find_class_instance_vars, QuestionTemplateSet, SeedExample};
use sparql_augment::dataset::{read_seeds, DatasetRecord};
use sparql_augment::rewrite::{apply_strategy, canonicalize, rewrite_example, Strategy};
use sparql_augment::schema::{induce_from_abox, load_schema, parse_ntriples, SchemaGraph};
use sparql_augment::sparql::parse_query;

const HEADER: &str = "@prefix : <http://toy.example/> .\n\
    @prefix owl: <http://www.w3.org/2002/07/owl#> .\n\
    @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n";

/// A random schema and seed catalog together with the number of records
/// augmentation should produce, counted while building them.
struct ToyConfig {
    schema: String,
    seeds: Vec<SeedExample>,
    expected: usize,
}

fn toy_config(rng: &mut StdRng, include_seeds: bool) -> ToyConfig {
    let classes = rng.random_range(1..=3);
    let mut schema = HEADER.to_string();
    let mut props_per_class = Vec::new();
    for c in 0..classes {
        schema.push_str(&format!(":C{c} a owl:Class ; rdfs:label \"class {c}\" .\n"));
        let n = rng.random_range(0..=4);
        for p in 0..n {
            schema.push_str(&format!(
                ":c{c}p{p} a owl:DatatypeProperty ; rdfs:domain :C{c} ; rdfs:label \"prop {p}\" .\n"
            ));
        }
        schema.push_str(&format!(":c{c}link a owl:ObjectProperty ; rdfs:domain :C{c} .\n"));
        props_per_class.push(n);
    }
    let seed_count = rng.random_range(1..=4);
    let mut expected = if include_seeds { seed_count } else { 0 };
    let mut seeds = Vec::new();
    for s in 0..seed_count {
        let vars = rng.random_range(1..=2);
        let mut body = String::new();
        for v in 0..vars {
            let class = rng.random_range(0..classes);
            let n = props_per_class[class];
            let present = rng.random_range(0..=n);
            body.push_str(&format!("?x{v} a :C{class} . "));
            for p in sample(rng, n, present) {
                body.push_str(&format!("?x{v} :c{class}p{p} ?v{v}_{p} . "));
            }
            expected += n - present;
        }
        let query = format!("PREFIX : <http://toy.example/> SELECT * WHERE {{ {body}}}");
        seeds.push(SeedExample::parse(&format!("s{s}"), "Which things?", &query).unwrap());
    }
    ToyConfig {
        schema,
        seeds,
        expected,
    }
}

#[test]
fn count_law_on_randomized_configurations() {
    let mut rng = StdRng::seed_from_u64(2024);
    for round in 0..40 {
        let include = round % 2 == 0;
        let config = toy_config(&mut rng, include);
        let schema = load_schema(&config.schema).unwrap().graph;
        let out = augment_catalog(&config.seeds, &schema, &QuestionTemplateSet::default(), include).unwrap();
        assert_eq!(out.len(), config.expected, "round {round}\n{}", config.schema);

        let mut additions = HashSet::new();
        for e in &out {
            if let Some(p) = &e.added_property {
                assert!(additions.insert((e.seed_id.clone(), p.clone(), e.query_text.clone())));
                assert_eq!(
                    parse_query(&e.query_text).unwrap().triple_count(),
                    config
                        .seeds
                        .iter()
                        .find(|s| s.id == e.seed_id)
                        .unwrap()
                        .query
                        .triple_count()
                        + 1
                );
            }
        }
        let ids: HashSet<_> = out.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids.len(), out.len());
    }
}

#[test]
fn small_worked_configuration() {
    let schema = format!(
        "{HEADER}:Gene a owl:Class .\n\
         :name a owl:DatatypeProperty ; rdfs:domain :Gene .\n\
         :symbol a owl:DatatypeProperty ; rdfs:domain :Gene .\n\
         :length a owl:DatatypeProperty ; rdfs:domain :Gene .\n"
    );
    let schema = load_schema(&schema).unwrap().graph;
    let seeds = [
        SeedExample::parse(
            "a",
            "Genes?",
            "PREFIX : <http://toy.example/> SELECT ?g WHERE { ?g a :Gene ; :name ?n }",
        )
        .unwrap(),
        SeedExample::parse(
            "b",
            "Symbols?",
            "PREFIX : <http://toy.example/> SELECT ?s WHERE { ?g a :Gene ; :symbol ?s }",
        )
        .unwrap(),
    ];
    let templates = QuestionTemplateSet::default();
    assert_eq!(augment_catalog(&seeds, &schema, &templates, true).unwrap().len(), 6);
    assert_eq!(augment_catalog(&seeds, &schema, &templates, false).unwrap().len(), 4);
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/toy")
        .join(name)
}

fn toy_schema() -> SchemaGraph {
    let mut graph = load_schema(&fs::read_to_string(data("schema.ttl")).unwrap())
        .unwrap()
        .graph;
    let abox = parse_ntriples(&fs::read_to_string(data("abox.nt")).unwrap());
    graph.merge(&induce_from_abox(abox.triples).delta);
    graph
}

#[test]
fn strategies_are_alpha_equivalent_on_toy_corpus() {
    let schema = toy_schema();
    let seeds: Vec<SeedExample> = read_seeds(&data("seeds.jsonl"))
        .unwrap()
        .iter()
        .map(|r| SeedExample::parse(&r.id, &r.question, &r.query).unwrap())
        .collect();
    let examples = augment_catalog(&seeds, &schema, &QuestionTemplateSet::default(), true).unwrap();
    assert!(examples.len() >= 100, "{}", examples.len());
    for e in &examples {
        let bindings = find_class_instance_vars(&e.query, &schema);
        let forms: Vec<String> = Strategy::ALL
            .iter()
            .map(|&s| canonicalize(&apply_strategy(&e.query, s, &bindings, &schema)).unwrap())
            .collect();
        assert!(forms.windows(2).all(|w| w[0] == w[1]), "{}", e.id);

        for &s in Strategy::ALL.iter() {
            let record = DatasetRecord::from_example(&rewrite_example(e, s, &schema).unwrap(), s);
            assert_eq!(canonicalize(&parse_query(&record.query).unwrap()).unwrap(), forms[0]);
        }
    }
}

use std::collections::HashSet;
use std::fs;

use proptest::prelude::*;
use sparql_augment::dataset::{
    from_jsonl, read_dataset, split_nested, to_jsonl, train_test_split, write_dataset, DatasetError, DatasetRecord,
    SplitSpec,
};
use sparql_augment::rewrite::Strategy as Rewrite;

fn text() -> impl Strategy<Value = String> {
    "[a-zA-Z0-9 \"\\\\{}?.\n\t\u{e9}\u{fc}\u{6771}\u{4eac}\u{1f9ec}\u{2581}]{0,40}"
}

fn strategy() -> impl Strategy<Value = Rewrite> {
    proptest::sample::select(Rewrite::ALL.to_vec())
}

fn record() -> impl Strategy<Value = DatasetRecord> {
    (
        "[a-z0-9/_\u{e9}-]{1,12}",
        text(),
        text().prop_filter("query must not be blank", |q| !q.trim().is_empty()),
        strategy(),
        "[a-z0-9-]{1,8}",
        proptest::option::of("http://[a-z]{1,8}\\.org/[a-zA-Z\u{e9}]{1,8}"),
    )
        .prop_map(
            |(id, question, query, strategy, seed_id, added_property)| DatasetRecord {
                id,
                question,
                query,
                strategy,
                seed_id,
                added_property,
            },
        )
}

fn unique_ids(records: Vec<DatasetRecord>) -> Vec<DatasetRecord> {
    let mut seen = HashSet::new();
    records.into_iter().filter(|r| seen.insert(r.id.clone())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn jsonl_round_trip(records in prop::collection::vec(record(), 1..6).prop_map(unique_ids)) {
        let text = to_jsonl(&records).unwrap();
        prop_assert_eq!(text.lines().count(), records.len());
        prop_assert_eq!(from_jsonl::<DatasetRecord>(&text).unwrap(), records);
    }
}

fn numbered(n: usize) -> Vec<DatasetRecord> {
    (0..n)
        .map(|i| DatasetRecord {
            id: format!("r{i:03}"),
            question: format!("Question {i}?"),
            query: format!("SELECT ?x WHERE {{\n  ?x <http://e/p{i}> ?y .\n}}\n"),
            strategy: Rewrite::Original,
            seed_id: format!("s{}", i % 10),
            added_property: None,
        })
        .collect()
}

#[test]
fn file_round_trip_with_unicode() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.jsonl");
    let mut records = numbered(5);
    records[2].question = "Quel est le nom du gène exprimé à 東京? 🧬".into();
    records[3].query = "SELECT ?x\nWHERE {\n  ?x <http://e/p> \"line\\nbreak\" . # commentaire\n}\n".into();
    assert_eq!(write_dataset(&records, &path).unwrap(), 5);
    assert_eq!(read_dataset(&path).unwrap(), records);
}

#[test]
fn nested_partitions_of_two_hundred() {
    let records = numbered(200);
    let spec = SplitSpec::new(vec![0.25, 0.5, 0.75, 1.0], 42).unwrap();
    let a = split_nested(&records, &spec).unwrap();
    assert_eq!(a.iter().map(Vec::len).collect::<Vec<_>>(), [50, 100, 150, 200]);
    for w in a.windows(2) {
        assert_eq!(w[0][..], w[1][..w[0].len()]);
    }
    let full: HashSet<_> = a[3].iter().map(|r| r.id.clone()).collect();
    assert_eq!(full.len(), 200);
    assert_eq!(split_nested(&records, &spec).unwrap(), a);
    let other = split_nested(&records, &SplitSpec::new(vec![0.25, 0.5, 0.75, 1.0], 43).unwrap()).unwrap();
    assert_ne!(other[3], a[3]);
}

#[test]
fn split_spec_validation() {
    for bad in [vec![], vec![0.0], vec![0.5, 0.25], vec![1.5], vec![0.5, 0.5]] {
        assert!(matches!(SplitSpec::new(bad, 0), Err(DatasetError::InvalidSplitSpec(_))));
    }
    let spec = SplitSpec::new(vec![1.0], 0).unwrap();
    assert_eq!(
        split_nested::<DatasetRecord>(&[], &spec),
        Err(DatasetError::EmptyDataset)
    );
}

#[test]
fn train_test_keeps_seed_groups_apart() {
    let records = numbered(200);
    let (train, test) = train_test_split(&records, 0.2, 9).unwrap();
    assert_eq!(train.len() + test.len(), 200);
    let train_seeds: HashSet<_> = train.iter().map(|r| &r.seed_id).collect();
    let test_seeds: HashSet<_> = test.iter().map(|r| &r.seed_id).collect();
    assert!(train_seeds.is_disjoint(&test_seeds));
    assert_eq!(test_seeds.len(), 2);
    assert_eq!(train_test_split(&records, 0.2, 9).unwrap(), (train, test));

    let one_seed: Vec<_> = numbered(5)
        .into_iter()
        .map(|r| DatasetRecord {
            seed_id: "s".into(),
            ..r
        })
        .collect();
    assert!(matches!(
        train_test_split(&one_seed, 0.5, 0),
        Err(DatasetError::UnsatisfiableStratification(_))
    ));
}

#[test]
fn malformed_and_duplicate_lines() {
    let good = to_jsonl(&numbered(2)).unwrap();
    let lines: Vec<&str> = good.lines().collect();

    let extra_field = format!("{}\n{}\n", lines[0], lines[1].replacen('{', "{\"extra\":1,", 1));
    assert!(matches!(
        from_jsonl::<DatasetRecord>(&extra_field),
        Err(DatasetError::MalformedRecord { line: 2, .. })
    ));

    let duplicate = format!("{}\n\n{}\n", lines[0], lines[0]);
    assert_eq!(
        from_jsonl::<DatasetRecord>(&duplicate),
        Err(DatasetError::DuplicateId {
            id: "r000".into(),
            line: Some(3)
        })
    );

    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        read_dataset(&dir.path().join("missing.jsonl")),
        Err(DatasetError::SourceUnreadable { .. })
    ));
    assert!(matches!(
        write_dataset(&numbered(1), &dir.path().join("no/such/dir/out.jsonl")),
        Err(DatasetError::DestinationUnwritable { .. })
    ));
    fs::write(dir.path().join("blank.jsonl"), "\n\n").unwrap();
    assert_eq!(read_dataset(&dir.path().join("blank.jsonl")).unwrap(), vec![]);
}

#[test]
fn truncated_final_line_and_duplicate_write() {
    let mut text = to_jsonl(&numbered(3)).unwrap();
    text.truncate(text.len() - 10);
    assert!(matches!(
        from_jsonl::<DatasetRecord>(&text),
        Err(DatasetError::MalformedRecord { line: 3, .. })
    ));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dup.jsonl");
    let mut records = numbered(2);
    records[1].id = records[0].id.clone();
    assert!(matches!(
        write_dataset(&records, &path),
        Err(DatasetError::DuplicateId { .. })
    ));
    assert!(!path.exists());
}

use proptest::prelude::*;
use sparql_augment::sparql::{
    parse_query, serialize, Datatype, GraphPattern, Literal, Modifiers, OrderDirection, PatternElement, PrefixedName,
    Projection, Prologue, SelectQuery, Term, TriplePattern, Variable,
};

const VARS: [&str; 4] = ["a", "b", "gene", "x1"];

fn var() -> impl Strategy<Value = Term> {
    proptest::sample::select(&VARS[..]).prop_map(Term::var)
}

fn iri() -> impl Strategy<Value = Term> {
    prop_oneof![
        "[a-z]{1,6}".prop_map(|l| Term::Iri(format!("http://example.org/{l}"))),
        "[a-z][a-zA-Z0-9_]{0,6}".prop_map(|l| Term::prefixed("ex", &l)),
    ]
}

fn literal() -> impl Strategy<Value = Term> {
    prop_oneof![
        "[ -~\u{e9}\u{6771}\n\t]{0,12}".prop_map(Literal::plain),
        ("[a-z]{1,8}", "[a-z]{2}(-[A-Z]{2})?").prop_map(|(s, lang)| Literal {
            language: Some(lang),
            ..Literal::plain(s)
        }),
        (-1000i64..1000).prop_map(|n| Literal::typed_xsd(n.to_string(), "integer")),
        any::<bool>().prop_map(|b| Literal::typed_xsd(b.to_string(), "boolean")),
        "[a-z]{1,5}".prop_map(|s| Literal {
            datatype: Some(Datatype::Prefixed(PrefixedName {
                prefix: "ex".into(),
                local: "dt".into()
            })),
            ..Literal::plain(s)
        }),
    ]
    .prop_map(Term::Literal)
}

fn comment() -> impl Strategy<Value = Option<String>> {
    proptest::option::of("[a-z][a-z #]{0,10}[a-z]")
}

fn triple() -> impl Strategy<Value = TriplePattern> {
    let predicate = prop_oneof![iri(), var(), Just(Term::A)];
    let object = prop_oneof![var(), iri(), literal()];
    (var(), predicate, object, comment()).prop_map(|(s, p, o, c)| TriplePattern {
        trailing_comment: c,
        ..TriplePattern::new(s, p, o)
    })
}

fn triples(max: usize) -> impl Strategy<Value = Vec<PatternElement>> {
    prop::collection::vec(triple().prop_map(PatternElement::Triple), 1..=max)
}

fn filter() -> impl Strategy<Value = PatternElement> {
    let name = || proptest::sample::select(&VARS[..]);
    (name(), name()).prop_map(|(a, b)| PatternElement::Filter(format!("(?{a} != ?{b})")))
}

fn element() -> impl Strategy<Value = Vec<PatternElement>> {
    prop_oneof![
        4 => triples(3),
        1 => triples(2).prop_map(|t| vec![PatternElement::Optional(GraphPattern::new(t))]),
        1 => filter().prop_map(|f| vec![f]),
        1 => (triples(2), triples(2)).prop_map(|(a, b)| vec![PatternElement::Union(GraphPattern::new(a), GraphPattern::new(b))]),
    ]
}

prop_compose! {
    fn query()(
        first in triples(2),
        rest in prop::collection::vec(element(), 0..4),
        distinct in any::<bool>(),
        star in any::<bool>(),
        order in prop::collection::vec((var(), any::<bool>()), 0..2),
        limit in proptest::option::of(0u64..1000),
        offset in proptest::option::of(0u64..1000),
    ) -> SelectQuery {
        let mut elements = first;
        rest.into_iter().for_each(|e| elements.extend(e));
        let mut q = SelectQuery {
            prologue: Prologue::default().with_prefix("ex", "http://example.org/ns#"),
            distinct,
            projection: Projection::Star,
            where_clause: GraphPattern::new(elements),
            modifiers: Modifiers {
                order_by: order
                    .into_iter()
                    .map(|(v, desc)| {
                        let v = v.as_variable().unwrap().clone();
                        (v, if desc { OrderDirection::Desc } else { OrderDirection::Asc })
                    })
                    .collect(),
                limit,
                offset,
            },
        };
        if !star {
            let mut vars: Vec<Variable> = q.where_variables().into_iter().collect();
            vars.sort_by(|a, b| a.as_str().cmp(b.as_str()));
            q.projection = Projection::Variables(vars);
        }
        q
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn serialize_then_parse_is_identity(q in query()) {
        let text = serialize(&q, true).unwrap();
        let parsed = parse_query(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&parsed, &q, "{}", text);
    }

    #[test]
    fn comment_free_serialization_drops_only_comments(q in query()) {
        let text = serialize(&q, false).unwrap();
        prop_assert_eq!(parse_query(&text).unwrap(), q.strip_comments());
    }
}

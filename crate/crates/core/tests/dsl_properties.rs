use bpweave::dsl::ast::{EventDef, EventExpr, Ident, Literal, Stmt, StmtKind, StoryDef};
use bpweave::dsl::{
    check, expand_refinements, parse, parse_bytes, pretty_print, SourceFile, Span, Step, KEYWORDS,
};
use bpweave::{compile_str, ModelAst};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn ident() -> impl Strategy<Value = String> {
    "[a-zA-Z_][a-zA-Z0-9_]{0,6}".prop_filter("keyword", |s| !KEYWORDS.contains(&s.as_str()))
}

fn literal() -> impl Strategy<Value = Literal> {
    prop_oneof![
        any::<String>().prop_map(Literal::Str),
        any::<i64>().prop_map(Literal::Int),
        ident().prop_map(Literal::Ident),
    ]
}

fn event_expr() -> impl Strategy<Value = EventExpr> {
    let key = prop_oneof![
        ident(),
        proptest::sample::select(KEYWORDS.to_vec()).prop_map(String::from)
    ];
    (ident(), proptest::collection::vec((key, literal()), 0..3)).prop_map(|(name, fields)| {
        let fields: Vec<(&str, Literal)> = fields
            .iter()
            .map(|(k, v)| (k.as_str(), v.clone()))
            .collect();
        EventExpr::new(&name, &fields)
    })
}

fn exprs() -> impl Strategy<Value = Vec<EventExpr>> {
    proptest::collection::vec(event_expr(), 1..3)
}

fn stmt() -> impl Strategy<Value = Stmt> {
    let leaf = prop_oneof![
        event_expr().prop_map(StmtKind::Request),
        exprs().prop_map(StmtKind::WaitFor),
        (exprs(), event_expr())
            .prop_map(|(blocked, until)| StmtKind::BlockUntil { blocked, until }),
    ]
    .prop_map(Stmt::new);
    leaf.prop_recursive(4, 24, 4, |inner| {
        let block = proptest::collection::vec(inner, 0..4);
        prop_oneof![
            (1..1000i64, block.clone()).prop_map(|(count, body)| StmtKind::Repeat { count, body }),
            block.clone().prop_map(StmtKind::Forever),
            proptest::collection::vec(block.clone(), 2..4).prop_map(StmtKind::Choose),
            (ident(), block).prop_map(|(id, body)| StmtKind::Session {
                id: Ident::new(id),
                body
            }),
        ]
        .prop_map(Stmt::new)
    })
}

fn model_ast() -> impl Strategy<Value = ModelAst> {
    let def =
        (ident(), proptest::collection::vec(ident(), 0..3), exprs()).prop_map(|(n, ps, body)| {
            EventDef {
                name: Ident::new(n),
                params: ps.into_iter().map(Ident::new).collect(),
                body,
                span: Span::default(),
            }
        });
    let story =
        (any::<String>(), proptest::collection::vec(stmt(), 0..4)).prop_map(|(name, body)| {
            StoryDef {
                name,
                name_span: Span::default(),
                body,
                span: Span::default(),
            }
        });
    (
        proptest::collection::vec(ident().prop_map(Ident::new), 0..3),
        proptest::collection::vec(def, 0..3),
        proptest::collection::vec(story, 0..3),
    )
        .prop_map(|(highlevel, event_defs, stories)| ModelAst {
            highlevel,
            event_defs,
            stories,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pretty_print_round_trips(ast in model_ast()) {
        let text = pretty_print(&ast);
        let back = parse(&SourceFile::new("p.story", text.clone()));
        prop_assert!(back.is_ok(), "{text}\n{:?}", back.err());
        let back = back.unwrap();
        prop_assert_eq!(&back, &ast);
        prop_assert_eq!(pretty_print(&back), text);
    }

    #[test]
    fn arbitrary_text_never_panics(text in any::<String>()) {
        if let Ok(ast) = parse(&SourceFile::new("f", text)) {
            let _ = check(&ast);
        }
    }
}

/// Random byte strings; every other one is spliced from language tokens so
/// the parser gets past the first token often enough to matter.
#[test]
fn fuzz_bytes() {
    const PIECES: &[&str] = &[
        "story",
        "\"s\"",
        "{",
        "}",
        "(",
        ")",
        "[",
        "]",
        ",",
        ":",
        "=",
        "request",
        "waitFor",
        "block",
        "until",
        "repeat",
        "forever",
        "choose",
        "or",
        "session",
        "event",
        "highlevel",
        "a",
        "b",
        "3",
        "-1",
        "99999999999999999999",
        "\"",
        "\\",
        "//",
        "\n",
        " ",
        "\u{0}",
        "\u{ff}",
    ];
    let mut rng = rand_pcg::Pcg64::seed_from_u64(7);
    for i in 0..10_000 {
        let bytes: Vec<u8> = if i % 2 == 0 {
            let len = rng.gen_range(0..64);
            (0..len).map(|_| rng.gen()).collect()
        } else {
            let len = rng.gen_range(0..40);
            (0..len)
                .flat_map(|_| {
                    let p = PIECES[rng.gen_range(0..PIECES.len())];
                    format!("{p} ").into_bytes()
                })
                .collect()
        };
        match parse_bytes(0, "fuzz.story", &bytes) {
            Ok(ast) => {
                if let Ok(m) = check(&ast) {
                    let _ = expand_refinements(&m);
                }
            }
            Err(diags) => assert!(diags.iter().any(|d| d.is_error())),
        }
    }
}

#[test]
fn deep_nesting_is_a_diagnostic() {
    let text = format!(
        "story \"s\" {}{}",
        "{ forever ".repeat(5000),
        "}".repeat(5000)
    );
    assert!(parse(&SourceFile::new("deep", text)).is_err());
}

const PIZZA: &str = r#"
event ComposeQuery(text) = [type_query(text: text), press_enter]
highlevel ComposeQuery, StartSearch
event StartSearch() = [click_search]

story "SearchPizzaOnGoogle" {
  session A1 {
    request ComposeQuery(text: "Pizza")
    request StartSearch
  }
}
"#;

#[test]
fn search_story_parses_into_one_session() {
    let ast = parse(&SourceFile::new("pizza.story", PIZZA)).unwrap();
    assert_eq!(ast.stories.len(), 1);
    let StmtKind::Session { id, body } = &ast.stories[0].body[0].kind else {
        panic!()
    };
    assert_eq!(id.name, "A1");
    assert_eq!(body.len(), 2);
    assert!(body.iter().all(|s| matches!(s.kind, StmtKind::Request(_))));
}

fn flatten(steps: &[Step], out: &mut Vec<(String, Option<String>)>) {
    for s in steps {
        match s {
            Step::Request(e) => out.push((e.name.clone(), e.session().map(String::from))),
            Step::Repeat { body, count } => (0..*count).for_each(|_| flatten(body, out)),
            Step::Session { body, .. } => flatten(body, out),
            _ => {}
        }
    }
}

#[test]
fn refinement_preserves_order_within_session() {
    let expanded = expand_refinements(&compile_str("pizza", PIZZA).unwrap());
    let mut seq = Vec::new();
    flatten(&expanded.stories[0].body, &mut seq);
    let a1 = Some("A1".to_string());
    assert_eq!(
        seq,
        vec![
            ("type_query".into(), a1.clone()),
            ("press_enter".into(), a1.clone()),
            ("click_search".into(), a1)
        ]
    );
    assert!(!expanded.vocabulary.contains("ComposeQuery"));
    let again = expand_refinements(&expanded);
    assert_eq!(again.to_canonical_json(), expanded.to_canonical_json());
}

//! Random statement trees for round-trip testing. Only canonical shapes are
//! produced: trees the parser itself can return.

use chrono::NaiveDate;
use gqlengine::syntax::*;
use gqlengine::Ident;
use proptest::prelude::*;
use rust_decimal::Decimal;

const NAMES: [&str; 10] = ["a", "b", "x", "acct", "Person", "own", "p", "m", "amount", "w2"];
const QUOTED: [&str; 4] = ["timestamp", "Mixed Case", "match", "it\"s"];
const FUNCS: [&str; 4] = ["cardinality", "later", "f", "count"];

pub fn ident() -> impl Strategy<Value = Ident> {
    prop_oneof![
        4 => prop::sample::select(&NAMES[..]).prop_map(Ident::plain),
        1 => prop::sample::select(&QUOTED[..]).prop_map(Ident::quoted),
    ]
}

fn literal() -> impl Strategy<Value = Literal> {
    prop_oneof![
        (0i64..1_000_000).prop_map(Literal::Int),
        (0i64..10_000_000, 0u32..4).prop_map(|(m, s)| Literal::Decimal(Decimal::new(m, s))),
        any::<bool>().prop_map(Literal::Bool),
        "[a-zA-Z ']{0,8}".prop_map(Literal::Text),
        (0i64..2_000_000_000).prop_map(|s| {
            let base = NaiveDate::from_ymd_opt(2000, 1, 1).unwrap().and_hms_opt(0, 0, 0).unwrap();
            Literal::Timestamp(base + chrono::Duration::seconds(s))
        }),
    ]
}

const OPS: [BinaryOp; 12] = [
    BinaryOp::Or,
    BinaryOp::And,
    BinaryOp::Eq,
    BinaryOp::Ne,
    BinaryOp::Lt,
    BinaryOp::Le,
    BinaryOp::Gt,
    BinaryOp::Ge,
    BinaryOp::Add,
    BinaryOp::Sub,
    BinaryOp::Mul,
    BinaryOp::Div,
];

pub fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![literal().prop_map(Expr::Literal), ident().prop_map(Expr::Ident)];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), ident()).prop_map(|(e, n)| Expr::Property(Box::new(e), n)),
            (inner.clone(), inner.clone()).prop_map(|(e, i)| Expr::Index(Box::new(e), Box::new(i))),
            (prop::sample::select(&FUNCS[..]), prop::collection::vec(inner.clone(), 0..3))
                .prop_map(|(f, args)| Expr::Call(Ident::plain(f), args)),
            Just(Expr::Call(Ident::plain("count"), vec![Expr::Star])),
            inner.clone().prop_map(|e| Expr::Unary(UnaryOp::Not, Box::new(e))),
            inner.clone().prop_map(|e| Expr::Unary(UnaryOp::Neg, Box::new(e))),
            (prop::sample::select(&OPS[..]), inner.clone(), inner.clone())
                .prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            prop::collection::vec(inner, 2..4).prop_map(Expr::Tuple),
        ]
    })
}

/// Order keys never hold a bare tuple: the parser spreads one into keys.
fn order_key() -> impl Strategy<Value = OrderKey> {
    let e = expr().prop_filter("tuple key", |e| !matches!(e, Expr::Tuple(_)));
    (e, prop_oneof![Just(SortDirection::Asc), Just(SortDirection::Desc)])
        .prop_map(|(expr, direction)| OrderKey { expr, direction })
}

fn item(with_where: bool) -> impl Strategy<Value = ElementItem> {
    let where_clause = if with_where {
        prop::option::weighted(0.3, expr()).boxed()
    } else {
        Just(None).boxed()
    };
    (
        prop::option::of(ident()),
        prop::option::of(ident()),
        prop::collection::vec((ident(), expr()), 0..3),
        where_clause,
    )
        .prop_map(|(alias, label, properties, where_clause)| ElementItem {
            alias,
            label,
            properties,
            where_clause,
        })
}

fn node(with_where: bool) -> impl Strategy<Value = NodePattern> {
    item(with_where).prop_map(|item| NodePattern { item })
}

fn edge(with_where: bool) -> impl Strategy<Value = EdgePattern> {
    (item(with_where), any::<bool>()).prop_map(|(item, ltr)| EdgePattern {
        item,
        direction: if ltr {
            EdgeDirection::LeftToRight
        } else {
            EdgeDirection::RightToLeft
        },
    })
}

fn mode() -> impl Strategy<Value = MatchMode> {
    (
        prop::sample::select(vec![
            Repetition::Default,
            Repetition::Trail,
            Repetition::Acyclic,
            Repetition::Simple,
        ]),
        prop::sample::select(vec![Selection::Default, Selection::All, Selection::Any, Selection::Shortest]),
    )
        .prop_map(|(repetition, selection)| MatchMode { repetition, selection })
}

fn quantifier() -> impl Strategy<Value = Quantifier> {
    prop_oneof![
        Just(Quantifier::OPTIONAL),
        Just(Quantifier::PLUS),
        Just(Quantifier::STAR),
        (0u32..4).prop_map(|min| Quantifier { min, max: None }),
        (0u32..4, 1u32..4).prop_map(|(a, b)| Quantifier {
            min: a.min(b),
            max: Some(a.max(b))
        }),
    ]
}

fn match_pattern_at(depth: u32) -> BoxedStrategy<MatchPattern> {
    let connector: BoxedStrategy<Connector> = if depth == 0 {
        edge(true).prop_map(Connector::Edge).boxed()
    } else {
        prop_oneof![
            3 => edge(true).prop_map(Connector::Edge),
            1 => (match_pattern_at(depth - 1), quantifier())
                .prop_map(|(pattern, quantifier)| Connector::Path(Box::new(PathPattern { pattern, quantifier }))),
        ]
        .boxed()
    };
    (
        mode(),
        prop::option::of(ident()),
        node(true),
        prop::collection::vec((connector, node(true)), 0..3),
    )
        .prop_map(|(mode, path_var, start, steps)| MatchPattern {
            mode,
            path_var,
            start,
            steps,
        })
        .boxed()
}

fn create() -> impl Strategy<Value = CreateStatement> {
    prop::collection::vec(
        (node(false), prop::collection::vec((edge(false), node(false)), 0..3))
            .prop_map(|(start, steps)| CreatePattern { start, steps }),
        1..3,
    )
    .prop_map(|patterns| CreateStatement { patterns })
}

fn truncation() -> impl Strategy<Value = TruncationSpec> {
    (prop::option::of(ident()), prop::collection::vec(order_key(), 0..3), 1u64..100).prop_map(
        |(edge_type, order, limit)| TruncationSpec {
            edge_type,
            order,
            limit,
        },
    )
}

fn dependent() -> impl Strategy<Value = Option<Box<Dependent>>> {
    let ret = (
        prop::collection::vec(
            (expr(), prop::option::of(ident())).prop_map(|(expr, alias)| Projection { expr, alias }),
            1..4,
        )
        .prop_filter("duplicate alias", |ps| {
            let keys: Vec<_> = ps.iter().filter_map(|p| p.alias.as_ref().map(Ident::key)).collect();
            keys.iter().enumerate().all(|(i, k)| !keys[..i].contains(k))
        }),
        prop::collection::vec(order_key(), 0..3),
    )
        .prop_map(|(projections, order_by)| Dependent::Return(ReturnClause { projections, order_by }));
    prop::option::of(prop_oneof![ret, create().prop_map(Dependent::Create)].prop_map(Box::new))
}

pub fn statement() -> impl Strategy<Value = Statement> {
    let m = (
        prop::collection::vec(truncation(), 0..3),
        prop::collection::vec(match_pattern_at(2), 1..3),
        prop::option::of(expr()),
        dependent(),
    )
        .prop_map(|(truncation, matches, where_clause, dependent)| {
            Statement::Match(MatchStatement {
                truncation,
                matches,
                where_clause,
                dependent,
            })
        });
    prop_oneof![4 => m, 1 => create().prop_map(Statement::Create)]
}

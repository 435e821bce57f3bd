use chrono::{DateTime, NaiveDateTime};
use gqlengine::expr::call_builtin_later;
use gqlengine::{Properties, Store, Value};
use proptest::prelude::*;

/// The stored function body, read literally: `c = cardinality(a)`, true when
/// `c = 0`, else `a[c-1].timestamp < t`.
fn transcribed(a: &[NaiveDateTime], t: NaiveDateTime) -> bool {
    let c = a.len();
    if c == 0 {
        true
    } else {
        a[c - 1] < t
    }
}

fn at(s: i64) -> NaiveDateTime {
    DateTime::from_timestamp(s, 0).unwrap().naive_utc()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn later_matches_function_body(stamps in prop::collection::vec(0i64..50, 0..5), t in 0i64..50, equal in any::<bool>()) {
        let mut store = Store::new();
        store.define_node_type("Account", None).unwrap();
        store.define_edge_type("transfer", "Account", "Account", None).unwrap();
        let a = store.insert_node("Account", Properties::new()).unwrap();
        let stamps: Vec<_> = stamps.into_iter().map(|s| at(s * 3600)).collect();
        // half the cases probe the strict boundary
        let t = match (equal, stamps.last()) {
            (true, Some(last)) => *last,
            _ => at(t * 3600),
        };
        let edges: Vec<Value> = stamps
            .iter()
            .map(|ts| {
                let mut p = Properties::new();
                p.insert("timestamp".into(), Value::Timestamp(*ts));
                Value::Edge(store.insert_edge("transfer", a, a, p).unwrap())
            })
            .collect();
        let got = call_builtin_later(&edges, &Value::Timestamp(t), &store).unwrap();
        prop_assert_eq!(got, transcribed(&stamps, t));
    }
}

#[test]
fn missing_timestamp_is_a_type_error() {
    let mut store = Store::new();
    store.define_node_type("A", None).unwrap();
    store.define_edge_type("e", "A", "A", None).unwrap();
    let a = store.insert_node("A", Properties::new()).unwrap();
    let e = store.insert_edge("e", a, a, Properties::new()).unwrap();
    assert!(call_builtin_later(&[Value::Edge(e)], &Value::Timestamp(at(0)), &store).is_err());
    assert!(call_builtin_later(&[], &Value::Timestamp(at(0)), &store).unwrap());
}

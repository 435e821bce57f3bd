//! Fixtures and the brute-force reference for the complex read query.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use chrono::NaiveDateTime;
use gqlengine::exec::query;
use gqlengine::expr::FunctionRegistry;
use gqlengine::syntax::{parse_statement, Statement};
use gqlengine::{ElementId, Executed, Outcome, ResultTable, Store, TypeRef, Value};
use gqlengine_cli::substitute_parameters;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub const START: &str = "2022-01-01 00:00:00";
pub const END: &str = "2022-12-31 00:00:00";

pub fn ts(s: &str) -> NaiveDateTime {
    NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S").unwrap()
}

/// (otherId, accountDistance, mediumId, mediumType)
pub type Row = (i64, i64, i64, String);

/// The bundled query script with its parameters filled in.
pub fn complex_read(order: &str, limit: u64, id1: i64) -> String {
    let text = std::fs::read_to_string(fixture("scripts/complex-read.gql")).unwrap();
    let params: BTreeMap<String, String> = [
        ("truncationOrder", order.to_string()),
        ("truncationLimit", limit.to_string()),
        ("startTime", "timestamp'2022-01-01'".to_string()),
        ("endTime", "timestamp'2022-12-31'".to_string()),
        ("id1", id1.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    substitute_parameters(&text, &params).unwrap()
}

pub fn run(store: &Store, text: &str) -> Executed {
    let Statement::Match(m) = parse_statement(text).unwrap_or_else(|e| panic!("{e}\n{text}")) else {
        panic!("not a MATCH")
    };
    query(store, &FunctionRegistry::default(), &m).unwrap_or_else(|e| panic!("{e}\n{text}"))
}

pub fn table(e: &Executed) -> &ResultTable {
    match &e.outcome {
        Outcome::Table(t) => t,
        other => panic!("{other:?}"),
    }
}

pub fn rows(t: &ResultTable) -> Vec<Row> {
    t.rows
        .iter()
        .map(|r| match &r[..] {
            [Value::Int(o), Value::Int(d), Value::Int(m), Value::Text(ty)] => (*o, *d, *m, ty.clone()),
            other => panic!("unexpected row {other:?}"),
        })
        .collect()
}

/// Plain copies of the records the reference walks over.
pub struct Finbench {
    /// node id -> (external id, type, isBlocked, medium type)
    nodes: BTreeMap<ElementId, (i64, String, bool, String)>,
    /// (source, destination, timestamp), per edge type name
    edges: BTreeMap<String, Vec<(ElementId, ElementId, NaiveDateTime)>>,
}

impl Finbench {
    pub fn read(store: &Store) -> Finbench {
        let mut nodes = BTreeMap::new();
        for n in store.nodes() {
            let int = |k: &str| match n.properties.get(k) {
                Some(Value::Int(i)) => *i,
                _ => 0,
            };
            let blocked = matches!(n.properties.get("isBlocked"), Some(Value::Bool(true)));
            let kind = match n.properties.get("type") {
                Some(Value::Text(t)) => t.clone(),
                _ => String::new(),
            };
            let ty = store.type_name(TypeRef::Node(n.node_type)).to_string();
            nodes.insert(n.id, (int("id"), ty, blocked, kind));
        }
        let mut edges: BTreeMap<String, Vec<_>> = BTreeMap::new();
        for e in store.edges() {
            let Some(Value::Timestamp(t)) = e.properties.get("timestamp") else { continue };
            let ty = store.type_name(TypeRef::Edge(e.edge_type)).to_string();
            edges.entry(ty).or_default().push((e.source, e.dest, *t));
        }
        Finbench { nodes, edges }
    }

    pub fn max_out_degree(&self) -> usize {
        let mut deg: BTreeMap<ElementId, usize> = BTreeMap::new();
        for list in self.edges.values() {
            for (s, _, _) in list {
                *deg.entry(*s).or_default() += 1;
            }
        }
        deg.values().copied().max().unwrap_or(0)
    }

    /// Accounts with the most in-window incoming transfers, by external id.
    pub fn busiest_targets(&self, n: usize) -> Vec<i64> {
        let (lo, hi) = (ts(START), ts(END));
        let mut count: BTreeMap<ElementId, usize> = BTreeMap::new();
        for (_, d, t) in self.edges.get("transfer").into_iter().flatten() {
            if lo < *t && *t < hi {
                *count.entry(*d).or_default() += 1;
            }
        }
        let mut v: Vec<_> = count.into_iter().collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        v.into_iter().take(n).map(|(id, _)| self.nodes[&id].0).collect()
    }

    /// Every blocked medium that signed in to some account inside the window,
    /// followed by one to three transfers inside the window with strictly
    /// increasing timestamps, ending at account `id1`.
    pub fn reference(&self, id1: i64) -> Vec<Row> {
        let (lo, hi) = (ts(START), ts(END));
        let inside = |t: &NaiveDateTime| lo < *t && *t < hi;
        let transfers = self.edges.get("transfer").cloned().unwrap_or_default();
        let mut out = Vec::new();
        for (m, a0, t) in self.edges.get("signIn").into_iter().flatten() {
            let (mid, mty, blocked, kind) = &self.nodes[m];
            if mty != "Medium" || !blocked || !inside(t) || self.nodes[a0].1 != "Account" {
                continue;
            }
            let other = self.nodes[a0].0;
            // (account, last transfer time, hops)
            let mut frontier = vec![(*a0, None::<NaiveDateTime>, 0i64)];
            while let Some((at, last, hops)) = frontier.pop() {
                if hops == 3 {
                    continue;
                }
                for (s, d, t) in &transfers {
                    if s != &at || !inside(t) || last.is_some_and(|l| l >= *t) {
                        continue;
                    }
                    if self.nodes[d].1 != "Account" {
                        continue;
                    }
                    if self.nodes[d].0 == id1 {
                        out.push((other, hops + 1, *mid, kind.clone()));
                    }
                    frontier.push((*d, Some(*t), hops + 1));
                }
            }
        }
        out.sort();
        out
    }
}

pub fn sorted(mut v: Vec<Row>) -> Vec<Row> {
    v.sort();
    v
}

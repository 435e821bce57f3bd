#![allow(dead_code)]

pub mod astgen;
pub mod corpus;
pub mod paths;

use gqlengine::expr::FunctionRegistry;
use gqlengine::matcher::{match_statement, BindingTable, MatchStats};
use gqlengine::syntax::{parse_statement, Statement};
use gqlengine::{ElementRef, Ident, Store, Value};

pub fn run_match(store: &Store, text: &str) -> (BindingTable, MatchStats) {
    let Statement::Match(m) = parse_statement(text).unwrap_or_else(|e| panic!("{text}: {e}")) else {
        panic!("not a MATCH: {text}")
    };
    let mut stats = MatchStats::default();
    let table = match_statement(store, &FunctionRegistry::default(), &m, &mut stats)
        .unwrap_or_else(|e| panic!("{text}: {e}"));
    (table, stats)
}

/// The element sequences bound to path variable `name`, sorted.
pub fn path_rows(table: &BindingTable, name: &str) -> Vec<Vec<(bool, u64)>> {
    let i = table.column_index(&Ident::plain(name).key()).expect("path column");
    let mut rows: Vec<_> = table
        .rows
        .iter()
        .map(|r| match &r[i] {
            Value::Path(p) => flatten(&p.elements),
            other => panic!("not a path: {other:?}"),
        })
        .collect();
    rows.sort();
    rows
}

pub fn flatten(elements: &[ElementRef]) -> Vec<(bool, u64)> {
    elements
        .iter()
        .map(|e| (matches!(e, ElementRef::Edge(_)), e.id()))
        .collect()
}

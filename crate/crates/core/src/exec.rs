//! Statement execution: CREATE, RETURN projection, and the database handle.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use rust_decimal::Decimal;
use thiserror::Error;

use crate::expr::{eval, expr_address, Env, EvalContext, EvalError, FunctionRegistry, Scope};
use crate::ident::Key;
use crate::matcher::{match_statement, BindingTable, MatchError, MatchStats};
use crate::store::{ElementId, Properties, Store, StoreError, TypeRef};
use crate::syntax::ast::{
    is_aggregate, CreateStatement, Dependent, EdgeDirection, ElementItem, Expr, MatchStatement, NodePattern,
    ReturnClause, SortDirection, Statement,
};
use crate::syntax::{parse_statement, print_expr, SyntaxError};
use crate::value::{compare, compare_sort_cells, dominant_family, Value};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExecError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("unresolved alias {0}")]
    UnresolvedAlias(String),
    #[error("{0}")]
    Invalid(String),
}

/// Rows ready for display.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CreateSummary {
    pub nodes_created: usize,
    pub edges_created: usize,
    pub types_created: usize,
}

impl CreateSummary {
    fn add(&mut self, other: CreateSummary) {
        self.nodes_created += other.nodes_created;
        self.edges_created += other.edges_created;
        self.types_created += other.types_created;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Table(ResultTable),
    Created(CreateSummary),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Executed {
    pub outcome: Outcome,
    pub stats: MatchStats,
}

/// A store plus the functions queries may call.
///
/// Readers can take a [`Database::snapshot`]; writes after that copy the
/// store instead of disturbing the snapshot.
#[derive(Clone, Debug, Default)]
pub struct Database {
    store: Arc<Store>,
    functions: Arc<FunctionRegistry>,
}

impl Database {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_store(store: Store) -> Self {
        Database {
            store: Arc::new(store),
            functions: Arc::new(FunctionRegistry::default()),
        }
    }

    pub fn with_functions(store: Store, functions: FunctionRegistry) -> Self {
        Database {
            store: Arc::new(store),
            functions: Arc::new(functions),
        }
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn snapshot(&self) -> Arc<Store> {
        Arc::clone(&self.store)
    }

    pub fn functions(&self) -> &FunctionRegistry {
        &self.functions
    }

    pub fn execute_text(&mut self, text: &str) -> Result<Executed, ExecError> {
        let stmt = parse_statement(text)?;
        self.execute(&stmt)
    }

    pub fn execute(&mut self, stmt: &Statement) -> Result<Executed, ExecError> {
        match stmt {
            Statement::Create(c) => {
                let functions = Arc::clone(&self.functions);
                let summary = execute_create(Arc::make_mut(&mut self.store), &functions, c, None)?;
                Ok(Executed {
                    outcome: Outcome::Created(summary),
                    stats: MatchStats::default(),
                })
            }
            Statement::Match(m) => match m.dependent.as_deref() {
                Some(Dependent::Create(c)) => {
                    let mut stats = MatchStats::default();
                    let table = match_statement(&self.store, &self.functions, m, &mut stats)?;
                    let functions = Arc::clone(&self.functions);
                    let summary = execute_create_per_row(Arc::make_mut(&mut self.store), &functions, c, &table)?;
                    Ok(Executed {
                        outcome: Outcome::Created(summary),
                        stats,
                    })
                }
                _ => self.query(m),
            },
        }
    }

    /// Runs a MATCH whose dependent statement (if any) is RETURN.
    pub fn query(&self, stmt: &MatchStatement) -> Result<Executed, ExecError> {
        query(&self.store, &self.functions, stmt)
    }
}

/// Read-only MATCH execution against a store snapshot.
pub fn query(store: &Store, functions: &FunctionRegistry, stmt: &MatchStatement) -> Result<Executed, ExecError> {
    let mut stats = MatchStats::default();
    let table = match_statement(store, functions, stmt, &mut stats)?;
    let result = match stmt.dependent.as_deref() {
        Some(Dependent::Return(r)) => evaluate_return(store, functions, r, &table)?,
        Some(Dependent::Create(_)) => {
            return Err(ExecError::Invalid("MATCH ... CREATE needs write access".into()));
        }
        None => binding_view(&table),
    };
    Ok(Executed {
        outcome: Outcome::Table(result),
        stats,
    })
}

/// The display form of a MATCH with no dependent statement: the identifiers
/// bound through property maps when there are any, otherwise every binding.
pub fn binding_view(table: &BindingTable) -> ResultTable {
    let picked: Vec<usize> = if table.columns.iter().any(|c| c.binder) {
        (0..table.columns.len()).filter(|&i| table.columns[i].binder).collect()
    } else {
        (0..table.columns.len()).collect()
    };
    ResultTable {
        columns: picked.iter().map(|&i| table.columns[i].name.to_uppercase()).collect(),
        rows: table
            .rows
            .iter()
            .map(|r| picked.iter().map(|&i| r[i].clone()).collect())
            .collect(),
    }
}

// ---- CREATE ----

fn execute_create_per_row(
    store: &mut Store,
    functions: &FunctionRegistry,
    stmt: &CreateStatement,
    table: &BindingTable,
) -> Result<CreateSummary, ExecError> {
    let cp = store.checkpoint();
    let mut total = CreateSummary::default();
    for i in 0..table.rows.len() {
        match create_inner(store, functions, stmt, Some(&table.row_scope(i))) {
            Ok(s) => total.add(s),
            Err(e) => {
                store.rollback(cp);
                return Err(e);
            }
        }
    }
    Ok(total)
}

/// Builds the nodes and edges of `stmt`. `env` supplies bindings from an
/// enclosing MATCH. Nothing is kept if any part fails.
pub fn execute_create(
    store: &mut Store,
    functions: &FunctionRegistry,
    stmt: &CreateStatement,
    env: Option<&dyn Scope>,
) -> Result<CreateSummary, ExecError> {
    let cp = store.checkpoint();
    let r = create_inner(store, functions, stmt, env);
    if r.is_err() {
        store.rollback(cp);
    }
    r
}

struct CreateScope<'e> {
    local: HashMap<Key, Value>,
    outer: Option<&'e dyn Scope>,
}

impl Scope for CreateScope<'_> {
    fn lookup(&self, key: &Key) -> Option<Value> {
        self.local
            .get(key)
            .cloned()
            .or_else(|| self.outer.and_then(|o| o.lookup(key)))
    }
}

fn create_inner(
    store: &mut Store,
    functions: &FunctionRegistry,
    stmt: &CreateStatement,
    env: Option<&dyn Scope>,
) -> Result<CreateSummary, ExecError> {
    let types_before = store.node_types().count() + store.edge_types().count();
    let nodes_before = store.node_count();
    let edges_before = store.edge_count();
    let mut scope = CreateScope {
        local: HashMap::new(),
        outer: env,
    };
    for pattern in &stmt.patterns {
        let mut prev = create_node(store, functions, &mut scope, &pattern.start)?;
        for (edge, node) in &pattern.steps {
            let next = create_node(store, functions, &mut scope, node)?;
            let Some(label) = &edge.item.label else {
                return Err(ExecError::Invalid("an edge in CREATE needs a type label".into()));
            };
            let (src, dst) = match edge.direction {
                EdgeDirection::LeftToRight => (prev, next),
                EdgeDirection::RightToLeft => (next, prev),
            };
            let edge_type = match store.find_edge_type(label) {
                Some(t) => t,
                None => {
                    let src_type = store.node(src).map(|n| n.node_type).ok_or(StoreError::UnknownNode(src))?;
                    let dst_type = store.node(dst).map(|n| n.node_type).ok_or(StoreError::UnknownNode(dst))?;
                    let src_name = store.type_name(TypeRef::Node(src_type)).to_string();
                    let dst_name = store.type_name(TypeRef::Node(dst_type)).to_string();
                    store.define_edge_type(&label.name, &src_name, &dst_name, None)?
                }
            };
            let props = properties(store, functions, &scope, &edge.item)?;
            let id = store.insert_edge_typed(edge_type, src, dst, props)?;
            bind_alias(&mut scope, &edge.item, Value::Edge(id))?;
            prev = next;
        }
    }
    Ok(CreateSummary {
        nodes_created: store.node_count() - nodes_before,
        edges_created: store.edge_count() - edges_before,
        types_created: store.node_types().count() + store.edge_types().count() - types_before,
    })
}

fn bind_alias(scope: &mut CreateScope<'_>, item: &ElementItem, value: Value) -> Result<(), ExecError> {
    if let Some(a) = &item.alias {
        if scope.lookup(&a.key()).is_some() {
            return Err(ExecError::Invalid(format!("alias {a} is already bound")));
        }
        scope.local.insert(a.key(), value);
    }
    Ok(())
}

fn create_node(
    store: &mut Store,
    functions: &FunctionRegistry,
    scope: &mut CreateScope<'_>,
    node: &NodePattern,
) -> Result<ElementId, ExecError> {
    let item = &node.item;
    let Some(label) = &item.label else {
        // `(a)` refers to a node created earlier or bound by MATCH
        let Some(alias) = &item.alias else {
            return Err(ExecError::UnresolvedAlias("()".into()));
        };
        if !item.properties.is_empty() {
            return Err(ExecError::Invalid(format!(
                "properties on a reference to {alias} need a type label to create a node"
            )));
        }
        return match scope.lookup(&alias.key()) {
            Some(Value::Node(id)) => Ok(id),
            Some(other) => Err(ExecError::Invalid(format!("{alias} is bound to {}, not a node", other.kind()))),
            None => Err(ExecError::UnresolvedAlias(alias.name.clone())),
        };
    };
    let node_type = match store.find_node_type(label) {
        Some(t) => t,
        None => store.define_node_type(&label.name, None)?,
    };
    let props = properties(store, functions, scope, item)?;
    let id = store.insert_node_typed(node_type, props);
    bind_alias(scope, item, Value::Node(id))?;
    Ok(id)
}

fn properties(
    store: &Store,
    functions: &FunctionRegistry,
    scope: &CreateScope<'_>,
    item: &ElementItem,
) -> Result<Properties, ExecError> {
    let ctx = EvalContext::new(store, functions);
    let mut props = Properties::new();
    for (name, expr) in &item.properties {
        let v = eval(expr, &ctx, Env::new(scope))?;
        if !v.is_null() {
            props.insert(name.name.clone(), v);
        }
    }
    Ok(props)
}

// ---- RETURN ----

/// Column name for an unaliased projection.
pub fn column_name(expr: &Expr) -> String {
    match expr {
        Expr::Ident(id) => id.name.to_uppercase(),
        other => print_expr(other),
    }
}

/// Projects `bindings` through `ret`, aggregating when any projection does,
/// then applies ORDER BY.
pub fn evaluate_return(
    store: &Store,
    functions: &FunctionRegistry,
    ret: &ReturnClause,
    bindings: &BindingTable,
) -> Result<ResultTable, ExecError> {
    let columns: Vec<String> = ret
        .projections
        .iter()
        .map(|p| p.alias.as_ref().map_or_else(|| column_name(&p.expr), |a| a.name.clone()))
        .collect();
    let alias_keys: Vec<Option<Key>> = ret.projections.iter().map(|p| p.alias.as_ref().map(|a| a.key())).collect();
    let aggregating = ret.projections.iter().any(|p| p.expr.has_aggregate());

    // (row values, index of the binding row backing it)
    let mut rows: Vec<(Vec<Value>, Option<usize>)> = Vec::new();
    let mut aggregates = HashMap::new();
    if aggregating {
        for p in &ret.projections {
            check_aggregate_only(&p.expr)?;
            collect_aggregates(store, functions, &p.expr, bindings, &mut aggregates)?;
        }
        for k in &ret.order_by {
            collect_aggregates(store, functions, &k.expr, bindings, &mut aggregates)?;
        }
        let ctx = EvalContext {
            store,
            functions,
            aggregates: Some(&aggregates),
        };
        let empty = crate::expr::EmptyScope;
        let row = ret
            .projections
            .iter()
            .map(|p| eval(&p.expr, &ctx, Env::new(&empty)))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((row, None));
    } else {
        let ctx = EvalContext::new(store, functions);
        for i in 0..bindings.rows.len() {
            let scope = bindings.row_scope(i);
            let row = ret
                .projections
                .iter()
                .map(|p| eval(&p.expr, &ctx, Env::new(&scope)))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push((row, Some(i)));
        }
    }

    if !ret.order_by.is_empty() {
        let ctx = EvalContext {
            store,
            functions,
            aggregates: Some(&aggregates),
        };
        let mut keyed = Vec::with_capacity(rows.len());
        for (idx, (row, binding)) in rows.into_iter().enumerate() {
            let scope = OutputScope {
                aliases: &alias_keys,
                row: &row,
                binding: binding.map(|b| bindings.row_scope(b)),
            };
            let keys = ret
                .order_by
                .iter()
                .map(|k| eval(&k.expr, &ctx, Env::new(&scope)))
                .collect::<Result<Vec<_>, _>>()?;
            keyed.push((keys, idx, row));
        }
        let families: Vec<Option<u8>> = (0..ret.order_by.len())
            .map(|i| dominant_family(keyed.iter().map(|(k, _, _)| k[i].clone())))
            .collect();
        keyed.sort_by(|(ka, ia, _), (kb, ib, _)| {
            for (i, key) in ret.order_by.iter().enumerate() {
                let ord = compare_sort_cells(&ka[i], &kb[i], families[i], key.direction == SortDirection::Desc);
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            ia.cmp(ib)
        });
        rows = keyed.into_iter().map(|(_, _, r)| (r, None)).collect();
    }

    Ok(ResultTable {
        columns,
        rows: rows.into_iter().map(|(r, _)| r).collect(),
    })
}

/// ORDER BY sees projection aliases first, then the binding row.
struct OutputScope<'a> {
    aliases: &'a [Option<Key>],
    row: &'a [Value],
    binding: Option<crate::matcher::RowScope<'a>>,
}

impl Scope for OutputScope<'_> {
    fn lookup(&self, key: &Key) -> Option<Value> {
        if let Some(i) = self.aliases.iter().position(|a| a.as_ref() == Some(key)) {
            return Some(self.row[i].clone());
        }
        self.binding.as_ref().and_then(|b| b.lookup(key))
    }
}

/// In an aggregating projection every identifier must sit inside an aggregate.
fn check_aggregate_only(expr: &Expr) -> Result<(), ExecError> {
    match expr {
        Expr::Call(name, _) if is_aggregate(name) => Ok(()),
        Expr::Ident(id) => Err(ExecError::Invalid(format!(
            "{id} is used outside an aggregate next to aggregates; grouping is not supported"
        ))),
        Expr::Literal(_) | Expr::Star => Ok(()),
        Expr::Call(_, args) | Expr::Tuple(args) => args.iter().try_for_each(check_aggregate_only),
        Expr::Property(e, _) | Expr::Unary(_, e) => check_aggregate_only(e),
        Expr::Index(a, b) | Expr::Binary(_, a, b) => {
            check_aggregate_only(a)?;
            check_aggregate_only(b)
        }
    }
}

fn collect_aggregates(
    store: &Store,
    functions: &FunctionRegistry,
    expr: &Expr,
    bindings: &BindingTable,
    out: &mut HashMap<usize, Value>,
) -> Result<(), ExecError> {
    match expr {
        Expr::Call(name, args) if is_aggregate(name) => {
            if args.iter().any(Expr::has_aggregate) {
                return Err(ExecError::Invalid(format!("nested aggregate inside {}", name.name)));
            }
            if args.len() != 1 {
                return Err(EvalError::Arity {
                    name: name.name.clone(),
                    expected: 1,
                    got: args.len(),
                }
                .into());
            }
            let v = aggregate(store, functions, &name.name.to_lowercase(), &args[0], bindings)?;
            out.insert(expr_address(expr), v);
            Ok(())
        }
        Expr::Literal(_) | Expr::Ident(_) | Expr::Star => Ok(()),
        Expr::Call(_, args) | Expr::Tuple(args) => args
            .iter()
            .try_for_each(|a| collect_aggregates(store, functions, a, bindings, out)),
        Expr::Property(e, _) | Expr::Unary(_, e) => collect_aggregates(store, functions, e, bindings, out),
        Expr::Index(a, b) | Expr::Binary(_, a, b) => {
            collect_aggregates(store, functions, a, bindings, out)?;
            collect_aggregates(store, functions, b, bindings, out)
        }
    }
}

fn aggregate(
    store: &Store,
    functions: &FunctionRegistry,
    name: &str,
    arg: &Expr,
    bindings: &BindingTable,
) -> Result<Value, ExecError> {
    if matches!(arg, Expr::Star) {
        return if name == "count" {
            Ok(Value::Int(bindings.rows.len() as i64))
        } else {
            Err(EvalError::TypeError(format!("{name}(*) is not defined")).into())
        };
    }
    let ctx = EvalContext::new(store, functions);
    let mut values = Vec::with_capacity(bindings.rows.len());
    for i in 0..bindings.rows.len() {
        let v = eval(arg, &ctx, Env::new(&bindings.row_scope(i)))?;
        if !v.is_null() {
            values.push(v);
        }
    }
    match name {
        "count" => Ok(Value::Int(values.len() as i64)),
        "sum" => sum(&values),
        "avg" => {
            if values.is_empty() {
                return Ok(Value::Null);
            }
            let total = match sum(&values)? {
                Value::Int(i) => Decimal::from(i),
                Value::Decimal(d) => d,
                _ => unreachable!("sum yields a number"),
            };
            total
                .checked_div(Decimal::from(values.len() as i64))
                .map(|d| Value::Decimal(d.normalize()))
                .ok_or_else(|| EvalError::TypeError("decimal overflow".into()).into())
        }
        "min" | "max" => {
            let mut best: Option<Value> = None;
            for v in values {
                best = Some(match best {
                    None => v,
                    Some(b) => {
                        let ord = compare(&v, &b).ok_or_else(|| {
                            EvalError::TypeError(format!("{name} over {} and {}", v.kind(), b.kind()))
                        })?;
                        let better = if name == "min" { ord == Ordering::Less } else { ord == Ordering::Greater };
                        if better {
                            v
                        } else {
                            b
                        }
                    }
                });
            }
            Ok(best.unwrap_or(Value::Null))
        }
        _ => unreachable!("not an aggregate: {name}"),
    }
}

/// Exact sum: integers stay integers until a decimal appears.
fn sum(values: &[Value]) -> Result<Value, ExecError> {
    let mut int_total: Option<i64> = Some(0);
    let mut dec_total = Decimal::ZERO;
    for v in values {
        match v {
            Value::Int(i) => {
                int_total = int_total.and_then(|t| t.checked_add(*i));
                dec_total = dec_total
                    .checked_add(Decimal::from(*i))
                    .ok_or_else(|| EvalError::TypeError("decimal overflow".into()))?;
            }
            Value::Decimal(d) => {
                int_total = None;
                dec_total = dec_total
                    .checked_add(*d)
                    .ok_or_else(|| EvalError::TypeError("decimal overflow".into()))?;
            }
            other => return Err(EvalError::TypeError(format!("cannot sum {}", other.kind())).into()),
        }
    }
    if values.is_empty() {
        return Ok(Value::Null);
    }
    Ok(match int_total {
        Some(i) if values.iter().all(|v| matches!(v, Value::Int(_))) => Value::Int(i),
        _ => Value::Decimal(dec_total.normalize()),
    })
}

//! Pattern matching: turns the items of a MATCH statement into a binding table.
//!
//! Matching is a depth-first walk over the store driven by a compiled form of
//! each pattern. Bindings live on one stack that is truncated on backtrack,
//! and the rest of the walk after a quantified group is passed down as an
//! explicit continuation.

mod truncation;

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::{eval, eval_predicate, Env, EvalContext, EvalError, FunctionRegistry, Scope};
use crate::ident::{Ident, Key};
use crate::store::{Direction, EdgeTypeId, ElementId, Store};
use crate::syntax::ast::{
    Connector, EdgeDirection, ElementItem, Expr, MatchPattern, MatchStatement, Repetition, Selection,
};
use crate::value::{values_equal, ElementRef, PathValue, Value};

pub use truncation::{truncate_candidates, TruncationPlan};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatchError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Invalid(String),
}

/// Counters collected while matching.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MatchStats {
    /// Candidate edges tried after truncation.
    pub edges_examined: u64,
    /// Partial paths extended by one more node.
    pub states_generated: u64,
    /// Expansions where truncation dropped at least one edge.
    pub truncated_steps: u64,
    /// Largest candidate list followed from a single node.
    pub max_fanout: usize,
    /// Expansions that kept more edges than the truncation specs allow.
    pub bound_violations: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub key: Key,
    /// The identifier as first written.
    pub name: String,
    /// Bound through a property map, as in `{amount: m}`.
    pub binder: bool,
}

/// Named columns, one row per match.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BindingTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Value>>,
}

impl BindingTable {
    /// One empty row: the identity for joins.
    pub fn unit() -> Self {
        BindingTable {
            columns: Vec::new(),
            rows: vec![Vec::new()],
        }
    }

    pub fn column_index(&self, key: &Key) -> Option<usize> {
        self.columns.iter().position(|c| &c.key == key)
    }

    /// Bindings of one row, usable as an evaluation scope.
    pub fn row_scope(&self, row: usize) -> RowScope<'_> {
        RowScope { table: self, row }
    }
}

pub struct RowScope<'t> {
    table: &'t BindingTable,
    row: usize,
}

impl Scope for RowScope<'_> {
    fn lookup(&self, key: &Key) -> Option<Value> {
        self.table
            .column_index(key)
            .map(|i| self.table.rows[self.row][i].clone())
    }
}

/// Matches every item of `stmt` and applies its WHERE clause. The dependent
/// statement is not run.
pub fn match_statement(
    store: &Store,
    functions: &FunctionRegistry,
    stmt: &MatchStatement,
    stats: &mut MatchStats,
) -> Result<BindingTable, MatchError> {
    check_truncation_specs(stmt)?;
    let plan = TruncationPlan::new(store, &stmt.truncation);
    let ctx = EvalContext::new(store, functions);
    let mut table = BindingTable::unit();
    for pattern in &stmt.matches {
        let item = compile_item(store, pattern, &table.columns)?;
        let mut next = BindingTable {
            columns: table.columns.iter().cloned().chain(item.columns.iter().cloned()).collect(),
            rows: Vec::new(),
        };
        for seed in &table.rows {
            let mut walker = Walker {
                ctx: &ctx,
                plan: &plan,
                item: &item,
                vars: table
                    .columns
                    .iter()
                    .zip(seed)
                    .map(|(c, v)| (c.key.clone(), v.clone(), Tag::Single))
                    .collect(),
                elements: Vec::new(),
                spans: Vec::new(),
                found: Vec::new(),
                stats,
            };
            walker.run()?;
            let found = select(item.selection, walker.found);
            next.rows.extend(found.into_iter().map(|m| {
                let mut row = seed.clone();
                row.extend(m.values);
                row
            }));
        }
        table = next;
    }
    if let Some(w) = &stmt.where_clause {
        let mut kept = Vec::with_capacity(table.rows.len());
        for i in 0..table.rows.len() {
            if eval_predicate(w, &ctx, Env::new(&table.row_scope(i)))? {
                kept.push(i);
            }
        }
        let rows = std::mem::take(&mut table.rows);
        table.rows = rows
            .into_iter()
            .enumerate()
            .filter(|(i, _)| kept.binary_search(i).is_ok())
            .map(|(_, r)| r)
            .collect();
    }
    Ok(table)
}

/// At most one unnamed spec and one spec per edge type name.
fn check_truncation_specs(stmt: &MatchStatement) -> Result<(), MatchError> {
    let mut seen: Vec<Option<Key>> = Vec::new();
    for spec in &stmt.truncation {
        let k = spec.edge_type.as_ref().map(Ident::key);
        if seen.contains(&k) {
            return Err(MatchError::Invalid(match &spec.edge_type {
                Some(t) => format!("duplicate truncation spec for {t}"),
                None => "more than one unnamed truncation spec".to_string(),
            }));
        }
        seen.push(k);
    }
    Ok(())
}

// ---- compiled patterns ----

#[derive(Debug)]
enum VarUse {
    None,
    Bind(Key),
    Check(Key),
}

#[derive(Debug)]
enum PropSpec<'q> {
    Bind { name: &'q Ident, key: Key },
    Test { name: &'q Ident, expr: &'q Expr },
}

#[derive(Debug)]
struct ElemSpec<'q> {
    var: VarUse,
    props: Vec<PropSpec<'q>>,
    where_clause: Option<&'q Expr>,
}

#[derive(Debug)]
struct NodeSpec<'q> {
    elem: ElemSpec<'q>,
    /// Indexed by node type id; `None` accepts any node.
    types: Option<Vec<bool>>,
}

#[derive(Debug)]
struct EdgeStep<'q> {
    elem: ElemSpec<'q>,
    direction: Direction,
    /// `None` accepts any edge type.
    types: Option<Vec<EdgeTypeId>>,
}

#[derive(Debug)]
struct Group<'q> {
    inner: Pattern<'q>,
    min: u32,
    max: Option<u32>,
    /// Variables first introduced inside the group; they collect one value
    /// per repetition.
    locals: Vec<Key>,
}

#[derive(Debug)]
enum Step<'q> {
    Edge(EdgeStep<'q>),
    Group(Group<'q>),
}

#[derive(Debug)]
struct Pattern<'q> {
    mode: Repetition,
    start: NodeSpec<'q>,
    steps: Vec<(Step<'q>, NodeSpec<'q>)>,
}

#[derive(Debug)]
struct Item<'q> {
    pattern: Pattern<'q>,
    selection: Selection,
    path_var: Option<Key>,
    /// Columns this item adds, path variable last.
    columns: Vec<Column>,
}

struct Compiler<'s> {
    store: &'s Store,
    known: Vec<Key>,
    columns: Vec<Column>,
    group_locals: Vec<Vec<Key>>,
}

fn compile_item<'q>(store: &Store, p: &'q MatchPattern, bound: &[Column]) -> Result<Item<'q>, MatchError> {
    let mut c = Compiler {
        store,
        known: bound.iter().map(|c| c.key.clone()).collect(),
        columns: Vec::new(),
        group_locals: Vec::new(),
    };
    let path_var = p.path_var.as_ref().map(Ident::key);
    if let Some(k) = &path_var {
        if c.known.contains(k) {
            return Err(MatchError::Invalid(format!("path variable {k} is already bound")));
        }
        c.known.push(k.clone());
    }
    let pattern = c.pattern(p)?;
    let mut columns = c.columns;
    if let (Some(k), Some(name)) = (&path_var, &p.path_var) {
        columns.push(Column {
            key: k.clone(),
            name: name.name.clone(),
            binder: false,
        });
    }
    Ok(Item {
        pattern,
        selection: p.mode.selection,
        path_var,
        columns,
    })
}

impl<'s> Compiler<'s> {
    fn pattern<'q>(&mut self, p: &'q MatchPattern) -> Result<Pattern<'q>, MatchError> {
        let start = self.node(&p.start.item)?;
        let mut steps = Vec::with_capacity(p.steps.len());
        for (connector, node) in &p.steps {
            let step = match connector {
                Connector::Edge(e) => {
                    let direction = match e.direction {
                        EdgeDirection::LeftToRight => Direction::Outgoing,
                        EdgeDirection::RightToLeft => Direction::Incoming,
                    };
                    let types = e.item.label.as_ref().map(|l| self.store.conforming_edge_types(l));
                    Step::Edge(EdgeStep {
                        elem: self.elem(&e.item)?,
                        direction,
                        types,
                    })
                }
                Connector::Path(path) => {
                    let inner = &path.pattern;
                    if inner.path_var.is_some() {
                        return Err(MatchError::Invalid(
                            "a path variable inside a quantified group is not supported".into(),
                        ));
                    }
                    if inner.mode.selection != Selection::Default {
                        return Err(MatchError::Invalid(
                            "a selection mode inside a quantified group is not supported".into(),
                        ));
                    }
                    self.group_locals.push(Vec::new());
                    let compiled = self.pattern(inner);
                    let locals = self.group_locals.pop().unwrap_or_default();
                    Step::Group(Group {
                        inner: compiled?,
                        min: path.quantifier.min,
                        max: path.quantifier.max,
                        locals,
                    })
                }
            };
            steps.push((step, self.node(&node.item)?));
        }
        Ok(Pattern {
            mode: p.mode.repetition,
            start,
            steps,
        })
    }

    fn node<'q>(&mut self, item: &'q ElementItem) -> Result<NodeSpec<'q>, MatchError> {
        let types = item.label.as_ref().map(|l| {
            let mut mask = vec![false; self.store.node_types().count()];
            for t in self.store.conforming_node_types(l) {
                mask[t.0] = true;
            }
            mask
        });
        Ok(NodeSpec {
            elem: self.elem(item)?,
            types,
        })
    }

    fn introduce(&mut self, id: &Ident, binder: bool) -> Key {
        let key = id.key();
        self.known.push(key.clone());
        self.columns.push(Column {
            key: key.clone(),
            name: id.name.clone(),
            binder,
        });
        for locals in &mut self.group_locals {
            locals.push(key.clone());
        }
        key
    }

    fn elem<'q>(&mut self, item: &'q ElementItem) -> Result<ElemSpec<'q>, MatchError> {
        let var = match &item.alias {
            None => VarUse::None,
            Some(a) if self.known.contains(&a.key()) => VarUse::Check(a.key()),
            Some(a) => VarUse::Bind(self.introduce(a, false)),
        };
        let mut props = Vec::with_capacity(item.properties.len());
        for (name, expr) in &item.properties {
            match expr {
                Expr::Ident(id) if !self.known.contains(&id.key()) => props.push(PropSpec::Bind {
                    name,
                    key: self.introduce(id, true),
                }),
                _ => props.push(PropSpec::Test { name, expr }),
            }
        }
        Ok(ElemSpec {
            var,
            props,
            where_clause: item.where_clause.as_ref(),
        })
    }
}

// ---- walking ----

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tag {
    Single,
    /// Values collected over a group's repetitions.
    Acc,
}

/// A stretch of the path a repetition mode applies to.
#[derive(Clone, Copy, Debug)]
struct Span {
    start: usize,
    mode: Repetition,
    /// No edge may repeat inside an unbounded group, whatever the mode.
    guard: bool,
}

/// What happens after the current pattern runs out of steps.
enum Cont<'c, 'q> {
    Done,
    /// The group at `pattern.steps[index]` has finished repeating.
    AfterGroup {
        pattern: &'q Pattern<'q>,
        index: usize,
        parent: &'c Cont<'c, 'q>,
    },
    /// One repetition of `group` has reached its last node.
    RepEnd {
        group: &'q Group<'q>,
        reps: u32,
        elements_start: usize,
        vars_start: usize,
        after: &'c Cont<'c, 'q>,
    },
}

struct Found {
    values: Vec<Value>,
    first: ElementId,
    last: ElementId,
    len: usize,
}

struct Walker<'a, 'q> {
    ctx: &'a EvalContext<'a>,
    plan: &'a TruncationPlan,
    item: &'q Item<'q>,
    vars: Vec<(Key, Value, Tag)>,
    elements: Vec<ElementRef>,
    spans: Vec<Span>,
    found: Vec<Found>,
    stats: &'a mut MatchStats,
}

struct VarScope<'v> {
    vars: &'v [(Key, Value, Tag)],
    path_var: Option<&'v Key>,
}

impl Scope for VarScope<'_> {
    fn lookup(&self, key: &Key) -> Option<Value> {
        self.vars
            .iter()
            .rev()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, _)| v.clone())
    }

    fn path_member(&self, path: &Key, member: &Key) -> Option<Value> {
        if self.path_var == Some(path) {
            // a group variable reads as the values of completed repetitions
            self.vars
                .iter()
                .rev()
                .find(|(k, _, tag)| k == member && *tag == Tag::Acc)
                .map(|(_, v, _)| v.clone())
                .or_else(|| self.lookup(member))
        } else {
            None
        }
    }
}

type Walk = Result<(), MatchError>;

impl<'a, 'q> Walker<'a, 'q> {
    fn scope(&self) -> VarScope<'_> {
        VarScope {
            vars: &self.vars,
            path_var: self.item.path_var.as_ref(),
        }
    }

    fn lookup(&self, key: &Key) -> Option<&Value> {
        self.vars
            .iter()
            .rev()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, _)| v)
    }

    fn run(&mut self) -> Walk {
        let item = self.item;
        let pattern = &item.pattern;
        let starts: Vec<ElementId> = match (&pattern.start.elem.var, &pattern.start.types) {
            (VarUse::Check(k), _) => match self.lookup(k) {
                Some(Value::Node(n)) => vec![*n],
                _ => Vec::new(),
            },
            (_, Some(mask)) => {
                let mut v: Vec<ElementId> = mask
                    .iter()
                    .enumerate()
                    .filter(|(_, &m)| m)
                    .flat_map(|(t, _)| self.ctx.store.nodes_of_type(crate::store::NodeTypeId(t)).iter().copied())
                    .collect();
                v.sort_unstable();
                v
            }
            (_, None) => self.ctx.store.nodes().map(|n| n.id).collect(),
        };
        self.spans.push(Span {
            start: 0,
            mode: pattern.mode,
            guard: false,
        });
        for n in starts {
            let mark = self.vars.len();
            if self.node_matches(&pattern.start, n)? {
                self.stats.states_generated += 1;
                self.elements.push(ElementRef::Node(n));
                self.steps(pattern, 0, n, &Cont::Done)?;
                self.elements.pop();
            }
            self.vars.truncate(mark);
        }
        self.spans.pop();
        Ok(())
    }

    fn steps(&mut self, pattern: &'q Pattern<'q>, index: usize, cur: ElementId, cont: &Cont<'_, 'q>) -> Walk {
        let Some((step, next)) = pattern.steps.get(index) else {
            return self.resume(cont, cur);
        };
        match step {
            Step::Edge(edge) => self.edge_step(pattern, index, edge, next, cur, cont),
            Step::Group(group) => {
                let mark = self.vars.len();
                for k in &group.locals {
                    self.vars.push((k.clone(), Value::Array(Vec::new()), Tag::Acc));
                }
                self.spans.push(Span {
                    start: self.elements.len() - 1,
                    mode: group.inner.mode,
                    guard: group.max.is_none(),
                });
                let after = Cont::AfterGroup {
                    pattern,
                    index,
                    parent: cont,
                };
                let r = self.repeat(group, 0, cur, &after);
                self.spans.pop();
                self.vars.truncate(mark);
                r
            }
        }
    }

    fn repeat(&mut self, group: &'q Group<'q>, reps: u32, cur: ElementId, after: &Cont<'_, 'q>) -> Walk {
        if reps >= group.min {
            self.resume(after, cur)?;
        }
        if group.max.is_some_and(|m| reps >= m) {
            return Ok(());
        }
        let mark = self.vars.len();
        if self.node_matches(&group.inner.start, cur)? {
            let cont = Cont::RepEnd {
                group,
                reps,
                elements_start: self.elements.len(),
                vars_start: mark,
                after,
            };
            self.steps(&group.inner, 0, cur, &cont)?;
        }
        self.vars.truncate(mark);
        Ok(())
    }

    fn resume(&mut self, cont: &Cont<'_, 'q>, cur: ElementId) -> Walk {
        match cont {
            Cont::Done => {
                self.emit(cur);
                Ok(())
            }
            Cont::AfterGroup { pattern, index, parent } => {
                let span = self.spans.pop();
                let mark = self.vars.len();
                let r = match self.node_matches(&pattern.steps[*index].1, cur) {
                    Ok(true) => self.steps(pattern, index + 1, cur, parent),
                    Ok(false) => Ok(()),
                    Err(e) => Err(e),
                };
                self.vars.truncate(mark);
                self.spans.extend(span);
                r
            }
            Cont::RepEnd {
                group,
                reps,
                elements_start,
                vars_start,
                after,
            } => {
                // a repetition that matched no edge cannot make progress
                if self.elements.len() == *elements_start {
                    return Ok(());
                }
                let mark = self.vars.len();
                for k in &group.locals {
                    let mut acc = match self.vars[..*vars_start]
                        .iter()
                        .rev()
                        .find(|(key, _, tag)| key == k && *tag == Tag::Acc)
                    {
                        Some((_, Value::Array(items), _)) => items.clone(),
                        _ => Vec::new(),
                    };
                    match self.vars[*vars_start..].iter().rev().find(|(key, _, _)| key == k) {
                        Some((_, Value::Array(items), Tag::Acc)) => acc.extend(items.iter().cloned()),
                        Some((_, v, _)) => acc.push(v.clone()),
                        None => {}
                    }
                    self.vars.push((k.clone(), Value::Array(acc), Tag::Acc));
                }
                let r = self.repeat(group, reps + 1, cur, after);
                self.vars.truncate(mark);
                r
            }
        }
    }

    fn edge_step(
        &mut self,
        pattern: &'q Pattern<'q>,
        index: usize,
        edge: &'q EdgeStep<'q>,
        next: &'q NodeSpec<'q>,
        cur: ElementId,
        cont: &Cont<'_, 'q>,
    ) -> Walk {
        let store = self.ctx.store;
        let mut candidates = Vec::new();
        if edge.types.as_ref().is_none_or(|t| !t.is_empty()) {
            store
                .collect_edges(cur, edge.direction, edge.types.as_deref(), &mut candidates)
                .map_err(|e| MatchError::Invalid(e.to_string()))?;
        }
        if !self.plan.is_empty() && !candidates.is_empty() {
            let before = candidates.len();
            let bound = self.plan.bound(store, &candidates);
            let scope = self.scope();
            self.plan.apply(self.ctx, &scope, &mut candidates)?;
            if candidates.len() < before {
                self.stats.truncated_steps += 1;
            }
            if candidates.len() > bound {
                self.stats.bound_violations += 1;
            }
        }
        self.stats.max_fanout = self.stats.max_fanout.max(candidates.len());
        for e in candidates {
            self.stats.edges_examined += 1;
            if !self.edge_allowed(e) {
                continue;
            }
            let mark = self.vars.len();
            if self.elem_matches(&edge.elem, Value::Edge(e), e)? {
                let far = store.edge(e).map(|x| x.far_end(edge.direction)).unwrap_or_default();
                self.elements.push(ElementRef::Edge(e));
                if self.node_allowed(far) && self.node_matches(next, far)? {
                    self.stats.states_generated += 1;
                    self.elements.push(ElementRef::Node(far));
                    let r = self.steps(pattern, index + 1, far, cont);
                    self.elements.pop();
                    r?;
                }
                self.elements.pop();
            }
            self.vars.truncate(mark);
        }
        Ok(())
    }

    fn closed(&self, span: &Span) -> bool {
        let tail = &self.elements[span.start..];
        tail.len() > 1 && tail.first() == tail.last()
    }

    fn edge_allowed(&self, e: ElementId) -> bool {
        let probe = ElementRef::Edge(e);
        self.spans.iter().all(|span| {
            if (span.mode == Repetition::Trail || span.guard) && self.elements[span.start..].contains(&probe) {
                return false;
            }
            !(span.mode == Repetition::Simple && self.closed(span))
        })
    }

    /// Checked after the edge leading to `n` has been pushed.
    fn node_allowed(&self, n: ElementId) -> bool {
        let probe = ElementRef::Node(n);
        self.spans.iter().all(|span| match span.mode {
            Repetition::Acyclic => !self.elements[span.start..].contains(&probe),
            Repetition::Simple => {
                let tail = &self.elements[span.start..];
                // the last element is the edge just pushed
                let before = &tail[..tail.len() - 1];
                let closed = before.len() > 1 && before.first() == before.last();
                !closed && (!before.contains(&probe) || before.first() == Some(&probe))
            }
            _ => true,
        })
    }

    fn node_matches(&mut self, spec: &NodeSpec<'q>, n: ElementId) -> Result<bool, MatchError> {
        if let Some(mask) = &spec.types {
            let Some(node) = self.ctx.store.node(n) else { return Ok(false) };
            if !mask[node.node_type.0] {
                return Ok(false);
            }
        }
        self.elem_matches(&spec.elem, Value::Node(n), n)
    }

    /// Binds or checks the alias, then the property map, then WHERE. Pushes
    /// bindings; the caller truncates.
    fn elem_matches(&mut self, spec: &ElemSpec<'q>, value: Value, id: ElementId) -> Result<bool, MatchError> {
        match &spec.var {
            VarUse::None => {}
            VarUse::Check(k) => {
                if !self.lookup(k).is_some_and(|v| values_equal(v, &value)) {
                    return Ok(false);
                }
            }
            VarUse::Bind(k) => self.vars.push((k.clone(), value, Tag::Single)),
        }
        let store = self.ctx.store;
        let props = store.properties(id);
        for p in &spec.props {
            match p {
                PropSpec::Bind { name, key } => {
                    match props.and_then(|ps| crate::store::property(ps, name)) {
                        Some(v) if !v.is_null() => self.vars.push((key.clone(), v.clone(), Tag::Single)),
                        _ => return Ok(false),
                    }
                }
                PropSpec::Test { name, expr } => {
                    let want = eval(expr, self.ctx, Env::with_ambient(&self.scope(), id))?;
                    match props.and_then(|ps| crate::store::property(ps, name)) {
                        Some(have) if values_equal(have, &want) => {}
                        _ => return Ok(false),
                    }
                }
            }
        }
        if let Some(w) = spec.where_clause {
            if !eval_predicate(w, self.ctx, Env::with_ambient(&self.scope(), id))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn emit(&mut self, last: ElementId) {
        let mut values = Vec::with_capacity(self.item.columns.len());
        let mut members = Vec::new();
        for col in &self.item.columns {
            if Some(&col.key) == self.item.path_var.as_ref() {
                values.push(Value::Path(Arc::new(PathValue {
                    elements: self.elements.clone(),
                    members: std::mem::take(&mut members),
                })));
            } else {
                let v = self.lookup(&col.key).cloned().unwrap_or(Value::Null);
                members.push((col.key.clone(), v.clone()));
                values.push(v);
            }
        }
        self.found.push(Found {
            values,
            first: self.elements.first().map(|e| e.id()).unwrap_or(last),
            last,
            len: self.elements.len(),
        });
    }
}

fn select(selection: Selection, found: Vec<Found>) -> Vec<Found> {
    match selection {
        Selection::Default | Selection::All => found,
        Selection::Any => found.into_iter().take(1).collect(),
        Selection::Shortest => {
            let mut best: HashMap<(ElementId, ElementId), usize> = HashMap::new();
            for f in &found {
                best.entry((f.first, f.last))
                    .and_modify(|b| *b = (*b).min(f.len))
                    .or_insert(f.len);
            }
            found
                .into_iter()
                .filter(|f| best[&(f.first, f.last)] == f.len)
                .collect()
        }
    }
}

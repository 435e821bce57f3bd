//! Expression evaluation and the host-function registry.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rust_decimal::Decimal;
use thiserror::Error;

use crate::ident::{Ident, Key};
use crate::store::{property, ElementId, Store};
use crate::syntax::ast::{is_aggregate, BinaryOp, Expr, Literal, UnaryOp};
use crate::value::{compare, ElementRef, Value};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("type error: {0}")]
    TypeError(String),
    #[error("unbound identifier {0}")]
    UnboundIdentifier(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("unknown function {0}")]
    UnknownFunction(String),
    #[error("function {name} takes {expected} argument(s), got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("aggregate {0} is only allowed in RETURN")]
    MisplacedAggregate(String),
}

fn type_error<T>(msg: impl Into<String>) -> Result<T, EvalError> {
    Err(EvalError::TypeError(msg.into()))
}

/// Read access to bound identifiers.
pub trait Scope {
    fn lookup(&self, key: &Key) -> Option<Value>;

    /// `path.member` for a path that is still being matched; `None` defers
    /// to ordinary evaluation of the path value.
    fn path_member(&self, _path: &Key, _member: &Key) -> Option<Value> {
        None
    }
}

/// Ordered frames of bindings; later frames shadow earlier ones.
#[derive(Clone, Debug, Default)]
pub struct Environment {
    frames: Vec<Vec<(Key, Value)>>,
}

impl Environment {
    pub fn new() -> Self {
        Environment { frames: vec![Vec::new()] }
    }

    pub fn push_frame(&mut self) {
        self.frames.push(Vec::new());
    }

    pub fn pop_frame(&mut self) {
        self.frames.pop();
    }

    pub fn bind(&mut self, name: &str, value: Value) {
        self.bind_key(Ident::plain(name).key(), value);
    }

    pub fn bind_key(&mut self, key: Key, value: Value) {
        if self.frames.is_empty() {
            self.frames.push(Vec::new());
        }
        self.frames.last_mut().unwrap().push((key, value));
    }
}

impl Scope for Environment {
    fn lookup(&self, key: &Key) -> Option<Value> {
        self.frames
            .iter()
            .rev()
            .flat_map(|f| f.iter().rev())
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
    }
}

/// A scope with no bindings.
pub struct EmptyScope;

impl Scope for EmptyScope {
    fn lookup(&self, _key: &Key) -> Option<Value> {
        None
    }
}

pub type HostFn = fn(&[Value], &EvalContext<'_>) -> Result<Value, EvalError>;

#[derive(Clone)]
struct Function {
    arity: usize,
    body: HostFn,
}

/// Case-insensitive function name → host implementation.
#[derive(Clone)]
pub struct FunctionRegistry {
    functions: BTreeMap<String, Function>,
}

impl fmt::Debug for FunctionRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.functions.keys()).finish()
    }
}

impl Default for FunctionRegistry {
    fn default() -> Self {
        let mut r = FunctionRegistry::empty();
        r.register("cardinality", 1, builtin_cardinality);
        r.register("later", 2, builtin_later);
        r
    }
}

impl FunctionRegistry {
    pub fn empty() -> Self {
        FunctionRegistry {
            functions: BTreeMap::new(),
        }
    }

    /// Adds or replaces a function. Registries are frozen once handed to a
    /// database.
    pub fn register(&mut self, name: &str, arity: usize, body: HostFn) {
        self.functions.insert(name.to_lowercase(), Function { arity, body });
    }

    pub fn contains(&self, name: &str) -> bool {
        self.functions.contains_key(&name.to_lowercase())
    }

    fn get(&self, name: &Ident) -> Option<&Function> {
        self.functions.get(&name.name.to_lowercase())
    }
}

/// Everything evaluation reads besides bindings.
pub struct EvalContext<'a> {
    pub store: &'a Store,
    pub functions: &'a FunctionRegistry,
    /// Precomputed aggregate results keyed by the address of their call node.
    pub aggregates: Option<&'a HashMap<usize, Value>>,
}

impl<'a> EvalContext<'a> {
    pub fn new(store: &'a Store, functions: &'a FunctionRegistry) -> Self {
        EvalContext {
            store,
            functions,
            aggregates: None,
        }
    }
}

/// Bindings plus the pattern element whose properties are in scope unqualified.
#[derive(Clone, Copy)]
pub struct Env<'s> {
    pub scope: &'s dyn Scope,
    pub ambient: Option<ElementId>,
}

impl<'s> Env<'s> {
    pub fn new(scope: &'s dyn Scope) -> Self {
        Env { scope, ambient: None }
    }

    pub fn with_ambient(scope: &'s dyn Scope, element: ElementId) -> Self {
        Env {
            scope,
            ambient: Some(element),
        }
    }
}

pub fn expr_address(e: &Expr) -> usize {
    e as *const Expr as usize
}

pub fn eval(expr: &Expr, ctx: &EvalContext<'_>, env: Env<'_>) -> Result<Value, EvalError> {
    match expr {
        Expr::Literal(l) => Ok(literal_value(l)),
        Expr::Ident(id) => {
            if let Some(v) = env.scope.lookup(&id.key()) {
                return Ok(v);
            }
            if let Some(el) = env.ambient {
                if let Some(props) = ctx.store.properties(el) {
                    return Ok(property(props, id).cloned().unwrap_or(Value::Null));
                }
            }
            Err(EvalError::UnboundIdentifier(id.name.clone()))
        }
        Expr::Property(base, name) => {
            if let Expr::Ident(p) = base.as_ref() {
                if let Some(v) = env.scope.path_member(&p.key(), &name.key()) {
                    return Ok(v);
                }
            }
            let b = eval(base, ctx, env)?;
            property_of(&b, name, ctx.store)
        }
        Expr::Index(base, index) => {
            let b = eval(base, ctx, env)?;
            let i = eval(index, ctx, env)?;
            index_of(&b, &i)
        }
        Expr::Call(name, args) => {
            if is_aggregate(name) {
                return ctx
                    .aggregates
                    .and_then(|m| m.get(&expr_address(expr)))
                    .cloned()
                    .ok_or_else(|| EvalError::MisplacedAggregate(name.name.clone()));
            }
            let f = ctx
                .functions
                .get(name)
                .ok_or_else(|| EvalError::UnknownFunction(name.name.clone()))?;
            if f.arity != args.len() {
                return Err(EvalError::Arity {
                    name: name.name.clone(),
                    expected: f.arity,
                    got: args.len(),
                });
            }
            let values = args
                .iter()
                .map(|a| eval(a, ctx, env))
                .collect::<Result<Vec<_>, _>>()?;
            (f.body)(&values, ctx)
        }
        Expr::Star => type_error("* is only valid in count(*)"),
        Expr::Tuple(items) => Ok(Value::Array(
            items
                .iter()
                .map(|a| eval(a, ctx, env))
                .collect::<Result<Vec<_>, _>>()?,
        )),
        Expr::Unary(UnaryOp::Not, inner) => match eval(inner, ctx, env)? {
            Value::Bool(b) => Ok(Value::Bool(!b)),
            Value::Null => Ok(Value::Null),
            other => type_error(format!("NOT applied to {}", other.kind())),
        },
        Expr::Unary(UnaryOp::Neg, inner) => match eval(inner, ctx, env)? {
            Value::Int(i) => i
                .checked_neg()
                .map(Value::Int)
                .ok_or_else(|| EvalError::TypeError("integer overflow".into())),
            Value::Decimal(d) => Ok(Value::Decimal(-d)),
            Value::Null => Ok(Value::Null),
            other => type_error(format!("cannot negate {}", other.kind())),
        },
        Expr::Binary(BinaryOp::And, l, r) => {
            let a = truth(eval(l, ctx, env)?)?;
            if a == Some(false) {
                return Ok(Value::Bool(false));
            }
            let b = truth(eval(r, ctx, env)?)?;
            Ok(match (a, b) {
                (_, Some(false)) => Value::Bool(false),
                (Some(true), Some(true)) => Value::Bool(true),
                _ => Value::Null,
            })
        }
        Expr::Binary(BinaryOp::Or, l, r) => {
            let a = truth(eval(l, ctx, env)?)?;
            if a == Some(true) {
                return Ok(Value::Bool(true));
            }
            let b = truth(eval(r, ctx, env)?)?;
            Ok(match (a, b) {
                (_, Some(true)) => Value::Bool(true),
                (Some(false), Some(false)) => Value::Bool(false),
                _ => Value::Null,
            })
        }
        Expr::Binary(op, l, r) => {
            let a = eval(l, ctx, env)?;
            let b = eval(r, ctx, env)?;
            if op.is_comparison() {
                compare_op(*op, &a, &b).map(Value::Bool)
            } else {
                arithmetic(*op, &a, &b)
            }
        }
    }
}

/// Evaluates a predicate: only `TRUE` passes.
pub fn eval_predicate(expr: &Expr, ctx: &EvalContext<'_>, env: Env<'_>) -> Result<bool, EvalError> {
    match eval(expr, ctx, env)? {
        Value::Bool(b) => Ok(b),
        Value::Null => Ok(false),
        other => type_error(format!("predicate evaluated to {}", other.kind())),
    }
}

pub fn literal_value(l: &Literal) -> Value {
    match l {
        Literal::Int(i) => Value::Int(*i),
        Literal::Decimal(d) => Value::Decimal(*d),
        Literal::Bool(b) => Value::Bool(*b),
        Literal::Text(s) => Value::Text(s.clone()),
        Literal::Timestamp(t) => Value::Timestamp(*t),
    }
}

fn truth(v: Value) -> Result<Option<bool>, EvalError> {
    match v {
        Value::Bool(b) => Ok(Some(b)),
        Value::Null => Ok(None),
        other => type_error(format!("expected boolean, found {}", other.kind())),
    }
}

/// Comparison operators. Any comparison with null is false; comparing
/// incompatible kinds is a type error.
pub fn compare_op(op: BinaryOp, a: &Value, b: &Value) -> Result<bool, EvalError> {
    if a.is_null() || b.is_null() {
        return Ok(false);
    }
    let Some(ord) = compare(a, b) else {
        return type_error(format!("cannot compare {} with {}", a.kind(), b.kind()));
    };
    Ok(match op {
        BinaryOp::Eq => ord == Ordering::Equal,
        BinaryOp::Ne => ord != Ordering::Equal,
        BinaryOp::Lt => ord == Ordering::Less,
        BinaryOp::Le => ord != Ordering::Greater,
        BinaryOp::Gt => ord == Ordering::Greater,
        BinaryOp::Ge => ord != Ordering::Less,
        _ => unreachable!("not a comparison"),
    })
}

fn arithmetic(op: BinaryOp, a: &Value, b: &Value) -> Result<Value, EvalError> {
    match (a, b) {
        (Value::Null, _) | (_, Value::Null) => Ok(Value::Null),
        (Value::Int(x), Value::Int(y)) => {
            let r = match op {
                BinaryOp::Add => x.checked_add(*y),
                BinaryOp::Sub => x.checked_sub(*y),
                BinaryOp::Mul => x.checked_mul(*y),
                BinaryOp::Div => {
                    if *y == 0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    x.checked_div(*y)
                }
                _ => unreachable!(),
            };
            r.map(Value::Int)
                .ok_or_else(|| EvalError::TypeError("integer overflow".into()))
        }
        (Value::Int(_) | Value::Decimal(_), Value::Int(_) | Value::Decimal(_)) => {
            let x = as_decimal(a);
            let y = as_decimal(b);
            let r = match op {
                BinaryOp::Add => x.checked_add(y),
                BinaryOp::Sub => x.checked_sub(y),
                BinaryOp::Mul => x.checked_mul(y),
                BinaryOp::Div => {
                    if y.is_zero() {
                        return Err(EvalError::DivisionByZero);
                    }
                    x.checked_div(y)
                }
                _ => unreachable!(),
            };
            r.map(|d| Value::Decimal(d.normalize()))
                .ok_or_else(|| EvalError::TypeError("decimal overflow".into()))
        }
        _ => type_error(format!(
            "operator {} not defined for {} and {}",
            op.symbol(),
            a.kind(),
            b.kind()
        )),
    }
}

fn as_decimal(v: &Value) -> Decimal {
    match v {
        Value::Int(i) => Decimal::from(*i),
        Value::Decimal(d) => *d,
        _ => Decimal::ZERO,
    }
}

/// `base.name`: a property of a node or edge (missing → null) or a member
/// binding of a path.
pub fn property_of(base: &Value, name: &Ident, store: &Store) -> Result<Value, EvalError> {
    match base {
        Value::Node(id) | Value::Edge(id) => {
            let props = store
                .properties(*id)
                .ok_or_else(|| EvalError::TypeError(format!("element {id} does not exist")))?;
            Ok(property(props, name).cloned().unwrap_or(Value::Null))
        }
        Value::Path(p) => p
            .member(&name.key())
            .cloned()
            .ok_or_else(|| EvalError::TypeError(format!("path has no member {}", name.name))),
        Value::Null => Ok(Value::Null),
        other => type_error(format!("{} has no property {}", other.kind(), name.name)),
    }
}

/// `base[i]`, 0-based; out of range is null.
pub fn index_of(base: &Value, index: &Value) -> Result<Value, EvalError> {
    let i = match index {
        Value::Int(i) => *i,
        Value::Null => return Ok(Value::Null),
        other => return type_error(format!("index must be an integer, found {}", other.kind())),
    };
    let Ok(i) = usize::try_from(i) else {
        return Ok(Value::Null);
    };
    match base {
        Value::Array(items) => Ok(items.get(i).cloned().unwrap_or(Value::Null)),
        Value::Path(p) => Ok(p.elements.get(i).map(|e| e.to_value()).unwrap_or(Value::Null)),
        Value::Null => Ok(Value::Null),
        other => type_error(format!("cannot index {}", other.kind())),
    }
}

fn builtin_cardinality(args: &[Value], _ctx: &EvalContext<'_>) -> Result<Value, EvalError> {
    match &args[0] {
        Value::Path(p) => Ok(Value::Int(p.cardinality() as i64)),
        Value::Array(a) => Ok(Value::Int(a.len() as i64)),
        Value::Null => Ok(Value::Null),
        other => type_error(format!("cardinality of {}", other.kind())),
    }
}

fn builtin_later(args: &[Value], ctx: &EvalContext<'_>) -> Result<Value, EvalError> {
    let items = match &args[0] {
        Value::Array(items) => items.as_slice(),
        other => return type_error(format!("later expects an array, found {}", other.kind())),
    };
    call_builtin_later(items, &args[1], ctx.store).map(Value::Bool)
}

/// True when `edges` is empty or the `timestamp` property of its last
/// element is strictly earlier than `t`.
pub fn call_builtin_later(edges: &[Value], t: &Value, store: &Store) -> Result<bool, EvalError> {
    let Some(last) = edges.last() else {
        return Ok(true);
    };
    let ts = match last {
        Value::Edge(id) | Value::Node(id) => store
            .properties(*id)
            .and_then(|p| p.get("timestamp"))
            .cloned(),
        _ => None,
    };
    match ts {
        Some(ts) if !ts.is_null() => compare_op(BinaryOp::Lt, &ts, t),
        _ => type_error("last element of the array has no timestamp"),
    }
}

/// Path elements as values, for `p[i]`.
pub fn path_values(elements: &[ElementRef]) -> Vec<Value> {
    elements.iter().map(|e| e.to_value()).collect()
}

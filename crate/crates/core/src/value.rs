//! The property value model and its ordering rules.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use chrono::{NaiveDate, NaiveDateTime};
use rust_decimal::Decimal;

use crate::ident::Key;
use crate::store::ElementId;

/// A node or edge reference, as it appears in a path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementRef {
    Node(ElementId),
    Edge(ElementId),
}

impl ElementRef {
    pub fn id(self) -> ElementId {
        match self {
            ElementRef::Node(id) | ElementRef::Edge(id) => id,
        }
    }

    pub fn to_value(self) -> Value {
        match self {
            ElementRef::Node(id) => Value::Node(id),
            ElementRef::Edge(id) => Value::Edge(id),
        }
    }
}

/// Alternating node/edge sequence bound to a path identifier.
///
/// `members` holds the bindings made while the path was traversed, so that
/// `p.x` can read the array accumulated for `x`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PathValue {
    pub elements: Vec<ElementRef>,
    pub members: Vec<(Key, Value)>,
}

impl PathValue {
    pub fn cardinality(&self) -> usize {
        self.elements.len()
    }

    pub fn edge_count(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| matches!(e, ElementRef::Edge(_)))
            .count()
    }

    pub fn first_node(&self) -> Option<ElementId> {
        self.elements.first().map(|e| e.id())
    }

    pub fn last_node(&self) -> Option<ElementId> {
        self.elements.last().map(|e| e.id())
    }

    pub fn member(&self, key: &Key) -> Option<&Value> {
        self.members.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ValueKind {
    Null,
    Int,
    Decimal,
    Bool,
    Text,
    Timestamp,
    Array,
    Node,
    Edge,
    Path,
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ValueKind::Null => "null",
            ValueKind::Int => "int",
            ValueKind::Decimal => "decimal",
            ValueKind::Bool => "bool",
            ValueKind::Text => "text",
            ValueKind::Timestamp => "timestamp",
            ValueKind::Array => "array",
            ValueKind::Node => "node",
            ValueKind::Edge => "edge",
            ValueKind::Path => "path",
        };
        f.write_str(s)
    }
}

/// A property value or a binding-table cell.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum Value {
    #[default]
    Null,
    Int(i64),
    Decimal(Decimal),
    Bool(bool),
    Text(String),
    Timestamp(NaiveDateTime),
    Array(Vec<Value>),
    Node(ElementId),
    Edge(ElementId),
    Path(Arc<PathValue>),
}

impl Value {
    pub fn kind(&self) -> ValueKind {
        match self {
            Value::Null => ValueKind::Null,
            Value::Int(_) => ValueKind::Int,
            Value::Decimal(_) => ValueKind::Decimal,
            Value::Bool(_) => ValueKind::Bool,
            Value::Text(_) => ValueKind::Text,
            Value::Timestamp(_) => ValueKind::Timestamp,
            Value::Array(_) => ValueKind::Array,
            Value::Node(_) => ValueKind::Node,
            Value::Edge(_) => ValueKind::Edge,
            Value::Path(_) => ValueKind::Path,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    /// Parses an exact decimal such as `2977613.82`.
    pub fn decimal(s: &str) -> Option<Self> {
        Decimal::from_str(s).ok().map(Value::Decimal)
    }

    /// Parses `YYYY-MM-DD`, `YYYY-MM-DD HH:MM:SS` or the `T`-separated form.
    pub fn timestamp(s: &str) -> Option<Self> {
        parse_timestamp(s).map(Value::Timestamp)
    }

    /// Comparison family: values in the same family are mutually comparable.
    fn family(&self) -> Option<u8> {
        match self {
            Value::Int(_) | Value::Decimal(_) => Some(0),
            Value::Bool(_) => Some(1),
            Value::Text(_) => Some(2),
            Value::Timestamp(_) => Some(3),
            Value::Array(_) => Some(4),
            Value::Node(_) => Some(5),
            Value::Edge(_) => Some(6),
            Value::Null | Value::Path(_) => None,
        }
    }

    /// True when `self` and `other` can be ordered against each other.
    pub fn comparable_with(&self, other: &Value) -> bool {
        compare(self, other).is_some()
    }

    /// Text used in tab-separated output and for canonical display.
    pub fn to_iso_string(&self) -> String {
        match self {
            Value::Timestamp(t) => t.format("%Y-%m-%dT%H:%M:%S").to_string(),
            other => other.to_string(),
        }
    }
}

pub(crate) fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim();
    for fmt in ["%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M", "%Y-%m-%dT%H:%M"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(t);
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
}

fn to_decimal(v: &Value) -> Option<Decimal> {
    match v {
        Value::Int(i) => Some(Decimal::from(*i)),
        Value::Decimal(d) => Some(*d),
        _ => None,
    }
}

/// Orders two values; `None` means incomparable (cross-kind or null).
///
/// Integers and decimals share one numeric order. Text compares by code
/// point, timestamps chronologically, booleans with `false < true`.
pub fn compare(a: &Value, b: &Value) -> Option<Ordering> {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => Some(x.cmp(y)),
        (Value::Int(_) | Value::Decimal(_), Value::Int(_) | Value::Decimal(_)) => {
            Some(to_decimal(a)?.cmp(&to_decimal(b)?))
        }
        (Value::Bool(x), Value::Bool(y)) => Some(x.cmp(y)),
        (Value::Text(x), Value::Text(y)) => Some(x.cmp(y)),
        (Value::Timestamp(x), Value::Timestamp(y)) => Some(x.cmp(y)),
        (Value::Node(x), Value::Node(y)) | (Value::Edge(x), Value::Edge(y)) => Some(x.cmp(y)),
        (Value::Array(xs), Value::Array(ys)) => {
            for (x, y) in xs.iter().zip(ys) {
                match compare(x, y)? {
                    Ordering::Equal => continue,
                    other => return Some(other),
                }
            }
            Some(xs.len().cmp(&ys.len()))
        }
        _ => None,
    }
}

/// Equality used by pattern property tests: incomparable values are unequal.
pub fn values_equal(a: &Value, b: &Value) -> bool {
    compare(a, b) == Some(Ordering::Equal)
}

/// Total order used for sort keys: values of the key's dominant family first
/// (in their natural order), then everything else as one tied class.
///
/// The dominant family is that of the first non-null value in `column`.
pub fn dominant_family(column: impl IntoIterator<Item = Value>) -> Option<u8> {
    column.into_iter().find_map(|v| v.family())
}

pub(crate) fn key_rank(v: &Value, family: Option<u8>) -> bool {
    family.is_some() && v.family() == family
}

/// Compares two sort-key cells given the dominant family of their column.
/// Comparable cells order before incomparable ones; `descending` only flips
/// the comparable part.
pub fn compare_sort_cells(a: &Value, b: &Value, family: Option<u8>, descending: bool) -> Ordering {
    match (key_rank(a, family), key_rank(b, family)) {
        (true, true) => {
            let ord = compare(a, b).unwrap_or(Ordering::Equal);
            if descending {
                ord.reverse()
            } else {
                ord
            }
        }
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => Ordering::Equal,
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("null"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Decimal(d) => write!(f, "{d}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Text(s) => f.write_str(s),
            Value::Timestamp(t) => write!(f, "{}", t.format("%Y-%m-%d %H:%M:%S")),
            Value::Array(items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
            Value::Node(id) => write!(f, "({id})"),
            Value::Edge(id) => write!(f, "[{id}]"),
            Value::Path(p) => {
                for e in &p.elements {
                    match e {
                        ElementRef::Node(id) => write!(f, "({id})")?,
                        ElementRef::Edge(id) => write!(f, "-[{id}]-")?,
                    }
                }
                Ok(())
            }
        }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<Decimal> for Value {
    fn from(v: Decimal) -> Self {
        Value::Decimal(v)
    }
}

impl From<NaiveDateTime> for Value {
    fn from(v: NaiveDateTime) -> Self {
        Value::Timestamp(v)
    }
}

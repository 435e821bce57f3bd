//! Statement and expression trees.
//!
//! Source positions are not stored, so structural equality is exactly the
//! round-trip equality the pretty-printer guarantees.

use chrono::NaiveDateTime;
use rust_decimal::Decimal;

use crate::ident::Ident;

#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    Match(MatchStatement),
    Create(CreateStatement),
}

/// `MATCH [Truncation] Match {',' Match} [WHERE expr] [dependent]`
#[derive(Clone, Debug, PartialEq, Default)]
pub struct MatchStatement {
    pub truncation: Vec<TruncationSpec>,
    pub matches: Vec<MatchPattern>,
    pub where_clause: Option<Expr>,
    pub dependent: Option<Box<Dependent>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Dependent {
    Return(ReturnClause),
    Create(CreateStatement),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncationSpec {
    pub edge_type: Option<Ident>,
    pub order: Vec<OrderKey>,
    pub limit: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SortDirection {
    #[default]
    Asc,
    Desc,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderKey {
    pub expr: Expr,
    pub direction: SortDirection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Repetition {
    #[default]
    Default,
    Trail,
    Acyclic,
    Simple,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Selection {
    #[default]
    Default,
    All,
    Any,
    Shortest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct MatchMode {
    pub repetition: Repetition,
    pub selection: Selection,
}

/// One comma-separated item: `MatchMode [id '='] MatchNode`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchPattern {
    pub mode: MatchMode,
    pub path_var: Option<Ident>,
    pub start: NodePattern,
    pub steps: Vec<(Connector, NodePattern)>,
}

/// What sits between two node patterns.
#[derive(Clone, Debug, PartialEq)]
pub enum Connector {
    Edge(EdgePattern),
    Path(Box<PathPattern>),
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ElementItem {
    pub alias: Option<Ident>,
    pub label: Option<Ident>,
    pub properties: Vec<(Ident, Expr)>,
    pub where_clause: Option<Expr>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct NodePattern {
    pub item: ElementItem,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeDirection {
    /// `-[ ]->`
    LeftToRight,
    /// `<-[ ]-`
    RightToLeft,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgePattern {
    pub item: ElementItem,
    pub direction: EdgeDirection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Quantifier {
    pub min: u32,
    /// `None` is unbounded.
    pub max: Option<u32>,
}

impl Quantifier {
    pub const OPTIONAL: Quantifier = Quantifier { min: 0, max: Some(1) };
    pub const PLUS: Quantifier = Quantifier { min: 1, max: None };
    pub const STAR: Quantifier = Quantifier { min: 0, max: None };
}

/// `'[' Match ']' MatchQuantifier`
#[derive(Clone, Debug, PartialEq)]
pub struct PathPattern {
    pub pattern: MatchPattern,
    pub quantifier: Quantifier,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CreateStatement {
    pub patterns: Vec<CreatePattern>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CreatePattern {
    pub start: NodePattern,
    pub steps: Vec<(EdgePattern, NodePattern)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReturnClause {
    pub projections: Vec<Projection>,
    pub order_by: Vec<OrderKey>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub expr: Expr,
    pub alias: Option<Ident>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Literal {
    Int(i64),
    Decimal(Decimal),
    Bool(bool),
    Text(String),
    Timestamp(NaiveDateTime),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::Ne | BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
            BinaryOp::Mul | BinaryOp::Div => 6,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Or => "OR",
            BinaryOp::And => "AND",
            BinaryOp::Eq => "=",
            BinaryOp::Ne => "<>",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 4
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Literal(Literal),
    Ident(Ident),
    Property(Box<Expr>, Ident),
    Index(Box<Expr>, Box<Expr>),
    Call(Ident, Vec<Expr>),
    /// `*` as in `count(*)`.
    Star,
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    /// Parenthesized list of two or more expressions.
    Tuple(Vec<Expr>),
}

impl Expr {
    pub fn ident(name: &str) -> Expr {
        Expr::Ident(Ident::plain(name))
    }

    pub fn binary(op: BinaryOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    /// True if this expression contains an aggregate call.
    pub fn has_aggregate(&self) -> bool {
        match self {
            Expr::Call(name, args) => is_aggregate(name) || args.iter().any(Expr::has_aggregate),
            Expr::Property(e, _) | Expr::Unary(_, e) => e.has_aggregate(),
            Expr::Index(a, b) | Expr::Binary(_, a, b) => a.has_aggregate() || b.has_aggregate(),
            Expr::Tuple(items) => items.iter().any(Expr::has_aggregate),
            Expr::Literal(_) | Expr::Ident(_) | Expr::Star => false,
        }
    }
}

pub const AGGREGATES: [&str; 5] = ["count", "sum", "min", "max", "avg"];

pub fn is_aggregate(name: &Ident) -> bool {
    AGGREGATES.iter().any(|a| name.matches(a))
}

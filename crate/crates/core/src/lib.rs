//! A property-graph query engine with edge truncation, quantified path
//! patterns and path modes.

pub mod exec;
pub mod expr;
pub mod ident;
pub mod matcher;
pub mod store;
pub mod syntax;
pub mod value;

pub use ident::{Ident, Key};
pub use store::{Direction, EdgeTypeId, ElementId, NodeTypeId, Properties, Store, StoreError, TypeRef};
pub use value::{ElementRef, PathValue, Value, ValueKind};

pub use exec::{Database, ExecError, Executed, Outcome, ResultTable};
pub use matcher::{BindingTable, MatchStats};

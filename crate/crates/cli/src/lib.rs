//! Command-line front end for gqlengine: CSV graph bundles, parameter
//! substitution, table rendering and the statement runner.

pub mod bundle;
pub mod generate;
pub mod params;
pub mod render;
pub mod session;

pub use bundle::{export_bundle, load_bundle, Bundle, BundleError};
pub use params::{substitute_parameters, MissingParameter};
pub use render::{render_table, Format};
pub use session::{Session, SessionConfig, StatementError};

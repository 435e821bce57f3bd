//! Identifiers and their comparison rules.
//!
//! Unquoted identifiers compare case-insensitively; double-quoted
//! identifiers are exact.

use std::fmt;

/// An identifier as written in query text.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ident {
    pub name: String,
    pub quoted: bool,
}

impl Ident {
    pub fn plain(name: impl Into<String>) -> Self {
        Ident {
            name: name.into(),
            quoted: false,
        }
    }

    pub fn quoted(name: impl Into<String>) -> Self {
        Ident {
            name: name.into(),
            quoted: true,
        }
    }

    /// Normalized lookup key for variable binding.
    pub fn key(&self) -> Key {
        if self.quoted {
            Key(self.name.clone())
        } else {
            Key(self.name.to_lowercase())
        }
    }

    /// True when this identifier names `candidate` (a stored type or property name).
    pub fn matches(&self, candidate: &str) -> bool {
        if self.quoted {
            self.name == candidate
        } else {
            self.name.to_lowercase() == candidate.to_lowercase()
        }
    }
}

impl From<&str> for Ident {
    fn from(s: &str) -> Self {
        Ident::plain(s)
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.quoted {
            write!(f, "\"{}\"", self.name.replace('"', "\"\""))
        } else {
            f.write_str(&self.name)
        }
    }
}

/// Normalized variable name used in binding environments.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Key(pub String);

impl Key {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

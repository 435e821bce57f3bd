//! `$name` placeholders in statement text.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("missing value for parameter(s): {}", .names.iter().map(|n| format!("${n}")).collect::<Vec<_>>().join(", "))]
pub struct MissingParameter {
    pub names: Vec<String>,
}

pub fn is_parameter_name(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Replaces every `$name` outside single-quoted literals with its value,
/// verbatim. Fails listing every name that has no value.
pub fn substitute_parameters(text: &str, params: &BTreeMap<String, String>) -> Result<String, MissingParameter> {
    let mut out = String::with_capacity(text.len());
    let mut missing: Vec<String> = Vec::new();
    let mut in_string = false;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c == '\'' {
            in_string = !in_string;
            out.push(c);
            continue;
        }
        let starts_name = chars
            .peek()
            .is_some_and(|&(_, n)| n.is_ascii_alphabetic() || n == '_');
        if c != '$' || in_string || !starts_name {
            out.push(c);
            continue;
        }
        let start = i + 1;
        let mut end = start;
        while let Some(&(j, n)) = chars.peek() {
            if n.is_ascii_alphanumeric() || n == '_' {
                end = j + n.len_utf8();
                chars.next();
            } else {
                break;
            }
        }
        let name = &text[start..end];
        match params.get(name) {
            Some(v) => out.push_str(v),
            None => {
                if !missing.iter().any(|m| m == name) {
                    missing.push(name.to_string());
                }
                out.push('$');
                out.push_str(name);
            }
        }
    }
    if missing.is_empty() {
        Ok(out)
    } else {
        Err(MissingParameter { names: missing })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn replaces_outside_strings_only() {
        let p = params(&[("truncationLimit", "10"), ("x", "zz")]);
        assert_eq!(substitute_parameters("...=$truncationLimit", &p).unwrap(), "...=10");
        assert_eq!(substitute_parameters("{name:'$x'}", &p).unwrap(), "{name:'$x'}");
        assert_eq!(substitute_parameters("no placeholders", &BTreeMap::new()).unwrap(), "no placeholders");
        assert_eq!(substitute_parameters("a $ b $1", &BTreeMap::new()).unwrap(), "a $ b $1");
    }

    #[test]
    fn lists_all_missing_names() {
        let err = substitute_parameters("$a + $b + $a", &BTreeMap::new()).unwrap_err();
        assert_eq!(err.names, vec!["a", "b"]);
        assert_eq!(err.to_string(), "missing value for parameter(s): $a, $b");
    }

    #[test]
    fn names() {
        assert!(is_parameter_name("startTime"));
        assert!(is_parameter_name("_x1"));
        assert!(!is_parameter_name("1x"));
        assert!(!is_parameter_name(""));
    }
}

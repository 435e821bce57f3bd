//! Lexer, parser, tree and pretty-printer for the query language.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;

use thiserror::Error;

pub use ast::*;
pub use lexer::{tokenize, Pos, Token, TokenKind};
pub use parser::{parse_expression, parse_statement, parse_tokens, parse_truncation, split_script, ScriptChunk};
pub use printer::{pretty_print, print_expr};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("{pos}: {message}")]
    Lex { pos: Pos, message: String },
    #[error("{pos}: {message}{}", expected_suffix(.expected))]
    Parse {
        pos: Pos,
        message: String,
        expected: Vec<String>,
    },
}

impl SyntaxError {
    pub fn pos(&self) -> Pos {
        match self {
            SyntaxError::Lex { pos, .. } | SyntaxError::Parse { pos, .. } => *pos,
        }
    }
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected {})", expected.join(" or "))
    }
}

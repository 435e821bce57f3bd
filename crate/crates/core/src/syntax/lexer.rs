use std::fmt;

use super::SyntaxError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keyword {
    Match,
    Create,
    Truncating,
    Trail,
    Acyclic,
    Simple,
    Shortest,
    All,
    Any,
    Where,
    Return,
    As,
    Order,
    By,
    Asc,
    Desc,
    True,
    False,
    And,
    Or,
    Not,
    Timestamp,
}

impl Keyword {
    const ALL: [(Keyword, &'static str); 22] = [
        (Keyword::Match, "MATCH"),
        (Keyword::Create, "CREATE"),
        (Keyword::Truncating, "TRUNCATING"),
        (Keyword::Trail, "TRAIL"),
        (Keyword::Acyclic, "ACYCLIC"),
        (Keyword::Simple, "SIMPLE"),
        (Keyword::Shortest, "SHORTEST"),
        (Keyword::All, "ALL"),
        (Keyword::Any, "ANY"),
        (Keyword::Where, "WHERE"),
        (Keyword::Return, "RETURN"),
        (Keyword::As, "AS"),
        (Keyword::Order, "ORDER"),
        (Keyword::By, "BY"),
        (Keyword::Asc, "ASC"),
        (Keyword::Desc, "DESC"),
        (Keyword::True, "TRUE"),
        (Keyword::False, "FALSE"),
        (Keyword::And, "AND"),
        (Keyword::Or, "OR"),
        (Keyword::Not, "NOT"),
        (Keyword::Timestamp, "TIMESTAMP"),
    ];

    pub fn lookup(word: &str) -> Option<Keyword> {
        Self::ALL
            .iter()
            .find(|(_, s)| s.eq_ignore_ascii_case(word))
            .map(|(k, _)| *k)
    }

    pub fn as_str(self) -> &'static str {
        Self::ALL.iter().find(|(k, _)| *k == self).map(|(_, s)| *s).unwrap_or("?")
    }

    pub fn is_reserved(word: &str) -> bool {
        Self::lookup(word).is_some()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Punct {
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Semicolon,
    Dot,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Question,
    /// `-[`
    EdgeOpen,
    /// `]->`
    EdgeCloseRight,
    /// `<-[`
    EdgeOpenLeft,
    /// `]-`
    EdgeClose,
}

impl Punct {
    pub fn as_str(self) -> &'static str {
        match self {
            Punct::LParen => "(",
            Punct::RParen => ")",
            Punct::LBracket => "[",
            Punct::RBracket => "]",
            Punct::LBrace => "{",
            Punct::RBrace => "}",
            Punct::Comma => ",",
            Punct::Colon => ":",
            Punct::Semicolon => ";",
            Punct::Dot => ".",
            Punct::Eq => "=",
            Punct::Ne => "<>",
            Punct::Lt => "<",
            Punct::Le => "<=",
            Punct::Gt => ">",
            Punct::Ge => ">=",
            Punct::Plus => "+",
            Punct::Minus => "-",
            Punct::Star => "*",
            Punct::Slash => "/",
            Punct::Question => "?",
            Punct::EdgeOpen => "-[",
            Punct::EdgeCloseRight => "]->",
            Punct::EdgeOpenLeft => "<-[",
            Punct::EdgeClose => "]-",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident,
    QuotedIdent,
    Str,
    Number,
    /// `TIMESTAMP '...'`; the token text is the quoted content.
    Timestamp,
    Punct(Punct),
    Eof,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub pos: Pos,
    /// An empty line separates this token from the previous one.
    pub blank_before: bool,
}

impl Token {
    pub fn describe(&self) -> String {
        match &self.kind {
            TokenKind::Keyword(k) => k.as_str().to_string(),
            TokenKind::Ident => format!("identifier {}", self.text),
            TokenKind::QuotedIdent => format!("identifier \"{}\"", self.text),
            TokenKind::Str => format!("string '{}'", self.text),
            TokenKind::Number => format!("number {}", self.text),
            TokenKind::Timestamp => format!("timestamp '{}'", self.text),
            TokenKind::Punct(p) => format!("'{}'", p.as_str()),
            TokenKind::Eof => "end of input".to_string(),
        }
    }
}

struct Lexer {
    chars: Vec<char>,
    at: usize,
    line: u32,
    column: u32,
}

impl Lexer {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.at + ahead).copied()
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek(0)?;
        self.at += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    /// Skips whitespace and comments; returns true if an empty line was crossed.
    fn skip_trivia(&mut self) -> bool {
        let mut line_has_content = true;
        let mut blank = false;
        loop {
            match self.peek(0) {
                Some('\n') => {
                    if !line_has_content {
                        blank = true;
                    }
                    line_has_content = false;
                    self.bump();
                }
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('-') if self.peek(1) == Some('-') => {
                    line_has_content = true;
                    while let Some(c) = self.peek(0) {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return blank,
            }
        }
    }

    /// Reads a `quote`-delimited run with doubled-quote escapes; the opening
    /// quote has not been consumed yet.
    fn delimited(&mut self, quote: char, what: &str) -> Result<String, SyntaxError> {
        let start = self.pos();
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                Some(c) if c == quote => {
                    if self.peek(0) == Some(quote) {
                        self.bump();
                        out.push(quote);
                    } else {
                        return Ok(out);
                    }
                }
                Some(c) => out.push(c),
                None => {
                    return Err(SyntaxError::Lex {
                        pos: start,
                        message: format!("unterminated {what}"),
                    })
                }
            }
        }
    }

    fn punct(&mut self) -> Option<Punct> {
        let c0 = self.peek(0)?;
        let c1 = self.peek(1);
        let c2 = self.peek(2);
        let (p, len) = match (c0, c1, c2) {
            ('<', Some('-'), Some('[')) => (Punct::EdgeOpenLeft, 3),
            (']', Some('-'), Some('>')) => (Punct::EdgeCloseRight, 3),
            (']', Some('-'), _) => (Punct::EdgeClose, 2),
            ('-', Some('['), _) => (Punct::EdgeOpen, 2),
            ('<', Some('>'), _) => (Punct::Ne, 2),
            ('<', Some('='), _) => (Punct::Le, 2),
            ('>', Some('='), _) => (Punct::Ge, 2),
            ('(', ..) => (Punct::LParen, 1),
            (')', ..) => (Punct::RParen, 1),
            ('[', ..) => (Punct::LBracket, 1),
            (']', ..) => (Punct::RBracket, 1),
            ('{', ..) => (Punct::LBrace, 1),
            ('}', ..) => (Punct::RBrace, 1),
            (',', ..) => (Punct::Comma, 1),
            (':', ..) => (Punct::Colon, 1),
            (';', ..) => (Punct::Semicolon, 1),
            ('.', ..) => (Punct::Dot, 1),
            ('=', ..) => (Punct::Eq, 1),
            ('<', ..) => (Punct::Lt, 1),
            ('>', ..) => (Punct::Gt, 1),
            ('+', ..) => (Punct::Plus, 1),
            ('-', ..) => (Punct::Minus, 1),
            ('*', ..) => (Punct::Star, 1),
            ('/', ..) => (Punct::Slash, 1),
            ('?', ..) => (Punct::Question, 1),
            _ => return None,
        };
        for _ in 0..len {
            self.bump();
        }
        Some(p)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Splits `text` into tokens, ending with an `Eof` token.
pub fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut lx = Lexer {
        chars: text.chars().collect(),
        at: 0,
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    loop {
        let blank_before = lx.skip_trivia();
        let pos = lx.pos();
        let Some(c) = lx.peek(0) else {
            out.push(Token {
                kind: TokenKind::Eof,
                text: String::new(),
                pos,
                blank_before,
            });
            return Ok(out);
        };
        let (kind, text) = if is_ident_start(c) {
            let mut word = String::new();
            while let Some(c) = lx.peek(0).filter(|&c| is_ident_char(c)) {
                word.push(c);
                lx.bump();
            }
            match Keyword::lookup(&word) {
                Some(Keyword::Timestamp) => {
                    // TIMESTAMP 'literal' lexes as one token
                    let mark = (lx.at, lx.line, lx.column);
                    lx.skip_trivia();
                    if lx.peek(0) == Some('\'') {
                        let body = lx.delimited('\'', "timestamp literal")?;
                        (TokenKind::Timestamp, body)
                    } else {
                        (lx.at, lx.line, lx.column) = mark;
                        (TokenKind::Keyword(Keyword::Timestamp), word)
                    }
                }
                Some(k) => (TokenKind::Keyword(k), word),
                None => (TokenKind::Ident, word),
            }
        } else if c.is_ascii_digit() {
            let mut num = String::new();
            while let Some(d) = lx.peek(0).filter(char::is_ascii_digit) {
                num.push(d);
                lx.bump();
            }
            if lx.peek(0) == Some('.') && lx.peek(1).is_some_and(|d| d.is_ascii_digit()) {
                num.push('.');
                lx.bump();
                while let Some(d) = lx.peek(0).filter(char::is_ascii_digit) {
                    num.push(d);
                    lx.bump();
                }
            }
            (TokenKind::Number, num)
        } else if c == '"' {
            (TokenKind::QuotedIdent, lx.delimited('"', "quoted identifier")?)
        } else if c == '\'' {
            (TokenKind::Str, lx.delimited('\'', "string")?)
        } else if let Some(p) = lx.punct() {
            (TokenKind::Punct(p), p.as_str().to_string())
        } else {
            return Err(SyntaxError::Lex {
                pos,
                message: format!("illegal character {c:?}"),
            });
        };
        out.push(Token {
            kind,
            text,
            pos,
            blank_before,
        });
    }
}

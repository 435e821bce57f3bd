//! Recursive-descent parser for MATCH and CREATE statements.

use std::str::FromStr;

use rust_decimal::Decimal;

use super::ast::*;
use super::lexer::{tokenize, Keyword, Pos, Punct, Token, TokenKind};
use super::SyntaxError;
use crate::ident::Ident;
use crate::value::parse_timestamp;

pub fn parse_statement(text: &str) -> Result<Statement, SyntaxError> {
    parse_tokens(tokenize(text)?)
}

/// Parses one statement from a token list ending in `Eof`. A trailing
/// semicolon is allowed.
pub fn parse_tokens(tokens: Vec<Token>) -> Result<Statement, SyntaxError> {
    let mut p = Parser { tokens, at: 0 };
    let stmt = p.statement()?;
    p.eat_punct(Punct::Semicolon);
    p.expect_eof()?;
    Ok(stmt)
}

/// Parses just the truncation clause; the cursor must be at TRUNCATING.
pub fn parse_truncation(text: &str) -> Result<Vec<TruncationSpec>, SyntaxError> {
    let mut p = Parser {
        tokens: tokenize(text)?,
        at: 0,
    };
    let specs = p.truncation()?;
    p.expect_eof()?;
    Ok(specs)
}

pub fn parse_expression(text: &str) -> Result<Expr, SyntaxError> {
    let mut p = Parser {
        tokens: tokenize(text)?,
        at: 0,
    };
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// A statement's tokens, cut from a script.
#[derive(Clone, Debug)]
pub struct ScriptChunk {
    pub tokens: Vec<Token>,
}

impl ScriptChunk {
    pub fn start(&self) -> Pos {
        self.tokens.first().map(|t| t.pos).unwrap_or_default()
    }
}

/// Splits a script into statements at semicolons and empty lines.
pub fn split_script(text: &str) -> Result<Vec<ScriptChunk>, SyntaxError> {
    let mut chunks = Vec::new();
    let mut current: Vec<Token> = Vec::new();
    for tok in tokenize(text)? {
        let flush = |current: &mut Vec<Token>, chunks: &mut Vec<ScriptChunk>, pos: Pos| {
            if !current.is_empty() {
                let mut tokens = std::mem::take(current);
                tokens.push(Token {
                    kind: TokenKind::Eof,
                    text: String::new(),
                    pos,
                    blank_before: false,
                });
                chunks.push(ScriptChunk { tokens });
            }
        };
        match tok.kind {
            TokenKind::Eof => {
                flush(&mut current, &mut chunks, tok.pos);
                break;
            }
            TokenKind::Punct(Punct::Semicolon) => flush(&mut current, &mut chunks, tok.pos),
            _ => {
                if tok.blank_before {
                    flush(&mut current, &mut chunks, tok.pos);
                }
                current.push(tok);
            }
        }
    }
    Ok(chunks)
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at.min(self.tokens.len() - 1)]
    }

    fn peek_at(&self, ahead: usize) -> &Token {
        &self.tokens[(self.at + ahead).min(self.tokens.len() - 1)]
    }

    fn advance(&mut self) -> Token {
        let t = self.peek().clone();
        if self.at < self.tokens.len() - 1 {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        let tok = self.peek();
        Err(SyntaxError::Parse {
            pos: tok.pos,
            message: format!("unexpected {}", tok.describe()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn fail<T>(&self, pos: Pos, message: impl Into<String>) -> PResult<T> {
        Err(SyntaxError::Parse {
            pos,
            message: message.into(),
            expected: Vec::new(),
        })
    }

    fn is_punct(&self, p: Punct) -> bool {
        self.peek().kind == TokenKind::Punct(p)
    }

    fn is_keyword(&self, k: Keyword) -> bool {
        self.peek().kind == TokenKind::Keyword(k)
    }

    fn eat_punct(&mut self, p: Punct) -> bool {
        if self.is_punct(p) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_keyword(&mut self, k: Keyword) -> bool {
        if self.is_keyword(k) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: Punct) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.error(&[p.as_str()])
        }
    }

    fn expect_keyword(&mut self, k: Keyword) -> PResult<()> {
        if self.eat_keyword(k) {
            Ok(())
        } else {
            self.error(&[k.as_str()])
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if self.peek().kind == TokenKind::Eof {
            Ok(())
        } else {
            self.error(&["end of input"])
        }
    }

    fn is_ident(&self) -> bool {
        matches!(self.peek().kind, TokenKind::Ident | TokenKind::QuotedIdent)
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().kind {
            TokenKind::Ident => Ok(Ident::plain(self.advance().text)),
            TokenKind::QuotedIdent => Ok(Ident::quoted(self.advance().text)),
            _ => self.error(&["identifier"]),
        }
    }

    fn integer(&mut self) -> PResult<u64> {
        let tok = self.peek().clone();
        if tok.kind != TokenKind::Number || tok.text.contains('.') {
            return self.error(&["integer"]);
        }
        self.advance();
        tok.text
            .parse()
            .or_else(|_| self.fail(tok.pos, format!("integer {} out of range", tok.text)))
    }

    // ---- statements ----

    fn statement(&mut self) -> PResult<Statement> {
        if self.eat_keyword(Keyword::Match) {
            Ok(Statement::Match(self.match_statement()?))
        } else if self.eat_keyword(Keyword::Create) {
            Ok(Statement::Create(self.create_statement()?))
        } else {
            self.error(&["MATCH", "CREATE"])
        }
    }

    fn match_statement(&mut self) -> PResult<MatchStatement> {
        let truncation = if self.is_keyword(Keyword::Truncating) {
            self.truncation()?
        } else {
            Vec::new()
        };
        let mut matches = vec![self.match_pattern()?];
        while self.eat_punct(Punct::Comma) {
            matches.push(self.match_pattern()?);
        }
        let where_clause = if self.eat_keyword(Keyword::Where) {
            Some(self.expr()?)
        } else {
            None
        };
        let dependent = if self.eat_keyword(Keyword::Return) {
            Some(Box::new(Dependent::Return(self.return_clause()?)))
        } else if self.eat_keyword(Keyword::Create) {
            Some(Box::new(Dependent::Create(self.create_statement()?)))
        } else {
            None
        };
        Ok(MatchStatement {
            truncation,
            matches,
            where_clause,
            dependent,
        })
    }

    fn truncation(&mut self) -> PResult<Vec<TruncationSpec>> {
        self.expect_keyword(Keyword::Truncating)?;
        let mut specs = vec![self.truncation_spec()?];
        while self.is_punct(Punct::Comma) && self.spec_follows_comma() {
            self.advance();
            specs.push(self.truncation_spec()?);
        }
        Ok(specs)
    }

    /// After a comma in the truncation list: does another spec follow, or
    /// the first match pattern?
    fn spec_follows_comma(&self) -> bool {
        let next = self.peek_at(1);
        match &next.kind {
            TokenKind::Punct(Punct::Eq) => true,
            TokenKind::Ident | TokenKind::QuotedIdent => match self.peek_at(2).kind {
                TokenKind::Punct(Punct::LParen) => true,
                TokenKind::Punct(Punct::Eq) => self.peek_at(3).kind == TokenKind::Number,
                _ => false,
            },
            TokenKind::Punct(Punct::LParen) => {
                // `(order list) = n` versus a node pattern
                let mut depth = 0usize;
                let mut i = self.at + 1;
                while i < self.tokens.len() {
                    match self.tokens[i].kind {
                        TokenKind::Punct(Punct::LParen) => depth += 1,
                        TokenKind::Punct(Punct::RParen) => {
                            depth -= 1;
                            if depth == 0 {
                                return self
                                    .tokens
                                    .get(i + 1)
                                    .is_some_and(|t| t.kind == TokenKind::Punct(Punct::Eq));
                            }
                        }
                        TokenKind::Eof => return false,
                        _ => {}
                    }
                    i += 1;
                }
                false
            }
            _ => false,
        }
    }

    fn truncation_spec(&mut self) -> PResult<TruncationSpec> {
        let edge_type = if self.is_ident() { Some(self.ident()?) } else { None };
        let mut order = Vec::new();
        if self.eat_punct(Punct::LParen) {
            order.push(self.order_key()?);
            while self.eat_punct(Punct::Comma) {
                order.push(self.order_key()?);
            }
            self.expect_punct(Punct::RParen)?;
        }
        self.expect_punct(Punct::Eq)?;
        let pos = self.peek().pos;
        let limit = self.integer()?;
        if limit == 0 {
            return self.fail(pos, "truncation limit must be at least 1");
        }
        Ok(TruncationSpec {
            edge_type,
            order,
            limit,
        })
    }

    fn direction(&mut self) -> SortDirection {
        if self.eat_keyword(Keyword::Desc) {
            SortDirection::Desc
        } else {
            self.eat_keyword(Keyword::Asc);
            SortDirection::Asc
        }
    }

    fn order_key(&mut self) -> PResult<OrderKey> {
        let expr = self.expr()?;
        Ok(OrderKey {
            expr,
            direction: self.direction(),
        })
    }

    fn match_mode(&mut self) -> MatchMode {
        let repetition = if self.eat_keyword(Keyword::Trail) {
            Repetition::Trail
        } else if self.eat_keyword(Keyword::Acyclic) {
            Repetition::Acyclic
        } else if self.eat_keyword(Keyword::Simple) {
            Repetition::Simple
        } else {
            Repetition::Default
        };
        let selection = if self.eat_keyword(Keyword::Shortest) {
            Selection::Shortest
        } else if self.eat_keyword(Keyword::All) {
            Selection::All
        } else if self.eat_keyword(Keyword::Any) {
            Selection::Any
        } else {
            Selection::Default
        };
        MatchMode { repetition, selection }
    }

    fn match_pattern(&mut self) -> PResult<MatchPattern> {
        let mode = self.match_mode();
        let path_var = if self.is_ident() && self.peek_at(1).kind == TokenKind::Punct(Punct::Eq) {
            let id = self.ident()?;
            self.advance();
            Some(id)
        } else {
            None
        };
        let start = self.node_pattern(true)?;
        let mut steps = Vec::new();
        loop {
            let connector = if self.is_punct(Punct::EdgeOpen) || self.is_punct(Punct::EdgeOpenLeft) {
                Connector::Edge(self.edge_pattern(true)?)
            } else if self.eat_punct(Punct::LBracket) {
                let pattern = self.match_pattern()?;
                self.expect_punct(Punct::RBracket)?;
                let quantifier = self.quantifier()?;
                Connector::Path(Box::new(PathPattern { pattern, quantifier }))
            } else {
                break;
            };
            let node = self.node_pattern(true)?;
            steps.push((connector, node));
        }
        Ok(MatchPattern {
            mode,
            path_var,
            start,
            steps,
        })
    }

    fn quantifier(&mut self) -> PResult<Quantifier> {
        if self.eat_punct(Punct::Question) {
            return Ok(Quantifier::OPTIONAL);
        }
        if self.eat_punct(Punct::Star) {
            return Ok(Quantifier::STAR);
        }
        if self.eat_punct(Punct::Plus) {
            return Ok(Quantifier::PLUS);
        }
        if !self.is_punct(Punct::LBrace) {
            return self.error(&["?", "*", "+", "{"]);
        }
        let pos = self.advance().pos;
        let min = self.bound()?;
        let max = if self.eat_punct(Punct::Comma) {
            if self.is_punct(Punct::RBrace) {
                None
            } else {
                Some(self.bound()?)
            }
        } else {
            Some(min)
        };
        self.expect_punct(Punct::RBrace)?;
        match max {
            Some(0) => self.fail(pos, "quantifier maximum must be at least 1"),
            Some(m) if m < min => self.fail(pos, format!("quantifier minimum {min} exceeds maximum {m}")),
            _ => Ok(Quantifier { min, max }),
        }
    }

    fn bound(&mut self) -> PResult<u32> {
        let pos = self.peek().pos;
        let n = self.integer()?;
        u32::try_from(n).or_else(|_| self.fail(pos, "quantifier bound too large"))
    }

    fn node_pattern(&mut self, in_match: bool) -> PResult<NodePattern> {
        self.expect_punct(Punct::LParen)?;
        let item = self.element_item(in_match)?;
        self.expect_punct(Punct::RParen)?;
        Ok(NodePattern { item })
    }

    fn edge_pattern(&mut self, in_match: bool) -> PResult<EdgePattern> {
        if self.eat_punct(Punct::EdgeOpen) {
            let item = self.element_item(in_match)?;
            self.expect_punct(Punct::EdgeCloseRight)?;
            Ok(EdgePattern {
                item,
                direction: EdgeDirection::LeftToRight,
            })
        } else if self.eat_punct(Punct::EdgeOpenLeft) {
            let item = self.element_item(in_match)?;
            self.expect_punct(Punct::EdgeClose)?;
            Ok(EdgePattern {
                item,
                direction: EdgeDirection::RightToLeft,
            })
        } else {
            self.error(&["-[", "<-["])
        }
    }

    /// `[alias] [':' label] ['{' props '}'] [WHERE expr]`
    ///
    /// Also accepts `:alias:label`, the form the FinBench complex read
    /// uses for its quantified transfer edge.
    fn element_item(&mut self, in_match: bool) -> PResult<ElementItem> {
        let mut item = ElementItem::default();
        if self.is_ident() {
            item.alias = Some(self.ident()?);
        }
        if self.eat_punct(Punct::Colon) {
            let first = self.ident()?;
            if item.alias.is_none() && self.eat_punct(Punct::Colon) {
                item.alias = Some(first);
                item.label = Some(self.ident()?);
            } else {
                item.label = Some(first);
            }
        }
        if self.eat_punct(Punct::LBrace) {
            if !self.is_punct(Punct::RBrace) {
                loop {
                    let key = self.ident()?;
                    self.expect_punct(Punct::Colon)?;
                    let value = self.expr()?;
                    item.properties.push((key, value));
                    if !self.eat_punct(Punct::Comma) {
                        break;
                    }
                }
            }
            self.expect_punct(Punct::RBrace)?;
        }
        if in_match && self.eat_keyword(Keyword::Where) {
            item.where_clause = Some(self.expr()?);
        }
        Ok(item)
    }

    fn create_statement(&mut self) -> PResult<CreateStatement> {
        let mut patterns = vec![self.create_pattern()?];
        while self.eat_punct(Punct::Comma) {
            patterns.push(self.create_pattern()?);
        }
        Ok(CreateStatement { patterns })
    }

    fn create_pattern(&mut self) -> PResult<CreatePattern> {
        let start = self.node_pattern(false)?;
        let mut steps = Vec::new();
        while self.is_punct(Punct::EdgeOpen) || self.is_punct(Punct::EdgeOpenLeft) {
            let edge = self.edge_pattern(false)?;
            let node = self.node_pattern(false)?;
            steps.push((edge, node));
        }
        Ok(CreatePattern { start, steps })
    }

    fn return_clause(&mut self) -> PResult<ReturnClause> {
        let mut projections = Vec::new();
        loop {
            let expr = self.expr()?;
            let alias = if self.eat_keyword(Keyword::As) {
                let pos = self.peek().pos;
                let alias = self.ident()?;
                if projections
                    .iter()
                    .any(|p: &Projection| p.alias.as_ref().is_some_and(|a| a.key() == alias.key()))
                {
                    return self.fail(pos, format!("duplicate column alias {alias}"));
                }
                Some(alias)
            } else {
                None
            };
            projections.push(Projection { expr, alias });
            if !self.eat_punct(Punct::Comma) {
                break;
            }
        }
        let mut order_by = Vec::new();
        if self.eat_keyword(Keyword::Order) {
            self.expect_keyword(Keyword::By)?;
            loop {
                let expr = self.expr()?;
                let direction = self.direction();
                match expr {
                    Expr::Tuple(items) => {
                        order_by.extend(items.into_iter().map(|expr| OrderKey { expr, direction }))
                    }
                    expr => order_by.push(OrderKey { expr, direction }),
                }
                if !self.eat_punct(Punct::Comma) {
                    break;
                }
            }
        }
        Ok(ReturnClause { projections, order_by })
    }

    // ---- expressions ----

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        let mut left = self.and_expr()?;
        while self.eat_keyword(Keyword::Or) {
            let right = self.and_expr()?;
            left = Expr::binary(BinaryOp::Or, left, right);
        }
        Ok(left)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut left = self.not_expr()?;
        while self.eat_keyword(Keyword::And) {
            let right = self.not_expr()?;
            left = Expr::binary(BinaryOp::And, left, right);
        }
        Ok(left)
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        if self.eat_keyword(Keyword::Not) {
            Ok(Expr::Unary(UnaryOp::Not, Box::new(self.not_expr()?)))
        } else {
            self.comparison()
        }
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let mut left = self.additive()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Punct(Punct::Eq) => BinaryOp::Eq,
                TokenKind::Punct(Punct::Ne) => BinaryOp::Ne,
                TokenKind::Punct(Punct::Lt) => BinaryOp::Lt,
                TokenKind::Punct(Punct::Le) => BinaryOp::Le,
                TokenKind::Punct(Punct::Gt) => BinaryOp::Gt,
                TokenKind::Punct(Punct::Ge) => BinaryOp::Ge,
                _ => return Ok(left),
            };
            self.advance();
            let right = self.additive()?;
            left = Expr::binary(op, left, right);
        }
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut left = self.multiplicative()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Punct(Punct::Plus) => BinaryOp::Add,
                TokenKind::Punct(Punct::Minus) => BinaryOp::Sub,
                _ => return Ok(left),
            };
            self.advance();
            let right = self.multiplicative()?;
            left = Expr::binary(op, left, right);
        }
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        let mut left = self.unary()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Punct(Punct::Star) => BinaryOp::Mul,
                TokenKind::Punct(Punct::Slash) => BinaryOp::Div,
                _ => return Ok(left),
            };
            self.advance();
            let right = self.unary()?;
            left = Expr::binary(op, left, right);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat_punct(Punct::Minus) {
            Ok(Expr::Unary(UnaryOp::Neg, Box::new(self.unary()?)))
        } else {
            self.postfix()
        }
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.eat_punct(Punct::Dot) {
                let name = self.ident()?;
                e = Expr::Property(Box::new(e), name);
            } else if self.eat_punct(Punct::LBracket) {
                let index = self.expr()?;
                self.close_index()?;
                e = Expr::Index(Box::new(e), Box::new(index));
            } else {
                return Ok(e);
            }
        }
    }

    /// Closes `e[i]`. The lexer reads `]-` as an edge closer, so in
    /// `p[i]-1` the token is split back into `]` and `-`.
    fn close_index(&mut self) -> PResult<()> {
        if self.eat_punct(Punct::RBracket) {
            return Ok(());
        }
        if self.is_punct(Punct::EdgeClose) {
            let tok = &mut self.tokens[self.at];
            tok.kind = TokenKind::Punct(Punct::Minus);
            tok.text = "-".to_string();
            tok.pos.column += 1;
            return Ok(());
        }
        self.error(&["]"])
    }

    fn primary(&mut self) -> PResult<Expr> {
        let tok = self.peek().clone();
        match &tok.kind {
            TokenKind::Number => {
                self.advance();
                if tok.text.contains('.') {
                    Decimal::from_str(&tok.text)
                        .map(|d| Expr::Literal(Literal::Decimal(d)))
                        .or_else(|_| self.fail(tok.pos, format!("bad decimal {}", tok.text)))
                } else if let Ok(i) = tok.text.parse::<i64>() {
                    Ok(Expr::Literal(Literal::Int(i)))
                } else {
                    Decimal::from_str(&tok.text)
                        .map(|d| Expr::Literal(Literal::Decimal(d)))
                        .or_else(|_| self.fail(tok.pos, format!("number {} out of range", tok.text)))
                }
            }
            TokenKind::Str => {
                self.advance();
                Ok(Expr::Literal(Literal::Text(tok.text)))
            }
            TokenKind::Timestamp => {
                self.advance();
                match parse_timestamp(&tok.text) {
                    Some(t) => Ok(Expr::Literal(Literal::Timestamp(t))),
                    None => self.fail(tok.pos, format!("bad timestamp '{}'", tok.text)),
                }
            }
            TokenKind::Keyword(Keyword::True) => {
                self.advance();
                Ok(Expr::Literal(Literal::Bool(true)))
            }
            TokenKind::Keyword(Keyword::False) => {
                self.advance();
                Ok(Expr::Literal(Literal::Bool(false)))
            }
            TokenKind::Ident | TokenKind::QuotedIdent => {
                let name = self.ident()?;
                if tok.kind == TokenKind::Ident && self.eat_punct(Punct::LParen) {
                    let mut args = Vec::new();
                    if self.eat_punct(Punct::Star) {
                        args.push(Expr::Star);
                    } else if !self.is_punct(Punct::RParen) {
                        args.push(self.expr()?);
                        while self.eat_punct(Punct::Comma) {
                            args.push(self.expr()?);
                        }
                    }
                    self.expect_punct(Punct::RParen)?;
                    Ok(Expr::Call(name, args))
                } else {
                    Ok(Expr::Ident(name))
                }
            }
            TokenKind::Punct(Punct::LParen) => {
                self.advance();
                let first = self.expr()?;
                if self.eat_punct(Punct::Comma) {
                    let mut items = vec![first, self.expr()?];
                    while self.eat_punct(Punct::Comma) {
                        items.push(self.expr()?);
                    }
                    self.expect_punct(Punct::RParen)?;
                    Ok(Expr::Tuple(items))
                } else {
                    self.expect_punct(Punct::RParen)?;
                    Ok(first)
                }
            }
            _ => self.error(&["expression"]),
        }
    }
}

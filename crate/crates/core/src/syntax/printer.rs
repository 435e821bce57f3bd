//! Canonical text for statements and expressions. Output reparses to an
//! identical tree.

use std::fmt::Write;

use super::ast::*;
use super::lexer::Keyword;
use crate::ident::Ident;

pub fn pretty_print(stmt: &Statement) -> String {
    let mut out = String::new();
    match stmt {
        Statement::Match(m) => print_match_statement(&mut out, m),
        Statement::Create(c) => print_create(&mut out, c),
    }
    out
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr(&mut out, e, 0);
    out
}

fn ident(out: &mut String, id: &Ident) {
    let needs_quotes = id.quoted
        || Keyword::is_reserved(&id.name)
        || id.name.is_empty()
        || !id.name.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
        || !id.name.chars().all(|c| c.is_alphanumeric() || c == '_');
    if needs_quotes && !id.quoted {
        // an unquoted identifier that cannot be written bare; keep its text
        out.push_str(&Ident::quoted(id.name.clone()).to_string());
    } else {
        let _ = write!(out, "{id}");
    }
}

fn print_match_statement(out: &mut String, m: &MatchStatement) {
    out.push_str("MATCH");
    if !m.truncation.is_empty() {
        out.push_str(" TRUNCATING ");
        for (i, spec) in m.truncation.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            if let Some(t) = &spec.edge_type {
                ident(out, t);
            }
            if !spec.order.is_empty() {
                out.push('(');
                order_keys(out, &spec.order);
                out.push(')');
            }
            let _ = write!(out, "={}", spec.limit);
        }
    }
    for (i, pattern) in m.matches.iter().enumerate() {
        out.push_str(if i == 0 { " " } else { ", " });
        match_pattern(out, pattern);
    }
    if let Some(w) = &m.where_clause {
        out.push_str(" WHERE ");
        expr(out, w, 0);
    }
    match m.dependent.as_deref() {
        Some(Dependent::Return(r)) => {
            out.push_str(" RETURN ");
            for (i, p) in r.projections.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                expr(out, &p.expr, 0);
                if let Some(a) = &p.alias {
                    out.push_str(" AS ");
                    ident(out, a);
                }
            }
            if !r.order_by.is_empty() {
                out.push_str(" ORDER BY ");
                order_keys(out, &r.order_by);
            }
        }
        Some(Dependent::Create(c)) => {
            out.push(' ');
            print_create(out, c);
        }
        None => {}
    }
}

fn order_keys(out: &mut String, keys: &[OrderKey]) {
    for (i, k) in keys.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        expr(out, &k.expr, 0);
        if k.direction == SortDirection::Desc {
            out.push_str(" DESC");
        }
    }
}

fn match_pattern(out: &mut String, p: &MatchPattern) {
    match p.mode.repetition {
        Repetition::Default => {}
        Repetition::Trail => out.push_str("TRAIL "),
        Repetition::Acyclic => out.push_str("ACYCLIC "),
        Repetition::Simple => out.push_str("SIMPLE "),
    }
    match p.mode.selection {
        Selection::Default => {}
        Selection::All => out.push_str("ALL "),
        Selection::Any => out.push_str("ANY "),
        Selection::Shortest => out.push_str("SHORTEST "),
    }
    if let Some(v) = &p.path_var {
        ident(out, v);
        out.push('=');
    }
    node(out, &p.start);
    for (connector, n) in &p.steps {
        match connector {
            Connector::Edge(e) => edge(out, e),
            Connector::Path(path) => {
                out.push('[');
                match_pattern(out, &path.pattern);
                out.push(']');
                let q = path.quantifier;
                match (q.min, q.max) {
                    (0, Some(1)) => out.push('?'),
                    (0, None) => out.push('*'),
                    (1, None) => out.push('+'),
                    (a, None) => {
                        let _ = write!(out, "{{{a},}}");
                    }
                    (a, Some(b)) => {
                        let _ = write!(out, "{{{a},{b}}}");
                    }
                }
            }
        }
        node(out, n);
    }
}

fn item(out: &mut String, item: &ElementItem) {
    if let Some(a) = &item.alias {
        ident(out, a);
    }
    if let Some(l) = &item.label {
        out.push(':');
        ident(out, l);
    }
    if !item.properties.is_empty() {
        out.push('{');
        for (i, (k, v)) in item.properties.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            ident(out, k);
            out.push(':');
            expr(out, v, 0);
        }
        out.push('}');
    }
    if let Some(w) = &item.where_clause {
        if item.alias.is_some() || item.label.is_some() || !item.properties.is_empty() {
            out.push(' ');
        }
        out.push_str("WHERE ");
        expr(out, w, 0);
    }
}

fn node(out: &mut String, n: &NodePattern) {
    out.push('(');
    item(out, &n.item);
    out.push(')');
}

fn edge(out: &mut String, e: &EdgePattern) {
    match e.direction {
        EdgeDirection::LeftToRight => {
            out.push_str("-[");
            item(out, &e.item);
            out.push_str("]->");
        }
        EdgeDirection::RightToLeft => {
            out.push_str("<-[");
            item(out, &e.item);
            out.push_str("]-");
        }
    }
}

fn print_create(out: &mut String, c: &CreateStatement) {
    out.push_str("CREATE ");
    for (i, p) in c.patterns.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        node(out, &p.start);
        for (e, n) in &p.steps {
            edge(out, e);
            node(out, n);
        }
    }
}

fn literal(out: &mut String, l: &Literal) {
    match l {
        Literal::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Literal::Decimal(d) => {
            let s = d.to_string();
            out.push_str(&s);
            if !s.contains('.') {
                // keep it a decimal on reparse
                out.push_str(".0");
            }
        }
        Literal::Bool(true) => out.push_str("TRUE"),
        Literal::Bool(false) => out.push_str("FALSE"),
        Literal::Text(s) => {
            let _ = write!(out, "'{}'", s.replace('\'', "''"));
        }
        Literal::Timestamp(t) => {
            let _ = write!(out, "TIMESTAMP '{}'", t.format("%Y-%m-%d %H:%M:%S%.f"));
        }
    }
}

const NOT_PRECEDENCE: u8 = 3;
const UNARY_PRECEDENCE: u8 = 7;

fn expr(out: &mut String, e: &Expr, min_prec: u8) {
    match e {
        Expr::Literal(l) => literal(out, l),
        Expr::Ident(id) => ident(out, id),
        Expr::Star => out.push('*'),
        Expr::Property(base, name) => {
            postfix_base(out, base);
            out.push('.');
            ident(out, name);
        }
        Expr::Index(base, index) => {
            postfix_base(out, base);
            out.push('[');
            expr(out, index, 0);
            out.push(']');
        }
        Expr::Call(name, args) => {
            ident(out, name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                expr(out, a, 0);
            }
            out.push(')');
        }
        Expr::Tuple(items) => {
            out.push('(');
            for (i, a) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                expr(out, a, 0);
            }
            out.push(')');
        }
        Expr::Unary(op, inner) => {
            let prec = match op {
                UnaryOp::Not => NOT_PRECEDENCE,
                UnaryOp::Neg => UNARY_PRECEDENCE,
            };
            let paren = prec < min_prec;
            if paren {
                out.push('(');
            }
            match op {
                UnaryOp::Not => out.push_str("NOT "),
                // a space keeps `- -x` from lexing as a comment
                UnaryOp::Neg => out.push_str("- "),
            }
            expr(out, inner, prec);
            if paren {
                out.push(')');
            }
        }
        Expr::Binary(op, l, r) => {
            let prec = op.precedence();
            let paren = prec < min_prec;
            if paren {
                out.push('(');
            }
            expr(out, l, prec);
            let _ = write!(out, " {} ", op.symbol());
            // left-associative: a right operand of equal precedence needs parentheses
            expr(out, r, prec + 1);
            if paren {
                out.push(')');
            }
        }
    }
}

fn postfix_base(out: &mut String, base: &Expr) {
    match base {
        Expr::Ident(_) | Expr::Property(..) | Expr::Index(..) | Expr::Call(..) | Expr::Tuple(_) => {
            expr(out, base, 0)
        }
        _ => {
            out.push('(');
            expr(out, base, 0);
            out.push(')');
        }
    }
}

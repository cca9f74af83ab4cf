//! Lexer and recursive-descent parser for the sequence language.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! expr     := or_expr
//! or_expr  := and_expr ("or" and_expr)*
//! and_expr := not_expr ("and" not_expr)*
//! not_expr := ["not"] cmp
//! cmp      := sum [("=="|"!="|"<"|"<="|">"|">=") sum]
//! sum      := prod (("+"|"-") prod)*
//! prod     := unary (("*"|"/"|"%") unary)*
//! unary    := ["-"] power
//! power    := atom ["^" unary]
//! atom     := number | "n" | "(" expr ")" | ident "(" args ")"
//!           | "if" expr "then" expr "else" expr
//! ```
//!
//! A parenthesised tuple `(e1, e2, ...)` is accepted only as the whole input
//! of a sequence and sets its dimension. Types (numeric vs boolean) are
//! checked while parsing so evaluation never sees an ill-typed tree.

use std::fmt;

use thiserror::Error;

use super::ast::{BinOp, CmpOp, Expr, Func, LogicOp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        ParseError {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Caret,
    LParen,
    RParen,
    Comma,
    Cmp(CmpOp),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Percent => f.write_str("'%'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::Cmp(op) => write!(f, "'{}'", op.symbol()),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                match text.parse::<f64>() {
                    Ok(v) if v.is_finite() => Tok::Num(v),
                    _ => return Err(ParseError::new(start, format!("malformed number {text:?}"))),
                }
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                Tok::Ident(src[start..i].to_string())
            }
            _ => {
                let two = bytes.get(i + 1).copied();
                let (tok, len) = match (c, two) {
                    (b'=', Some(b'=')) => (Tok::Cmp(CmpOp::Eq), 2),
                    (b'!', Some(b'=')) => (Tok::Cmp(CmpOp::Ne), 2),
                    (b'<', Some(b'=')) => (Tok::Cmp(CmpOp::Le), 2),
                    (b'>', Some(b'=')) => (Tok::Cmp(CmpOp::Ge), 2),
                    (b'<', _) => (Tok::Cmp(CmpOp::Lt), 1),
                    (b'>', _) => (Tok::Cmp(CmpOp::Gt), 1),
                    (b'+', _) => (Tok::Plus, 1),
                    (b'-', _) => (Tok::Minus, 1),
                    (b'*', _) => (Tok::Star, 1),
                    (b'/', _) => (Tok::Slash, 1),
                    (b'%', _) => (Tok::Percent, 1),
                    (b'^', _) => (Tok::Caret, 1),
                    (b'(', _) => (Tok::LParen, 1),
                    (b')', _) => (Tok::RParen, 1),
                    (b',', _) => (Tok::Comma, 1),
                    _ => {
                        let ch = src[start..].chars().next().unwrap_or('?');
                        return Err(ParseError::new(start, format!("unexpected character {ch:?}")));
                    }
                };
                i += len;
                tok
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::Eof, src.len()));
    Ok(out)
}

const KEYWORDS: [&str; 6] = ["if", "then", "else", "and", "or", "not"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Num,
    Bool,
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ty::Num => "numeric",
            Ty::Bool => "boolean",
        })
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

type Typed = (Expr, Ty, usize);

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expected(&self, what: &str) -> ParseError {
        ParseError::new(self.offset(), format!("expected {what}, found {}", self.peek()))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.expected(what))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.expected(&format!("'{kw}'")))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.expected("end of input"))
        }
    }

    fn require(typed: &Typed, ty: Ty, ctx: &str) -> Result<(), ParseError> {
        if typed.1 == ty {
            Ok(())
        } else {
            Err(ParseError::new(
                typed.2,
                format!("{ctx} requires a {ty} operand, found a {} expression", typed.1),
            ))
        }
    }

    /// Top level of a sequence: either a plain expression or a tuple.
    fn sequence(&mut self) -> Result<Vec<Typed>, ParseError> {
        if *self.peek() == Tok::LParen {
            let save = self.pos;
            self.bump();
            let first = self.expr()?;
            if *self.peek() == Tok::Comma {
                let mut items = vec![first];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    items.push(self.expr()?);
                }
                self.expect(Tok::RParen, "',' or ')'")?;
                self.expect_eof()?;
                return Ok(items);
            }
            self.pos = save;
        }
        let e = self.expr()?;
        self.expect_eof()?;
        Ok(vec![e])
    }

    fn expr(&mut self) -> Result<Typed, ParseError> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> Result<Typed, ParseError> {
        let mut lhs = self.and_expr()?;
        while self.is_keyword("or") {
            self.bump();
            let rhs = self.and_expr()?;
            Self::require(&lhs, Ty::Bool, "'or'")?;
            Self::require(&rhs, Ty::Bool, "'or'")?;
            lhs = (
                Expr::Logic(LogicOp::Or, Box::new(lhs.0), Box::new(rhs.0)),
                Ty::Bool,
                lhs.2,
            );
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Typed, ParseError> {
        let mut lhs = self.not_expr()?;
        while self.is_keyword("and") {
            self.bump();
            let rhs = self.not_expr()?;
            Self::require(&lhs, Ty::Bool, "'and'")?;
            Self::require(&rhs, Ty::Bool, "'and'")?;
            lhs = (
                Expr::Logic(LogicOp::And, Box::new(lhs.0), Box::new(rhs.0)),
                Ty::Bool,
                lhs.2,
            );
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> Result<Typed, ParseError> {
        if self.is_keyword("not") {
            let at = self.offset();
            self.bump();
            let inner = self.cmp()?;
            Self::require(&inner, Ty::Bool, "'not'")?;
            return Ok((Expr::Not(Box::new(inner.0)), Ty::Bool, at));
        }
        self.cmp()
    }

    fn cmp(&mut self) -> Result<Typed, ParseError> {
        let lhs = self.sum()?;
        if let Tok::Cmp(op) = *self.peek() {
            self.bump();
            let rhs = self.sum()?;
            let ctx = format!("'{}'", op.symbol());
            Self::require(&lhs, Ty::Num, &ctx)?;
            Self::require(&rhs, Ty::Num, &ctx)?;
            return Ok((
                Expr::Cmp(op, Box::new(lhs.0), Box::new(rhs.0)),
                Ty::Bool,
                lhs.2,
            ));
        }
        Ok(lhs)
    }

    fn sum(&mut self) -> Result<Typed, ParseError> {
        let mut lhs = self.prod()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            lhs = self.binary_tail(lhs, op, Self::prod)?;
        }
    }

    fn prod(&mut self) -> Result<Typed, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                Tok::Percent => BinOp::Mod,
                _ => return Ok(lhs),
            };
            lhs = self.binary_tail(lhs, op, Self::unary)?;
        }
    }

    fn binary_tail(
        &mut self,
        lhs: Typed,
        op: BinOp,
        operand: fn(&mut Self) -> Result<Typed, ParseError>,
    ) -> Result<Typed, ParseError> {
        let (sym, _) = self.bump();
        let rhs = operand(self)?;
        let ctx = sym.to_string();
        Self::require(&lhs, Ty::Num, &ctx)?;
        Self::require(&rhs, Ty::Num, &ctx)?;
        Ok((Expr::binary(op, lhs.0, rhs.0), Ty::Num, lhs.2))
    }

    fn unary(&mut self) -> Result<Typed, ParseError> {
        if *self.peek() == Tok::Minus {
            let at = self.offset();
            self.bump();
            let inner = self.power()?;
            Self::require(&inner, Ty::Num, "unary '-'")?;
            return Ok((Expr::Neg(Box::new(inner.0)), Ty::Num, at));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Typed, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.unary()?;
            Self::require(&base, Ty::Num, "'^'")?;
            Self::require(&exp, Ty::Num, "'^'")?;
            return Ok((Expr::binary(BinOp::Pow, base.0, exp.0), Ty::Num, base.2));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Typed, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok((Expr::Num(v), Ty::Num, at))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() == Tok::Comma {
                    return Err(ParseError::new(
                        self.offset(),
                        "tuples are only allowed as the whole sequence expression",
                    ));
                }
                self.expect(Tok::RParen, "')'")?;
                Ok((inner.0, inner.1, at))
            }
            Tok::Ident(name) => match name.as_str() {
                "n" => {
                    self.bump();
                    Ok((Expr::Index, Ty::Num, at))
                }
                "if" => {
                    self.bump();
                    let cond = self.expr()?;
                    Self::require(&cond, Ty::Bool, "'if' condition")?;
                    self.expect_keyword("then")?;
                    let then = self.expr()?;
                    self.expect_keyword("else")?;
                    let other = self.expr()?;
                    if then.1 != other.1 {
                        return Err(ParseError::new(
                            other.2,
                            format!(
                                "'if' branches disagree: {} then-branch, {} else-branch",
                                then.1, other.1
                            ),
                        ));
                    }
                    Ok((Expr::if_else(cond.0, then.0, other.0), then.1, at))
                }
                kw if KEYWORDS.contains(&kw) => Err(self.expected("an expression")),
                _ => self.call(name, at),
            },
            _ => Err(self.expected("an expression")),
        }
    }

    fn call(&mut self, name: String, at: usize) -> Result<Typed, ParseError> {
        let func = Func::from_name(&name)
            .ok_or_else(|| ParseError::new(at, format!("unknown identifier '{name}'")))?;
        self.bump();
        self.expect(Tok::LParen, &format!("'(' after '{name}'"))?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                let arg = self.expr()?;
                Self::require(&arg, Ty::Num, &format!("argument of '{name}'"))?;
                args.push(arg.0);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "',' or ')'")?;
        if args.len() != func.arity() {
            return Err(ParseError::new(
                at,
                format!(
                    "'{name}' takes {} argument(s), got {}",
                    func.arity(),
                    args.len()
                ),
            ));
        }
        let ty = if func.returns_bool() { Ty::Bool } else { Ty::Num };
        Ok((Expr::Call(func, args), ty, at))
    }
}

/// Parses numeric component expressions (one, or a top-level tuple).
pub(crate) fn parse_components(text: &str) -> Result<Vec<Expr>, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::new(0, "empty sequence expression"));
    }
    let mut p = Parser::new(text)?;
    let items = p.sequence()?;
    items
        .into_iter()
        .map(|item| {
            Parser::require(&item, Ty::Num, "a sequence component")?;
            Ok(item.0)
        })
        .collect()
}

/// Parses a single boolean expression over `n`.
pub(crate) fn parse_bool(text: &str) -> Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::new(0, "empty predicate expression"));
    }
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Parser::require(&e, Ty::Bool, "a predicate")?;
    Ok(e.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(text: &str) -> Expr {
        let mut c = parse_components(text).unwrap();
        assert_eq!(c.len(), 1);
        c.remove(0)
    }

    #[test]
    fn precedence() {
        // -2^2 = -(2^2)
        assert_eq!(
            one("-2^2"),
            Expr::Neg(Box::new(Expr::binary(BinOp::Pow, Expr::Num(2.0), Expr::Num(2.0))))
        );
        // right-assoc power
        assert_eq!(one("2^3^2"), one("2^(3^2)"));
        assert_eq!(one("1 - 2 - 3"), one("(1 - 2) - 3"));
        assert_eq!(one("1 + 2 * 3"), one("1 + (2 * 3)"));
        assert_eq!(one("2^-1"), one("2^(-1)"));
        assert_eq!(
            parse_bool("not n < 3 and n > 1 or n == 7").unwrap(),
            parse_bool("((not (n < 3)) and (n > 1)) or (n == 7)").unwrap()
        );
    }

    #[test]
    fn tuple_only_at_top() {
        assert_eq!(parse_components("(n, 2*n, 3)").unwrap().len(), 3);
        assert_eq!(parse_components("(n) + 1").unwrap().len(), 1);
        let err = parse_components("1 + (n, 2)").unwrap_err();
        assert_eq!(err.offset, 6);
    }

    #[test]
    fn type_errors() {
        let err = parse_components("is_square(n)").unwrap_err();
        assert_eq!(err.offset, 0);
        let err = parse_components("if n then 1 else 2").unwrap_err();
        assert_eq!(err.offset, 3);
        let err = parse_bool("n + 1").unwrap_err();
        assert!(err.message.contains("predicate"));
        let err = parse_components("if n > 1 then 1 else n > 2").unwrap_err();
        assert_eq!(err.offset, 21);
    }

    #[test]
    fn error_offsets() {
        assert_eq!(parse_components("").unwrap_err().offset, 0);
        assert_eq!(parse_components("1 +").unwrap_err().offset, 3);
        assert_eq!(parse_components("foo(n)").unwrap_err().offset, 0);
        assert_eq!(parse_components("n $ 2").unwrap_err().offset, 2);
        assert_eq!(parse_components("sin(n").unwrap_err().offset, 5);
        assert_eq!(parse_components("pow(n)").unwrap_err().offset, 0);
        assert_eq!(parse_components("--n").unwrap_err().offset, 1);
    }
}

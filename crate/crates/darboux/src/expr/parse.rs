//! Hand-rolled lexer and recursive-descent parser.

use super::ast::{BinOp, Expr, Func};
use super::{ParseError, VariableLayout};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Number(v) => format!("number `{v}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(source: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let bytes: Vec<char> = source.chars().collect();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i];
        let (tline, tcol) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '+' => {
                out.push(Spanned { tok: Tok::Plus, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            '-' => {
                out.push(Spanned { tok: Tok::Minus, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            '*' => {
                out.push(Spanned { tok: Tok::Star, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            '/' => {
                out.push(Spanned { tok: Tok::Slash, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            '^' => {
                out.push(Spanned { tok: Tok::Caret, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            '(' => {
                out.push(Spanned { tok: Tok::LParen, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            ')' => {
                out.push(Spanned { tok: Tok::RParen, line: tline, col: tcol });
                advance(1, &mut i, &mut col);
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == '.' {
                    if i + 1 >= bytes.len() || !bytes[i + 1].is_ascii_digit() {
                        return Err(ParseError::Syntax {
                            line: tline,
                            col: tcol + (i - start),
                            message: "expected digits after decimal point".into(),
                        });
                    }
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == 'e' || bytes[i] == 'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == '+' || bytes[j] == '-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                    // a bare `e` binds to a following identifier instead
                }
                let text: String = bytes[start..i].iter().collect();
                let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
                    line: tline,
                    col: tcol,
                    message: format!("malformed number `{text}`"),
                })?;
                col += i - start;
                out.push(Spanned { tok: Tok::Number(value), line: tline, col: tcol });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_')
                {
                    i += 1;
                }
                let text: String = bytes[start..i].iter().collect();
                col += i - start;
                out.push(Spanned { tok: Tok::Ident(text), line: tline, col: tcol });
            }
            other => {
                return Err(ParseError::Syntax {
                    line: tline,
                    col: tcol,
                    message: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Spanned>,
    pos: usize,
    layout: &'a VariableLayout,
    end_line: usize,
    end_col: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        self.peek()
            .map(|t| (t.line, t.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn error(&self, expected: &str) -> ParseError {
        let (line, col) = self.here();
        let found = self
            .peek()
            .map(|t| t.tok.describe())
            .unwrap_or_else(|| "end of input".to_string());
        ParseError::Syntax {
            line,
            col,
            message: format!("expected {expected}, found {found}"),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Spanned { tok: Tok::RParen, .. }) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error("`)`")),
        }
    }

    // expr := term (("+" | "-") term)*
    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().map(|t| &t.tok) {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // term := factor (("*" | "/") factor)*
    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek().map(|t| &t.tok) {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // factor := "-" factor | power, with power := atom ("^" factor)?
    //
    // `^` binds tighter than unary minus and is right-associative, so
    // `-2^2` is `-(2^2)` while `2^-2` still parses.
    fn factor(&mut self) -> Result<Expr, ParseError> {
        if let Some(Spanned { tok: Tok::Minus, .. }) = self.peek() {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some(Spanned { tok: Tok::Caret, line, col }) = self.peek().cloned() {
            self.pos += 1;
            let exponent = self.factor()?;
            if !exponent.is_constant() {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    message: "exponent must be a constant expression (no variables)"
                        .to_string(),
                });
            }
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    // atom := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.next() {
            Some(Spanned { tok: Tok::Number(v), .. }) => Ok(Expr::Number(v)),
            Some(Spanned { tok: Tok::LParen, .. }) => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Some(Spanned { tok: Tok::Ident(name), line, col }) => {
                let called = matches!(self.peek(), Some(Spanned { tok: Tok::LParen, .. }));
                if called {
                    if let Some(func) = Func::from_name(&name) {
                        self.pos += 1; // consume "("
                        let arg = self.expr()?;
                        self.expect_rparen()?;
                        return Ok(Expr::Call(func, Box::new(arg)));
                    }
                    if self.layout.var_index(&name).is_some()
                        || self.layout.param_index(&name).is_some()
                    {
                        return Err(ParseError::Syntax {
                            line,
                            col,
                            message: format!("`{name}` is not a function"),
                        });
                    }
                    return Err(ParseError::UnknownIdentifier { name, line, col });
                }
                if let Some(i) = self.layout.var_index(&name) {
                    return Ok(Expr::Var(i));
                }
                if let Some(i) = self.layout.param_index(&name) {
                    return Ok(Expr::Param(i));
                }
                if VariableLayout::is_function(&name) {
                    return Err(ParseError::Syntax {
                        line,
                        col,
                        message: format!("function `{name}` needs an argument list"),
                    });
                }
                Err(ParseError::UnknownIdentifier { name, line, col })
            }
            Some(t) => Err(ParseError::Syntax {
                line: t.line,
                col: t.col,
                message: format!(
                    "expected number, identifier or `(`, found {}",
                    t.tok.describe()
                ),
            }),
            None => {
                let (line, col) = (self.end_line, self.end_col);
                Err(ParseError::Syntax {
                    line,
                    col,
                    message: "expected number, identifier or `(`, found end of input"
                        .to_string(),
                })
            }
        }
    }
}

/// Parse `source` against `layout`. Parsing is deterministic; every
/// identifier must resolve to a declared variable, parameter or function.
pub fn parse(source: &str, layout: &VariableLayout) -> Result<Expr, ParseError> {
    let tokens = lex(source)?;
    let end_line = source.lines().count().max(1);
    let end_col = source.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
    let mut parser = Parser { tokens, pos: 0, layout, end_line, end_col };
    let expr = parser.expr()?;
    if parser.peek().is_some() {
        return Err(parser.error("end of input"));
    }
    Ok(expr)
}

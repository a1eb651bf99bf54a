//! Expression grammar for matrix entries.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' ['-'] digits)*
//! atom  := digits | 'i' | 'z' | '(' expr ')'
//! ```
//!
//! Binary operators associate left; `^` binds tighter than unary minus,
//! so `-z^2` is `-(z^2)`.  There are no decimal literals: `1/2` is exact
//! division, which is how rational constants are written.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ratfun::RatFun;
use crate::scalar::GaussRat;

/// Parse tree for one matrix entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ast {
    Int(BigInt),
    ImagUnit,
    Var,
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i64),
}

/// A parsed entry: the tree and its reduced rational-function value.
#[derive(Debug, Clone)]
pub struct EntryExpr {
    pub ast: Ast,
    pub value: RatFun,
}

/// Parses one entry expression and evaluates it to a reduced rational
/// function.  Errors carry the byte offset and the expected token set.
pub fn parse_entry(input: &str) -> Result<EntryExpr> {
    let mut p = Parser { src: input.as_bytes(), pos: 0 };
    let ast = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("end of input"));
    }
    let value = eval(&ast)?;
    Ok(EntryExpr { ast, value })
}

fn eval(ast: &Ast) -> Result<RatFun> {
    Ok(match ast {
        Ast::Int(n) => RatFun::constant(GaussRat::from_rat(crate::scalar::Rat::from_integer(
            n.clone(),
        ))),
        Ast::ImagUnit => RatFun::constant(GaussRat::i()),
        Ast::Var => RatFun::var(),
        Ast::Neg(a) => -eval(a)?,
        Ast::Add(a, b) => eval(a)? + eval(b)?,
        Ast::Sub(a, b) => eval(a)? - eval(b)?,
        Ast::Mul(a, b) => eval(a)? * eval(b)?,
        Ast::Div(a, b) => eval(a)?.div(&eval(b)?)?,
        Ast::Pow(a, k) => eval(a)?.pow(*k)?,
    })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error(&self, expected: &str) -> Error {
        let found = match self.src.get(self.pos) {
            Some(&b) => format!("'{}'", b as char),
            None => "end of input".to_string(),
        };
        Error::Parse { offset: self.pos, expected: expected.to_string(), found }
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast> {
        let mut base = self.atom()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.exponent()?;
            base = Ast::Pow(Box::new(base), exp);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64> {
        let negative = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        if !self.peek().is_some_and(|b| b.is_ascii_digit()) {
            return Err(self.error("integer exponent"));
        }
        let digits = self.digits();
        let k: i64 = digits
            .parse()
            .map_err(|_| Error::Parse {
                offset: self.pos,
                expected: "exponent small enough for i64".into(),
                found: digits.clone(),
            })?;
        Ok(if negative { -k } else { k })
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<Ast> {
        match self.peek() {
            Some(b) if b.is_ascii_digit() => {
                let digits = self.digits();
                Ok(Ast::Int(digits.parse().expect("ascii digits parse as BigInt")))
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(Ast::ImagUnit)
            }
            Some(b'z') => {
                self.pos += 1;
                Ok(Ast::Var)
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.error("integer, 'i', 'z', or '('")),
        }
    }
}

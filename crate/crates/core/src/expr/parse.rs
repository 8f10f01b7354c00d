//! Expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?            right-associative
//! atom    := number | ident primes? ('(' expr (',' expr)* ')')? | '(' expr ')'
//! primes  := ("'" digit*)+                derivative markers
//! ```
//!
//! Identifiers are `[A-Za-z][A-Za-z0-9_]*`. Bare identifiers must be jet
//! symbols (`t`, `x`, `u`, `u_x`, `v_t`, ...) or registered parameters;
//! applied identifiers must be registered functions of matching arity.
//! Exponents must reduce to rational constants. Decimal literals are read as
//! exact rationals.

use num::{BigInt, Zero};
use thiserror::Error;

use super::{normalize, Expr, FuncApp, FunctionTable, Rational, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at offset {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the input.
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: unexpected {0}")]
    Unexpected(String),
    #[error("syntax error: expected {0}")]
    Expected(&'static str),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("`{name}` takes {expected} arguments, got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("exponent is not a rational constant")]
    NonConstantExponent,
    #[error("bad derivative marker on `{0}`")]
    BadDerivative(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Prime(Option<usize>),
    Op(char),
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number {n}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Prime(_) => "`'`".to_string(),
        Tok::Op(c) => format!("`{c}`"),
        Tok::End => "end of input".to_string(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let int_part = &text[start..i];
            let mut frac_part = "";
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                let fs = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                frac_part = &text[fs..i];
            }
            out.push((Tok::Num(decimal(int_part, frac_part)), start));
        } else if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if c == b'\'' {
            i += 1;
            let ds = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let slot = if i > ds { text[ds..i].parse().ok() } else { None };
            out.push((Tok::Prime(slot), start));
        } else if b"+-*/^(),".contains(&c) {
            out.push((Tok::Op(c as char), start));
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap();
            return Err(ParseError {
                kind: ParseErrorKind::Unexpected(format!("character `{ch}`")),
                offset: start,
            });
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

fn decimal(int_part: &str, frac_part: &str) -> Rational {
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits.is_empty() { "0".to_string() } else { digits };
    let numer: BigInt = digits.parse().unwrap_or_else(|_| BigInt::zero());
    let denom = num::pow::pow(BigInt::from(10), frac_part.len());
    Rational::new(numer, denom)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    table: &'a FunctionTable,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError {
            kind,
            offset: self.offset(),
        })
    }

    fn unexpected<T>(&self) -> Result<T, ParseError> {
        self.err(ParseErrorKind::Unexpected(describe(self.peek())))
    }

    fn expect(&mut self, op: char, what: &'static str) -> Result<(), ParseError> {
        if *self.peek() == Tok::Op(op) {
            self.bump();
            Ok(())
        } else {
            self.err(ParseErrorKind::Expected(what))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Op('-') => {
                    self.bump();
                    terms.push(-self.term()?);
                }
                _ => break,
            }
        }
        Ok(super::sum(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.unary()?];
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    factors.push(self.unary()?);
                }
                Tok::Op('/') => {
                    self.bump();
                    factors.push(self.unary()?.recip());
                }
                _ => break,
            }
        }
        Ok(super::product(factors))
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let exponent = normalize(&self.unary()?);
        match exponent {
            Expr::Const(r) => Ok(base.pow(r)),
            _ => Err(ParseError {
                kind: ParseErrorKind::NonConstantExponent,
                offset: at,
            }),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Expr::Const(n))
            }
            Tok::Op('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')', "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                let mut primes = Vec::new();
                while let Tok::Prime(slot) = self.peek().clone() {
                    primes.push((slot, self.offset()));
                    self.bump();
                }
                if *self.peek() == Tok::Op('(') {
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while *self.peek() == Tok::Op(',') {
                        self.bump();
                        args.push(self.expr()?);
                    }
                    self.expect(')', "`)` or `,`")?;
                    self.application(name, primes, args, at)
                } else if !primes.is_empty() {
                    Err(ParseError {
                        kind: ParseErrorKind::BadDerivative(name),
                        offset: primes[0].1,
                    })
                } else if let Some(s) = Symbol::from_jet_name(&name) {
                    Ok(Expr::Sym(s))
                } else if self.table.is_param(&name) {
                    Ok(Expr::Sym(Symbol::Param(name)))
                } else {
                    Err(ParseError {
                        kind: ParseErrorKind::UnknownSymbol(name),
                        offset: at,
                    })
                }
            }
            _ => self.unexpected(),
        }
    }

    fn application(
        &self,
        name: String,
        primes: Vec<(Option<usize>, usize)>,
        args: Vec<Expr>,
        at: usize,
    ) -> Result<Expr, ParseError> {
        let def = match self.table.get(&name) {
            Some(d) => d,
            None => {
                return Err(ParseError {
                    kind: ParseErrorKind::UnknownFunction(name),
                    offset: at,
                })
            }
        };
        if def.arity() != args.len() {
            return Err(ParseError {
                kind: ParseErrorKind::Arity {
                    name,
                    expected: def.arity(),
                    got: args.len(),
                },
                offset: at,
            });
        }
        let mut derivs = vec![0u8; args.len()];
        for (slot, off) in primes {
            let idx = match slot {
                None if args.len() == 1 => 0,
                Some(k) if k >= 1 && k <= args.len() => k - 1,
                _ => {
                    return Err(ParseError {
                        kind: ParseErrorKind::BadDerivative(name),
                        offset: off,
                    })
                }
            };
            derivs[idx] += 1;
        }
        Ok(Expr::Func(FuncApp { name, derivs, args }))
    }
}

/// Parses `text` into a normalized expression.
pub fn parse(text: &str, table: &FunctionTable) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, table };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.unexpected();
    }
    Ok(normalize(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rational;

    fn t() -> FunctionTable {
        FunctionTable::burgers()
    }

    #[test]
    fn grammar_maps_directly() {
        let e = parse("u_t + a(u)*u_x", &t()).unwrap();
        let a = Expr::call("a", vec![Expr::u()]);
        assert_eq!(
            e,
            Expr::Sum(vec![Expr::u_t(), Expr::Product(vec![a.clone(), Expr::u_x()])])
        );
        let e = parse("x - t*a(u)", &t()).unwrap();
        assert_eq!(
            e,
            Expr::Sum(vec![Expr::x(), Expr::Neg(Box::new(Expr::Product(vec![Expr::t(), a])))])
        );
    }

    #[test]
    fn unbalanced_paren_reports_offset() {
        let err = parse("u_x^(2", &t()).unwrap_err();
        assert_eq!(err.offset, 6);
        assert!(matches!(err.kind, ParseErrorKind::Expected(_)));
    }

    #[test]
    fn unknown_symbols() {
        let err = parse("u + w", &t()).unwrap_err();
        assert_eq!(
            err,
            ParseError {
                kind: ParseErrorKind::UnknownSymbol("w".into()),
                offset: 4
            }
        );
        let err = parse("g(u)", &t()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownFunction("g".into()));
        let err = parse("a(u, x)", &t()).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Arity { .. }));
    }

    #[test]
    fn precedence_and_associativity() {
        let tb = t();
        assert_eq!(parse("2^3^2", &tb).unwrap(), Expr::int(512));
        assert_eq!(parse("-u^2", &tb).unwrap(), parse("-(u^2)", &tb).unwrap());
        assert_eq!(parse("-u*u_x", &tb).unwrap(), parse("-(u*u_x)", &tb).unwrap());
        assert_eq!(parse("1 - 2 - 3", &tb).unwrap(), Expr::int(-4));
        assert_eq!(parse("12/4/3", &tb).unwrap(), Expr::int(1));
        assert_eq!(parse("u^-1", &tb).unwrap(), Expr::u().recip());
        assert_eq!(parse("u^(1/2)", &tb).unwrap(), Expr::u().pow(rational(1, 2)));
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse("0.25", &t()).unwrap(), Expr::ratio(1, 4));
        assert_eq!(parse("1.5*u", &t()).unwrap(), parse("3*u/2", &t()).unwrap());
        assert_eq!(parse(".5", &t()).unwrap(), Expr::ratio(1, 2));
    }

    #[test]
    fn mixed_jets_are_canonical() {
        assert_eq!(parse("u_tx - u_xt", &t()).unwrap(), Expr::zero());
        assert_eq!(
            parse("u_txx", &t()).unwrap(),
            Expr::Sym(Symbol::jet(crate::expr::Field::U, 2, 1))
        );
    }

    #[test]
    fn primes_mark_derivatives() {
        let e = parse("a''(u)", &t()).unwrap();
        assert_eq!(e, Expr::call_derived("a", 2, Expr::u()));
        let mut tb = FunctionTable::new();
        tb.register_primed("g", vec![Symbol::T, Symbol::X]).unwrap();
        let e = parse("g'2'2'1(t, x)", &tb).unwrap();
        match e {
            Expr::Func(app) => assert_eq!(app.derivs, vec![1, 2]),
            other => panic!("{other:?}"),
        }
        assert!(parse("g'(t, x)", &tb).is_err());
        assert!(parse("u'", &tb).is_err());
    }

    #[test]
    fn exponent_must_be_constant() {
        let err = parse("u^x", &t()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::NonConstantExponent);
        assert_eq!(err.offset, 2);
    }

    #[test]
    fn trailing_garbage() {
        assert!(parse("u u", &t()).is_err());
        assert!(parse("", &t()).is_err());
        assert!(parse("u + #", &t()).is_err());
    }
}

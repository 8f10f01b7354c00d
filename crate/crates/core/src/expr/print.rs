//! Infix printing. Output re-parses to the same normalized tree.

use std::fmt::{self, Write};

use num::{One, Signed};

use super::{Expr, FuncApp, Rational};

const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POWER: u8 = 4;
const PREC_ATOM: u8 = 5;

/// `1/(q + r)^2` would re-parse with the square expanded, so such powers
/// print as `(q + r)^(-2)`.
fn inline_negative_power(b: &Expr, r: &Rational) -> bool {
    matches!(b, Expr::Sum(_)) && r.is_integer() && !(-r).is_one()
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Pow(b, r) if r.is_negative() && inline_negative_power(b, r) => PREC_POWER,
        Expr::Sum(_) => PREC_SUM,
        Expr::Product(_) => PREC_PRODUCT,
        Expr::Neg(_) => PREC_UNARY,
        Expr::Pow(_, r) if r.is_negative() => PREC_PRODUCT,
        Expr::Pow(..) => PREC_POWER,
        Expr::Const(c) if c.is_negative() => PREC_UNARY,
        Expr::Const(c) if !c.is_integer() => PREC_PRODUCT,
        _ => PREC_ATOM,
    }
}

fn write_rational(out: &mut String, r: &Rational) {
    if r.is_integer() {
        write!(out, "{}", r.numer()).unwrap();
    } else {
        write!(out, "{}/{}", r.numer(), r.denom()).unwrap();
    }
}

fn write_wrapped(out: &mut String, e: &Expr, min_prec: u8) {
    if precedence(e) < min_prec {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}

fn write_func(out: &mut String, app: &FuncApp) {
    out.push_str(&app.name);
    if app.args.len() == 1 {
        for _ in 0..app.derivs[0] {
            out.push('\'');
        }
    } else {
        for (i, &k) in app.derivs.iter().enumerate() {
            for _ in 0..k {
                write!(out, "'{}", i + 1).unwrap();
            }
        }
    }
    out.push('(');
    for (i, a) in app.args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, a);
    }
    out.push(')');
}

/// Splits a product into sign, numerator and denominator pieces.
fn write_product(out: &mut String, factors: &[Expr]) {
    let mut coeff = Rational::one();
    let mut num: Vec<Expr> = Vec::new();
    let mut den: Vec<Expr> = Vec::new();
    for f in factors {
        match f {
            Expr::Const(c) => coeff *= c,
            Expr::Pow(b, r) if r.is_negative() && !inline_negative_power(b, r) => {
                let r = -r;
                den.push(if r.is_one() {
                    (**b).clone()
                } else {
                    Expr::Pow(b.clone(), r)
                });
            }
            other => num.push(other.clone()),
        }
    }
    if coeff.is_negative() {
        out.push('-');
        coeff = -coeff;
    }
    let numer = coeff.numer().clone();
    let denom = coeff.denom().clone();
    let mut first = true;
    if !numer.is_one() || num.is_empty() {
        write!(out, "{numer}").unwrap();
        first = false;
    }
    for f in &num {
        if !first {
            out.push('*');
        }
        write_wrapped(out, f, PREC_POWER);
        first = false;
    }
    let den_count = den.len() + usize::from(!denom.is_one());
    if den_count == 0 {
        return;
    }
    // `(p*(q + r))^-1` would re-parse as `(p*q + p*r)^-1`, so denominators
    // with a sum are chained as `/p/(q + r)` instead of grouped.
    let has_sum = |f: &Expr| match f {
        Expr::Sum(_) => true,
        Expr::Pow(b, _) => matches!(**b, Expr::Sum(_)),
        _ => false,
    };
    let group = den_count > 1 && !den.iter().any(has_sum);
    let sep = if group { "*" } else { "/" };
    out.push('/');
    if group {
        out.push('(');
    }
    let mut first = true;
    if !denom.is_one() {
        write!(out, "{denom}").unwrap();
        first = false;
    }
    for f in &den {
        if !first {
            out.push_str(sep);
        }
        write_wrapped(out, f, PREC_POWER);
        first = false;
    }
    if group {
        out.push(')');
    }
}

/// A term printed after a binary minus, if it carries a leading sign.
fn negated_term(e: &Expr) -> Option<Expr> {
    match e {
        Expr::Neg(inner) => Some((**inner).clone()),
        Expr::Const(c) if c.is_negative() => Some(Expr::Const(-c)),
        Expr::Product(fs) => match fs.first() {
            Some(Expr::Const(c)) if c.is_negative() => {
                let mut fs = fs.clone();
                fs[0] = Expr::Const(-c);
                if fs[0].is_const_one() {
                    fs.remove(0);
                }
                Some(super::product(fs))
            }
            _ => None,
        },
        _ => None,
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Const(c) => write_rational(out, c),
        Expr::Sym(s) => write!(out, "{s}").unwrap(),
        Expr::Func(app) => write_func(out, app),
        Expr::Sum(terms) => {
            for (i, t) in terms.iter().enumerate() {
                if i == 0 {
                    write_wrapped(out, t, PREC_SUM + 1);
                    continue;
                }
                match negated_term(t) {
                    Some(pos) => {
                        out.push_str(" - ");
                        write_wrapped(out, &pos, PREC_PRODUCT);
                    }
                    None => {
                        out.push_str(" + ");
                        write_wrapped(out, t, PREC_PRODUCT);
                    }
                }
            }
        }
        Expr::Product(fs) => write_product(out, fs),
        Expr::Pow(b, r) if r.is_negative() && !inline_negative_power(b, r) => {
            write_product(out, std::slice::from_ref(e))
        }
        Expr::Pow(b, r) => {
            write_wrapped(out, b, PREC_ATOM);
            out.push('^');
            if r.is_integer() && !r.is_negative() {
                write_rational(out, r);
            } else {
                out.push('(');
                write_rational(out, r);
                out.push(')');
            }
        }
        Expr::Neg(inner) => {
            out.push('-');
            write_wrapped(out, inner, PREC_UNARY);
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(&mut s, self);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{parse, Expr, FunctionTable};

    fn roundtrip(s: &str) -> String {
        let t = FunctionTable::burgers();
        let e = parse(s, &t).unwrap();
        let printed = e.to_string();
        assert_eq!(parse(&printed, &t).unwrap(), e, "{s} -> {printed}");
        printed
    }

    #[test]
    fn prints_readably() {
        assert_eq!(roundtrip("u_t + a(u)*u_x"), "u_t + a(u)*u_x");
        assert_eq!(roundtrip("x - t*a(u)"), "x - t*a(u)");
        assert_eq!(roundtrip("(x - t*a(u))/a'(u)"), "x/a'(u) - t*a(u)/a'(u)");
        assert_eq!(roundtrip("u^2/2"), "u^2/2");
        assert_eq!(roundtrip("-u/(2*a'(u))"), "-u/(2*a'(u))");
        assert_eq!(roundtrip("1/u"), "1/u");
        assert_eq!(roundtrip("u^(1/2)"), "u^(1/2)");
        assert_eq!(roundtrip("1/(u + 1)^2"), "1/(1 + 2*u + u^2)");
        assert_eq!(roundtrip("-3"), "-3");
        assert_eq!(roundtrip("2^(1/2)*u"), "2^(1/2)*u");
    }

    #[test]
    fn negative_terms_print_with_minus() {
        assert_eq!(roundtrip("u - 2*u_x - 3/4"), "-3/4 + u - 2*u_x");
        assert_eq!(roundtrip("(-2)^(1/3)"), "(-2)^(1/3)");
    }

    #[test]
    fn denominators_with_sums_are_chained() {
        let t = FunctionTable::burgers();
        let e = crate::expr::normalize(&(Expr::t().recip() * (Expr::one() + Expr::u()).recip() * Expr::ratio(1, 2)));
        let printed = e.to_string();
        assert_eq!(printed, "1/2/t/(1 + u)");
        assert_eq!(parse(&printed, &t).unwrap(), e);
        assert_eq!(roundtrip("x/(2*t*a'(u))"), "x/(2*t*a'(u))");
        assert_eq!(roundtrip("(1 + u)^(-2)"), "(1 + u)^(-2)");
    }
}

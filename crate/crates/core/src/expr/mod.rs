//! Symbolic expressions over jet coordinates.
//!
//! An [`Expr`] is an immutable tree. Constructors and the arithmetic operator
//! impls build raw trees; every public operation that produces an expression
//! (parse, diff, substitute, total derivatives, ...) returns it in normal form
//! (see [`normalize`]).

mod diff;
mod eval;
mod functions;
mod normalize;
mod parse;
mod poly;
mod print;
mod zero;

use std::collections::BTreeSet;
use std::fmt;
use std::ops;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

pub use diff::{diff, expand_rewrite, substitute, DiffError};
pub use eval::{eval, eval_scaled, EvalError, FunctionInstantiation, Instance, JetPoint};
pub use functions::{DerivativeRule, FunctionDef, FunctionTable, TableError};
pub use normalize::normalize;
pub use parse::{parse, ParseError, ParseErrorKind};
pub use poly::{expr_to_polynomial, MultiPolynomial, Polynomial};
pub use zero::{
    default_instantiations, is_zero, parse_instantiation, Witness, ZeroTestConfig, ZeroTestError, ZeroVerdict,
};

/// Exact rational number used for constants and exponents.
pub type Rational = BigRational;

pub fn rational(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn integer(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// The dependent field a jet symbol belongs to: the solution `u` or the
/// adjoint variable `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    U,
    V,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::U => "u",
            Field::V => "v",
        }
    }
}

/// Independent direction of a total or partial derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    T,
    X,
}

/// A coordinate on the jet space, or a named scalar parameter.
///
/// Mixed derivatives are stored as counts, so `u_xt` and `u_tx` are the same
/// symbol.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    T,
    X,
    Jet { field: Field, dx: u8, dt: u8 },
    Param(String),
}

impl Symbol {
    pub const fn jet(field: Field, dx: u8, dt: u8) -> Symbol {
        Symbol::Jet { field, dx, dt }
    }

    pub const fn u() -> Symbol {
        Symbol::jet(Field::U, 0, 0)
    }
    pub const fn u_x() -> Symbol {
        Symbol::jet(Field::U, 1, 0)
    }
    pub const fn u_t() -> Symbol {
        Symbol::jet(Field::U, 0, 1)
    }
    pub const fn u_xx() -> Symbol {
        Symbol::jet(Field::U, 2, 0)
    }
    pub const fn u_xt() -> Symbol {
        Symbol::jet(Field::U, 1, 1)
    }
    pub const fn u_tt() -> Symbol {
        Symbol::jet(Field::U, 0, 2)
    }
    pub const fn v() -> Symbol {
        Symbol::jet(Field::V, 0, 0)
    }
    pub const fn v_x() -> Symbol {
        Symbol::jet(Field::V, 1, 0)
    }
    pub const fn v_t() -> Symbol {
        Symbol::jet(Field::V, 0, 1)
    }

    /// Total derivative order of a jet symbol; zero for everything else.
    pub fn order(&self) -> u32 {
        match self {
            Symbol::Jet { dx, dt, .. } => u32::from(*dx) + u32::from(*dt),
            _ => 0,
        }
    }

    /// The jet symbol obtained by one more derivative in `dir`.
    pub fn shifted(&self, dir: Direction) -> Option<Symbol> {
        match *self {
            Symbol::Jet { field, dx, dt } => Some(match dir {
                Direction::X => Symbol::jet(field, dx + 1, dt),
                Direction::T => Symbol::jet(field, dx, dt + 1),
            }),
            _ => None,
        }
    }

    /// Recognizes `t`, `x` and the jet alphabet `u`, `v`, `u_x`, `u_tx`, ...
    pub fn from_jet_name(name: &str) -> Option<Symbol> {
        match name {
            "t" => return Some(Symbol::T),
            "x" => return Some(Symbol::X),
            _ => {}
        }
        let (field, rest) = match name.as_bytes().first()? {
            b'u' => (Field::U, &name[1..]),
            b'v' => (Field::V, &name[1..]),
            _ => return None,
        };
        if rest.is_empty() {
            return Some(Symbol::jet(field, 0, 0));
        }
        let subs = rest.strip_prefix('_')?;
        if subs.is_empty() {
            return None;
        }
        let (mut dx, mut dt) = (0u8, 0u8);
        for c in subs.chars() {
            match c {
                'x' => dx = dx.checked_add(1)?,
                't' => dt = dt.checked_add(1)?,
                _ => return None,
            }
        }
        Some(Symbol::jet(field, dx, dt))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::T => f.write_str("t"),
            Symbol::X => f.write_str("x"),
            Symbol::Param(name) => f.write_str(name),
            Symbol::Jet { field, dx, dt } => {
                f.write_str(field.name())?;
                if dx + dt > 0 {
                    f.write_str("_")?;
                    for _ in 0..*dx {
                        f.write_str("x")?;
                    }
                    for _ in 0..*dt {
                        f.write_str("t")?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Application of an opaque function symbol. `derivs[i]` counts the partial
/// derivatives taken with respect to argument `i`, so `a'(u)` is `a` with
/// `derivs = [1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuncApp {
    pub name: String,
    pub derivs: Vec<u8>,
    pub args: Vec<Expr>,
}

impl FuncApp {
    pub fn is_underived(&self) -> bool {
        self.derivs.iter().all(|&d| d == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Const(Rational),
    Sym(Symbol),
    Func(FuncApp),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, Rational),
    Neg(Box<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Const(integer(n))
    }

    pub fn ratio(n: i64, d: i64) -> Expr {
        Expr::Const(rational(n, d))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(s: Symbol) -> Expr {
        Expr::Sym(s)
    }

    pub fn t() -> Expr {
        Expr::Sym(Symbol::T)
    }
    pub fn x() -> Expr {
        Expr::Sym(Symbol::X)
    }
    pub fn u() -> Expr {
        Expr::Sym(Symbol::u())
    }
    pub fn u_x() -> Expr {
        Expr::Sym(Symbol::u_x())
    }
    pub fn u_t() -> Expr {
        Expr::Sym(Symbol::u_t())
    }
    pub fn v() -> Expr {
        Expr::Sym(Symbol::v())
    }

    /// Underived application `name(args)`.
    pub fn call(name: &str, args: Vec<Expr>) -> Expr {
        let derivs = vec![0; args.len()];
        Expr::Func(FuncApp {
            name: name.to_string(),
            derivs,
            args,
        })
    }

    /// `name^(order)(arg)` for a univariate symbol.
    pub fn call_derived(name: &str, order: u8, arg: Expr) -> Expr {
        Expr::Func(FuncApp {
            name: name.to_string(),
            derivs: vec![order],
            args: vec![arg],
        })
    }

    pub fn pow(self, exponent: Rational) -> Expr {
        Expr::Pow(Box::new(self), exponent)
    }

    pub fn powi(self, exponent: i64) -> Expr {
        self.pow(integer(exponent))
    }

    pub fn recip(self) -> Expr {
        self.powi(-1)
    }

    pub fn normalized(&self) -> Expr {
        normalize(self)
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_const_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    pub fn is_const_one(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_one())
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Const(_) | Expr::Sym(_) => Vec::new(),
            Expr::Func(app) => app.args.iter().collect(),
            Expr::Sum(xs) | Expr::Product(xs) => xs.iter().collect(),
            Expr::Pow(b, _) => vec![b],
            Expr::Neg(e) => vec![e],
        }
    }

    /// Every symbol occurring anywhere in the tree, including inside
    /// function arguments.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Sym(s) = e {
                out.insert(s.clone());
            }
        });
        out
    }

    /// Names of all function symbols applied anywhere in the tree.
    pub fn function_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Func(app) = e {
                out.insert(app.name.clone());
            }
        });
        out
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if matches!(e, Expr::Sym(x) if x == s) {
                found = true;
            }
        });
        found
    }

    /// Pre-order traversal.
    pub fn visit<F: FnMut(&Expr)>(&self, f: &mut F) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Highest jet order of any symbol in the tree.
    pub fn max_jet_order(&self) -> u32 {
        self.symbols().iter().map(Symbol::order).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Expr {
        Expr::Sym(s)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(r: Rational) -> Expr {
        Expr::Const(r)
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, rhs])
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, Expr::Neg(Box::new(rhs))])
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Product(vec![self, rhs])
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Product(vec![self, rhs.recip()])
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl<'a> ops::Add for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &'a Expr) -> Expr {
        self.clone() + rhs.clone()
    }
}

impl<'a> ops::Sub for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &'a Expr) -> Expr {
        self.clone() - rhs.clone()
    }
}

impl<'a> ops::Mul for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &'a Expr) -> Expr {
        self.clone() * rhs.clone()
    }
}

/// Sum of many operands without intermediate nesting.
pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
    let terms: Vec<Expr> = terms.into_iter().collect();
    match terms.len() {
        0 => Expr::zero(),
        1 => terms.into_iter().next().unwrap(),
        _ => Expr::Sum(terms),
    }
}

pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
    let factors: Vec<Expr> = factors.into_iter().collect();
    match factors.len() {
        0 => Expr::one(),
        1 => factors.into_iter().next().unwrap(),
        _ => Expr::Product(factors),
    }
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Huge components: scale down before dividing.
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

pub(crate) fn is_negative(r: &Rational) -> bool {
    r.is_negative()
}

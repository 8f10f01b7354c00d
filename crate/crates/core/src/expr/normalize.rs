//! Canonical form.
//!
//! An expression is flattened into a sum of `coefficient * monomial` terms,
//! where a monomial maps atomic bases (symbols, function applications,
//! non-expandable sums) to rational exponents. Products distribute over sums
//! whose net exponent is a small positive integer; sums raised to negative or
//! fractional powers stay atomic, with their rational content pulled out so
//! that `(2x + 2)^-1` and `(x + 1)^-1 / 2` share one spelling.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num::{BigInt, One, Signed, ToPrimitive, Zero};

use super::Field;
use super::{Expr, FuncApp, Rational, Symbol};

type Monomial = BTreeMap<Expr, Rational>;

/// Polynomial over atoms: monomial -> coefficient. Zero coefficients are
/// never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct TermMap {
    terms: BTreeMap<Monomial, Rational>,
}

const MAX_EXPANSION_POWER: u32 = 32;

impl TermMap {
    fn constant(c: Rational) -> TermMap {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::new(), c);
        }
        TermMap { terms }
    }

    fn atom(base: Expr) -> TermMap {
        let mut m = Monomial::new();
        m.insert(base, Rational::one());
        let mut terms = BTreeMap::new();
        terms.insert(m, Rational::one());
        TermMap { terms }
    }

    fn monomial(coeff: Rational, m: Monomial) -> TermMap {
        let mut out = TermMap::default();
        out.add_term(m, coeff);
        out
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn single(&self) -> Option<(&Monomial, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn add(&mut self, other: TermMap) {
        for (m, c) in other.terms {
            self.add_term(m, c);
        }
    }

    fn negate(mut self) -> TermMap {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }

    fn scale(mut self, k: &Rational) -> TermMap {
        if k.is_zero() {
            return TermMap::default();
        }
        for c in self.terms.values_mut() {
            *c = &*c * k;
        }
        self
    }

    /// Full distribution of one polynomial over another.
    fn mul(&self, other: &TermMap) -> TermMap {
        let mut out = TermMap::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m = m1.clone();
                for (b, e) in m2 {
                    merge_factor(&mut m, b.clone(), e.clone());
                }
                let (k, m) = clean_monomial(m);
                out.add_term(m, c1 * c2 * k);
            }
        }
        out
    }

    fn pow_expand(&self, n: u32) -> TermMap {
        let mut acc = TermMap::constant(Rational::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Splits off the coefficient of the first stored term so the remaining
    /// sum has leading coefficient one.
    fn content_split(self) -> (Rational, TermMap) {
        let c = match self.terms.values().next() {
            Some(c) => c.clone(),
            None => return (Rational::zero(), self),
        };
        let inv = c.recip();
        (c, self.scale(&inv))
    }
}

fn merge_factor(m: &mut Monomial, base: Expr, e: Rational) {
    let slot = m.entry(base).or_insert_with(Rational::zero);
    *slot += e;
}

/// Drops zero exponents and folds integer powers of constant bases into a
/// coefficient. Every negative power of zero collapses to the single
/// division-by-zero marker `0^(-1)`.
fn clean_monomial(m: Monomial) -> (Rational, Monomial) {
    let mut coeff = Rational::one();
    let mut out = Monomial::new();
    for (b, e) in m {
        if e.is_zero() {
            continue;
        }
        if let Expr::Const(c) = &b {
            if c.is_zero() && e.is_negative() {
                out.insert(b, -Rational::one());
                continue;
            }
            if e.is_integer() {
                coeff *= rational_powi(c, &e);
                continue;
            }
        }
        out.insert(b, e);
    }
    (coeff, out)
}

fn rational_powi(c: &Rational, e: &Rational) -> Rational {
    let n = e.to_integer().to_i32().expect("exponent magnitude fits i32");
    num::pow::Pow::pow(c, n)
}

/// Exact `c^r` where possible; otherwise returns the leftover atom.
fn const_pow(c: &Rational, r: &Rational) -> (Rational, Option<(Expr, Rational)>) {
    if r.is_integer() {
        if c.is_zero() && r.is_negative() {
            return (Rational::one(), Some((Expr::Const(c.clone()), -Rational::one())));
        }
        return (rational_powi(c, r), None);
    }
    if c.is_zero() {
        return if r.is_positive() {
            (Rational::zero(), None)
        } else {
            (Rational::one(), Some((Expr::Const(c.clone()), -Rational::one())))
        };
    }
    if c.is_one() {
        return (Rational::one(), None);
    }
    if c.is_positive() {
        if let Some(q) = r.denom().to_u32() {
            if let (Some(n), Some(d)) = (exact_root(c.numer(), q), exact_root(c.denom(), q)) {
                let root = Rational::new(n, d);
                let p = Rational::from_integer(r.numer().clone());
                return (rational_powi(&root, &p), None);
            }
        }
    }
    (Rational::one(), Some((Expr::Const(c.clone()), r.clone())))
}

fn exact_root(n: &BigInt, q: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let root = n.nth_root(q);
    if num::pow::Pow::pow(&root, q) == *n {
        Some(root)
    } else {
        None
    }
}

fn to_terms(e: &Expr) -> TermMap {
    match e {
        Expr::Const(c) => TermMap::constant(c.clone()),
        Expr::Sym(_) => TermMap::atom(e.clone()),
        Expr::Func(app) => TermMap::atom(Expr::Func(FuncApp {
            name: app.name.clone(),
            derivs: app.derivs.clone(),
            args: app.args.iter().map(normalize).collect(),
        })),
        Expr::Neg(inner) => to_terms(inner).negate(),
        Expr::Sum(xs) => {
            let mut acc = TermMap::default();
            for x in xs {
                acc.add(to_terms(x));
            }
            acc
        }
        Expr::Product(xs) => {
            let mut acc = Accumulator::new();
            for x in xs {
                if !acc.push(to_terms(x)) {
                    return TermMap::default();
                }
            }
            acc.finish()
        }
        Expr::Pow(base, r) => pow_terms(to_terms(base), r),
    }
}

fn pow_terms(base: TermMap, r: &Rational) -> TermMap {
    if r.is_zero() {
        return TermMap::constant(Rational::one());
    }
    if base.is_zero() {
        return if r.is_positive() {
            TermMap::default()
        } else {
            TermMap::atom(Expr::Const(Rational::zero())).raise(&-Rational::one())
        };
    }
    if let Some((m, c)) = base.single() {
        let mut acc = Accumulator::new();
        let (k, leftover) = const_pow(c, r);
        acc.coeff = k;
        if let Some((b, e)) = leftover {
            acc.factor(b, e);
        }
        for (b, e) in m {
            acc.factor(b.clone(), e * r);
        }
        return acc.finish();
    }
    if r.is_integer() {
        if let Some(n) = r.to_integer().to_u32() {
            if n <= MAX_EXPANSION_POWER {
                return base.pow_expand(n);
            }
        }
        let (c, rest) = base.content_split();
        let mut acc = Accumulator::new();
        acc.coeff = rational_powi(&c, r);
        acc.factor(from_terms(&rest), r.clone());
        return acc.finish();
    }
    let mut m = Monomial::new();
    m.insert(from_terms(&base), r.clone());
    TermMap::monomial(Rational::one(), m)
}

impl TermMap {
    fn raise(self, r: &Rational) -> TermMap {
        let mut out = TermMap::default();
        for (m, c) in self.terms {
            let m = m.into_iter().map(|(b, e)| (b, e * r)).collect();
            out.add_term(m, c);
        }
        out
    }
}

/// Collects the operands of a product, merging equal bases (including
/// atomic sums) before anything is expanded, so `(x + 1) / (x + 1)` cancels.
struct Accumulator {
    coeff: Rational,
    factors: Monomial,
    sums: BTreeMap<Expr, Rational>,
}

impl Accumulator {
    fn new() -> Accumulator {
        Accumulator {
            coeff: Rational::one(),
            factors: Monomial::new(),
            sums: BTreeMap::new(),
        }
    }

    fn factor(&mut self, base: Expr, e: Rational) {
        if matches!(base, Expr::Sum(_)) {
            merge_factor(&mut self.sums, base, e);
        } else {
            merge_factor(&mut self.factors, base, e);
        }
    }

    /// Returns false once the product is known to vanish.
    fn push(&mut self, t: TermMap) -> bool {
        if t.is_zero() {
            return false;
        }
        if let Some((m, c)) = t.single() {
            self.coeff *= c;
            for (b, e) in m {
                self.factor(b.clone(), e.clone());
            }
        } else {
            let (c, rest) = t.content_split();
            self.coeff *= c;
            self.factor(from_terms(&rest), Rational::one());
        }
        true
    }

    fn finish(self) -> TermMap {
        let (k, m) = clean_monomial(self.factors);
        let mut out = TermMap::monomial(self.coeff * k, m);
        for (s, e) in self.sums {
            if e.is_zero() || out.is_zero() {
                continue;
            }
            let expand =
                e.is_integer() && e.is_positive() && e.to_integer().to_u32().is_some_and(|n| n <= MAX_EXPANSION_POWER);
            if expand {
                let n = e.to_integer().to_u32().unwrap();
                out = out.mul(&to_terms(&s).pow_expand(n));
            } else {
                let mut m = Monomial::new();
                m.insert(s, e);
                out = out.mul(&TermMap::monomial(Rational::one(), m));
            }
        }
        out
    }
}

fn atom_rank(e: &Expr) -> u8 {
    match e {
        Expr::Const(_) => 0,
        Expr::Sym(Symbol::T) | Expr::Sym(Symbol::X) => 1,
        Expr::Sym(Symbol::Param(_)) => 2,
        Expr::Func(_) => 3,
        Expr::Sym(Symbol::Jet { field: Field::U, .. }) => 4,
        Expr::Sym(Symbol::Jet { field: Field::V, .. }) => 5,
        Expr::Sum(_) => 6,
        _ => 7,
    }
}

/// Display order of factors: independent variables, parameters, function
/// symbols, then the fields `u` and `v`.
pub(crate) fn atom_cmp(a: &Expr, b: &Expr) -> Ordering {
    atom_rank(a).cmp(&atom_rank(b)).then_with(|| a.cmp(b))
}

fn sorted_factors(m: &Monomial) -> Vec<(&Expr, &Rational)> {
    let mut fs: Vec<_> = m.iter().collect();
    fs.sort_by(|(a, ea), (b, eb)| atom_cmp(a, b).then_with(|| ea.cmp(eb)));
    fs
}

fn term_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        let fa = sorted_factors(a);
        let fb = sorted_factors(b);
        for ((ba, ea), (bb, eb)) in fa.iter().zip(fb.iter()) {
            let o = atom_cmp(ba, bb).then_with(|| ea.cmp(eb));
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    })
}

fn term_expr(m: &Monomial, c: &Rational) -> Expr {
    let factors: Vec<Expr> = sorted_factors(m)
        .into_iter()
        .map(|(b, e)| {
            if e.is_one() {
                b.clone()
            } else {
                Expr::Pow(Box::new(b.clone()), e.clone())
            }
        })
        .collect();
    if factors.is_empty() {
        return Expr::Const(c.clone());
    }
    let body = if factors.len() == 1 {
        factors[0].clone()
    } else {
        Expr::Product(factors.clone())
    };
    if c.is_one() {
        body
    } else if (-c).is_one() {
        Expr::Neg(Box::new(body))
    } else {
        let mut all = Vec::with_capacity(factors.len() + 1);
        all.push(Expr::Const(c.clone()));
        all.extend(factors);
        Expr::Product(all)
    }
}

fn from_terms(t: &TermMap) -> Expr {
    // Division by zero is undefined; the marker absorbs everything around it.
    let undefined = |b: &Expr| match b {
        Expr::Const(c) => c.is_zero(),
        Expr::Pow(inner, _) => matches!(&**inner, Expr::Const(c) if c.is_zero()),
        _ => false,
    };
    if t.terms.keys().any(|m| m.keys().any(undefined)) {
        return Expr::Pow(Box::new(Expr::zero()), -Rational::one());
    }
    let mut terms: Vec<(&Monomial, &Rational)> = t.terms.iter().collect();
    terms.sort_by(|(a, _), (b, _)| term_cmp(a, b));
    let mut exprs: Vec<Expr> = terms.into_iter().map(|(m, c)| term_expr(m, c)).collect();
    match exprs.len() {
        0 => Expr::zero(),
        1 => exprs.pop().unwrap(),
        _ => Expr::Sum(exprs),
    }
}

/// Returns the canonical form of `e`: flattened, constant-folded, with like
/// terms and like factors combined. Idempotent.
pub fn normalize(e: &Expr) -> Expr {
    from_terms(&to_terms(e))
}

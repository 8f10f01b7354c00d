//! Random expression corpora shared by the integration tests.
#![allow(dead_code)]

use lieconserve::expr::{eval, product, rational, sum, FunctionInstantiation, Instance, JetPoint, Polynomial};
use lieconserve::{Expr, Symbol};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

/// `sum c_ijk t^i x^j u^k` with total degree at most `max_degree`, up to
/// five terms, integer coefficients in `[-3, 3]`.
pub fn poly_txu(max_degree: u32) -> impl Strategy<Value = Expr> {
    let monomial = (0..=max_degree, 0..=max_degree, 0..=max_degree)
        .prop_filter("degree bound", move |(i, j, k)| i + j + k <= max_degree);
    prop::collection::vec((-3i64..=3, monomial), 1..=5).prop_map(|terms| {
        sum(terms.into_iter().map(|(c, (i, j, k))| {
            product([
                Expr::int(c),
                Expr::t().powi(i as i64),
                Expr::x().powi(j as i64),
                Expr::u().powi(k as i64),
            ])
        }))
        .normalized()
    })
}

/// Like [`poly_txu`] in `u` only.
pub fn poly_u(max_degree: u32) -> impl Strategy<Value = Expr> {
    prop::collection::vec((-3i64..=3, 0..=max_degree), 1..=4)
        .prop_map(|terms| sum(terms.into_iter().map(|(c, k)| Expr::int(c) * Expr::u().powi(k as i64))).normalized())
}

/// Like [`poly_txu`] in `t` and `x` only.
pub fn poly_tx(max_degree: u32) -> impl Strategy<Value = Expr> {
    let monomial = (0..=max_degree, 0..=max_degree).prop_filter("degree bound", move |(i, j)| i + j <= max_degree);
    prop::collection::vec((-3i64..=3, monomial), 1..=4).prop_map(|terms| {
        sum(terms
            .into_iter()
            .map(|(c, (i, j))| Expr::int(c) * Expr::t().powi(i as i64) * Expr::x().powi(j as i64)))
        .normalized()
    })
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-4i64..=4).prop_map(Expr::int),
        (1i64..=5, 2i64..=7).prop_map(|(n, d)| Expr::Const(rational(n, d))),
        Just(Expr::t()),
        Just(Expr::x()),
        Just(Expr::u()),
        Just(Expr::u_x()),
        Just(Expr::u_t()),
        Just(Expr::sym(Symbol::u_xx())),
        Just(Expr::call("a", vec![Expr::u()])),
        Just(Expr::call_derived("a", 1, Expr::u())),
    ]
}

/// Expressions over the jet coordinates and `a(u)`, closed under `+ - * /`,
/// negation and small integer powers.
pub fn jet_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a / b),
            inner.clone().prop_map(|a| -a),
            (inner, -2i64..=3).prop_map(|(a, k)| a.powi(k)),
        ]
    })
}

/// Polynomial expressions (no division) over the same leaves.
pub fn jet_poly_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            inner.clone().prop_map(|a| -a),
            (inner, 0i64..=3).prop_map(|(a, k)| a.powi(k)),
        ]
    })
}

/// `n` values from `strategy`, the same on every run.
pub fn sample<S: Strategy>(strategy: S, n: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::deterministic();
    (0..n)
        .map(|_| strategy.new_tree(&mut runner).expect("strategy generates").current())
        .collect()
}

/// `a := 2 + u^2`, away from the poles of `1/a'` only where `u != 0`.
pub fn a_instantiation() -> FunctionInstantiation {
    FunctionInstantiation::new().with("a", Instance::Univariate(Polynomial::new(vec![2.0, 0.0, 1.0])))
}

/// A point with every jet coordinate up to second order set.
pub fn jet_point(values: [f64; 8]) -> JetPoint {
    let syms = [
        Symbol::T,
        Symbol::X,
        Symbol::u(),
        Symbol::u_x(),
        Symbol::u_t(),
        Symbol::u_xx(),
        Symbol::u_xt(),
        Symbol::u_tt(),
    ];
    let mut p = JetPoint::new().with_functions(a_instantiation());
    for (s, v) in syms.into_iter().zip(values) {
        p.set(s, v);
    }
    p
}

/// Coordinates in `[-1.5, -0.5] ∪ [0.5, 1.5]`.
pub fn coordinate() -> impl Strategy<Value = f64> {
    (0.5f64..1.5, any::<bool>()).prop_map(|(m, neg)| if neg { -m } else { m })
}

pub fn point_values() -> impl Strategy<Value = [f64; 8]> {
    prop::array::uniform8(coordinate())
}

/// Central difference of `e` in `s` at `p`, or `None` near a pole.
pub fn central_difference(e: &Expr, s: &Symbol, p: &JetPoint, h: f64) -> Option<f64> {
    let table = lieconserve::FunctionTable::burgers();
    let base = *p.values.get(s)?;
    let mut plus = p.clone();
    plus.set(s.clone(), base + h);
    let mut minus = p.clone();
    minus.set(s.clone(), base - h);
    let fp = eval(e, &plus, &table).ok()?;
    let fm = eval(e, &minus, &table).ok()?;
    Some((fp - fm) / (2.0 * h))
}

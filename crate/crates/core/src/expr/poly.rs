//! Floating-point polynomials used to instantiate opaque function symbols.

use super::{eval::Instance, rational_to_f64, Expr, FunctionInstantiation, Symbol};

/// Dense univariate polynomial, `coeffs[k]` multiplies `z^k`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Polynomial {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: f64) -> Polynomial {
        Polynomial::new(vec![c])
    }

    /// The identity `z`.
    pub fn identity() -> Polynomial {
        Polynomial::new(vec![0.0, 1.0])
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0.0) {
            self.coeffs.pop();
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: u32) -> Polynomial {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    /// Antiderivative vanishing at zero.
    pub fn integral(&self) -> Polynomial {
        let mut c = vec![0.0];
        c.extend(self.coeffs.iter().enumerate().map(|(k, &a)| a / (k as f64 + 1.0)));
        Polynomial::new(c)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|k| self.coeffs.get(k).copied().unwrap_or(0.0) + other.coeffs.get(k).copied().unwrap_or(0.0))
            .collect();
        Polynomial::new(c)
    }

    pub fn scale(&self, k: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::default();
        }
        let mut c = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::new(c)
    }

    pub fn powu(&self, n: u32) -> Polynomial {
        (0..n).fold(Polynomial::constant(1.0), |acc, _| acc.mul(self))
    }

    /// `self(inner(z))`.
    pub fn compose(&self, inner: &Polynomial) -> Polynomial {
        self.coeffs.iter().rev().fold(Polynomial::default(), |acc, &c| {
            acc.mul(inner).add(&Polynomial::constant(c))
        })
    }
}

/// Sparse multivariate polynomial in a fixed number of variables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MultiPolynomial {
    pub arity: usize,
    pub terms: Vec<(Vec<u32>, f64)>,
}

impl MultiPolynomial {
    pub fn eval(&self, args: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(exps, c)| c * exps.iter().zip(args).map(|(&e, &z)| z.powi(e as i32)).product::<f64>())
            .sum()
    }

    pub fn partial(&self, var: usize) -> MultiPolynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(exps, _)| exps[var] > 0)
            .map(|(exps, c)| {
                let mut e = exps.clone();
                e[var] -= 1;
                (e, c * f64::from(exps[var]))
            })
            .collect();
        MultiPolynomial {
            arity: self.arity,
            terms,
        }
    }

    pub fn derivative(&self, orders: &[u8]) -> MultiPolynomial {
        let mut p = self.clone();
        for (var, &k) in orders.iter().enumerate() {
            for _ in 0..k {
                p = p.partial(var);
            }
        }
        p
    }
}

/// Converts `e` into a polynomial in `var`, reading every function symbol
/// through its polynomial instantiation. Returns `None` for anything that is
/// not a polynomial in `var` (other symbols, negative or fractional powers,
/// non-polynomial instantiations).
pub fn expr_to_polynomial(e: &Expr, var: &Symbol, inst: &FunctionInstantiation) -> Option<Polynomial> {
    match e {
        Expr::Const(c) => Some(Polynomial::constant(rational_to_f64(c))),
        Expr::Sym(s) if s == var => Some(Polynomial::identity()),
        Expr::Sym(_) => None,
        Expr::Neg(x) => expr_to_polynomial(x, var, inst).map(|p| p.scale(-1.0)),
        Expr::Sum(xs) => xs.iter().try_fold(Polynomial::default(), |acc, x| {
            Some(acc.add(&expr_to_polynomial(x, var, inst)?))
        }),
        Expr::Product(xs) => xs.iter().try_fold(Polynomial::constant(1.0), |acc, x| {
            Some(acc.mul(&expr_to_polynomial(x, var, inst)?))
        }),
        Expr::Pow(b, r) => {
            if !r.is_integer() || super::is_negative(r) {
                return None;
            }
            let n: u32 = r.to_integer().try_into().ok()?;
            Some(expr_to_polynomial(b, var, inst)?.powu(n))
        }
        Expr::Func(app) => {
            if app.args.len() != 1 {
                return None;
            }
            let outer = match inst.get(&app.name)? {
                Instance::Univariate(p) => p.nth_derivative(u32::from(app.derivs[0])),
                _ => return None,
            };
            let inner = expr_to_polynomial(&app.args[0], var, inst)?;
            Some(outer.compose(&inner))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, FunctionTable};

    #[test]
    fn calculus_on_polynomials() {
        let p = Polynomial::new(vec![2.0, 0.0, 1.0]); // 2 + z^2
        assert_eq!(p.derivative(), Polynomial::new(vec![0.0, 2.0]));
        assert_eq!(p.integral(), Polynomial::new(vec![0.0, 2.0, 0.0, 1.0 / 3.0]));
        assert_eq!(p.eval(3.0), 11.0);
        let q = Polynomial::new(vec![1.0, 1.0]); // 1 + z
        assert_eq!(p.compose(&q).coeffs, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn multivariate_partials() {
        // 3 x y^2 + x
        let p = MultiPolynomial {
            arity: 2,
            terms: vec![(vec![1, 2], 3.0), (vec![1, 0], 1.0)],
        };
        assert_eq!(p.eval(&[2.0, 1.0]), 8.0);
        assert_eq!(p.derivative(&[0, 1]).eval(&[2.0, 1.0]), 12.0);
        assert_eq!(p.derivative(&[1, 2]).eval(&[5.0, 5.0]), 6.0);
    }

    #[test]
    fn converts_instantiated_expressions() {
        let t = FunctionTable::burgers();
        let mut inst = FunctionInstantiation::default();
        inst.set("a", Instance::Univariate(Polynomial::new(vec![2.0, 0.0, 1.0])));
        let e = parse("u*a(u) + a'(u)", &t).unwrap();
        let p = expr_to_polynomial(&e, &Symbol::u(), &inst).unwrap();
        assert_eq!(p.coeffs, vec![0.0, 4.0, 0.0, 1.0]);
        assert!(expr_to_polynomial(&parse("1/u", &t).unwrap(), &Symbol::u(), &inst).is_none());
        assert!(expr_to_polynomial(&parse("x*u", &t).unwrap(), &Symbol::u(), &inst).is_none());
    }
}

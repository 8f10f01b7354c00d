//! Floating-point evaluation at a jet point.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::diff::{expand_rewrite, DiffError};
use super::poly::{expr_to_polynomial, MultiPolynomial, Polynomial};
use super::{rational_to_f64, DerivativeRule, Expr, FunctionTable, Symbol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("no value for symbol `{0}`")]
    MissingSymbol(Symbol),
    #[error("function `{0}` has no instantiation")]
    MissingInstantiation(String),
    #[error("pole in `{0}`")]
    Pole(Expr),
    #[error("negative base with non-integer exponent in `{0}`")]
    NegativeBase(Expr),
    #[error("non-finite value in `{0}`")]
    NonFinite(Expr),
    #[error("derivative of opaquely instantiated `{0}` is unavailable")]
    OpaqueDerivative(String),
    #[error("instantiation of `{name}` has arity {expected}, applied to {got} arguments")]
    Arity { name: String, expected: usize, got: usize },
    #[error(transparent)]
    Diff(#[from] DiffError),
}

/// Concrete stand-in for an opaque function symbol.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Univariate(Polynomial),
    Multivariate(MultiPolynomial),
    /// A constant value. Only valid for symbols whose derivatives are always
    /// rewritten away (e.g. `phi` with `phi' = r*phi`).
    Opaque(f64),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FunctionInstantiation {
    map: BTreeMap<String, Instance>,
}

impl FunctionInstantiation {
    pub fn new() -> FunctionInstantiation {
        FunctionInstantiation::default()
    }

    pub fn with(mut self, name: &str, inst: Instance) -> FunctionInstantiation {
        self.set(name, inst);
        self
    }

    pub fn univariate(name: &str, coeffs: Vec<f64>) -> FunctionInstantiation {
        FunctionInstantiation::new().with(name, Instance::Univariate(Polynomial::new(coeffs)))
    }

    pub fn set(&mut self, name: &str, inst: Instance) {
        self.map.insert(name.to_string(), inst);
    }

    pub fn get(&self, name: &str) -> Option<&Instance> {
        self.map.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.map.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Instance)> {
        self.map.iter()
    }

    /// Instantiates every rewrite-rule symbol of `table` that is still
    /// missing: by the exact antiderivative (vanishing at zero) when its rule
    /// is polynomial under the current instantiation, otherwise by the
    /// constant `opaque_value`.
    pub fn resolve_rewrites(&mut self, table: &FunctionTable, opaque_value: f64) {
        loop {
            let mut progress = false;
            for def in table.functions() {
                if self.contains(&def.name) {
                    continue;
                }
                if let DerivativeRule::Rewrite(body) = &def.rule {
                    if let Some(p) = expr_to_polynomial(body, &def.signature[0], self) {
                        self.set(&def.name, Instance::Univariate(p.integral()));
                        progress = true;
                    }
                }
            }
            if !progress {
                break;
            }
        }
        for def in table.functions() {
            if matches!(def.rule, DerivativeRule::Rewrite(_)) && !self.contains(&def.name) {
                self.set(&def.name, Instance::Opaque(opaque_value));
            }
        }
    }
}

impl fmt::Display for FunctionInstantiation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, inst) in &self.map {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            match inst {
                Instance::Univariate(p) => {
                    write!(f, "{name} := ")?;
                    let mut wrote = false;
                    for (k, c) in p.coeffs.iter().enumerate() {
                        if *c == 0.0 {
                            continue;
                        }
                        if wrote {
                            f.write_str(" + ")?;
                        }
                        match k {
                            0 => write!(f, "{c}")?,
                            1 => write!(f, "{c}*z")?,
                            _ => write!(f, "{c}*z^{k}")?,
                        }
                        wrote = true;
                    }
                    if !wrote {
                        f.write_str("0")?;
                    }
                }
                Instance::Multivariate(p) => write!(f, "{name} := <polynomial in {} variables>", p.arity)?,
                Instance::Opaque(c) => write!(f, "{name} := {c} (opaque)")?,
            }
        }
        Ok(())
    }
}

/// Values for every symbol of an expression plus concrete functions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct JetPoint {
    pub values: BTreeMap<Symbol, f64>,
    pub functions: FunctionInstantiation,
}

impl JetPoint {
    pub fn new() -> JetPoint {
        JetPoint::default()
    }

    pub fn with(mut self, s: Symbol, value: f64) -> JetPoint {
        self.values.insert(s, value);
        self
    }

    pub fn with_functions(mut self, functions: FunctionInstantiation) -> JetPoint {
        self.functions = functions;
        self
    }

    pub fn set(&mut self, s: Symbol, value: f64) {
        self.values.insert(s, value);
    }
}

impl fmt::Display for JetPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (s, v)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s} = {v}")?;
        }
        f.write_str("}")?;
        if self.functions.iter().next().is_some() {
            write!(f, " with {}", self.functions)?;
        }
        Ok(())
    }
}

pub fn eval(e: &Expr, p: &JetPoint, table: &FunctionTable) -> Result<f64, EvalError> {
    eval_scaled(e, p, table).map(|(v, _)| v)
}

/// Value of `e` together with the largest magnitude of any evaluated
/// subterm, the scale against which cancellation is judged.
pub fn eval_scaled(e: &Expr, p: &JetPoint, table: &FunctionTable) -> Result<(f64, f64), EvalError> {
    let mut scale = 0.0f64;
    let v = walk(e, p, table, &mut scale)?;
    Ok((v, scale))
}

fn walk(e: &Expr, p: &JetPoint, table: &FunctionTable, scale: &mut f64) -> Result<f64, EvalError> {
    let v = match e {
        Expr::Const(c) => rational_to_f64(c),
        Expr::Sym(s) => *p.values.get(s).ok_or_else(|| EvalError::MissingSymbol(s.clone()))?,
        Expr::Neg(x) => -walk(x, p, table, scale)?,
        Expr::Sum(xs) => {
            let mut acc = 0.0;
            for x in xs {
                acc += walk(x, p, table, scale)?;
            }
            acc
        }
        Expr::Product(xs) => {
            let mut acc = 1.0;
            for x in xs {
                acc *= walk(x, p, table, scale)?;
            }
            acc
        }
        Expr::Pow(b, r) => {
            let base = walk(b, p, table, scale)?;
            if r.is_integer() {
                let n: i32 = r.to_integer().try_into().map_err(|_| EvalError::NonFinite(e.clone()))?;
                if base == 0.0 && n < 0 {
                    return Err(EvalError::Pole(e.clone()));
                }
                base.powi(n)
            } else {
                if base < 0.0 {
                    return Err(EvalError::NegativeBase(e.clone()));
                }
                let r = rational_to_f64(r);
                if base == 0.0 && r < 0.0 {
                    return Err(EvalError::Pole(e.clone()));
                }
                base.powf(r)
            }
        }
        Expr::Func(app) => {
            if let Some(expanded) = expand_rewrite(app, table)? {
                walk(&expanded, p, table, scale)?
            } else {
                let mut args = Vec::with_capacity(app.args.len());
                for a in &app.args {
                    args.push(walk(a, p, table, scale)?);
                }
                let inst = p
                    .functions
                    .get(&app.name)
                    .ok_or_else(|| EvalError::MissingInstantiation(app.name.clone()))?;
                match inst {
                    Instance::Univariate(poly) => {
                        if args.len() != 1 {
                            return Err(EvalError::Arity {
                                name: app.name.clone(),
                                expected: 1,
                                got: args.len(),
                            });
                        }
                        poly.nth_derivative(u32::from(app.derivs[0])).eval(args[0])
                    }
                    Instance::Multivariate(poly) => {
                        if args.len() != poly.arity {
                            return Err(EvalError::Arity {
                                name: app.name.clone(),
                                expected: poly.arity,
                                got: args.len(),
                            });
                        }
                        poly.derivative(&app.derivs).eval(&args)
                    }
                    Instance::Opaque(c) => {
                        if !app.is_underived() {
                            return Err(EvalError::OpaqueDerivative(app.name.clone()));
                        }
                        *c
                    }
                }
            }
        }
    };
    if !v.is_finite() {
        return Err(EvalError::NonFinite(e.clone()));
    }
    *scale = scale.max(v.abs());
    Ok(v)
}

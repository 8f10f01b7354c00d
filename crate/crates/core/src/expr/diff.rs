use thiserror::Error;

use super::{normalize, DerivativeRule, Expr, FuncApp, FunctionTable, Symbol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiffError {
    #[error("function `{0}` is not registered")]
    UnknownFunction(String),
    #[error("parameter `{0}` is not registered")]
    UnknownSymbol(String),
    #[error("`{name}` applied to {got} arguments, registered with {expected}")]
    Arity { name: String, expected: usize, got: usize },
}

/// Partial derivative of `e` with respect to the coordinate `s`, treating
/// every other jet symbol as independent. The result is normalized.
pub fn diff(e: &Expr, s: &Symbol, table: &FunctionTable) -> Result<Expr, DiffError> {
    if let Symbol::Param(name) = s {
        if !table.is_param(name) {
            return Err(DiffError::UnknownSymbol(name.clone()));
        }
    }
    Ok(match d(e, s, table)? {
        Some(de) => normalize(&de),
        None => Expr::zero(),
    })
}

/// `None` stands for an exact zero derivative.
fn d(e: &Expr, s: &Symbol, table: &FunctionTable) -> Result<Option<Expr>, DiffError> {
    Ok(match e {
        Expr::Const(_) => None,
        Expr::Sym(x) => (x == s).then(Expr::one),
        Expr::Neg(inner) => d(inner, s, table)?.map(|x| -x),
        Expr::Sum(xs) => {
            let mut parts = Vec::new();
            for x in xs {
                if let Some(dx) = d(x, s, table)? {
                    parts.push(dx);
                }
            }
            (!parts.is_empty()).then(|| super::sum(parts))
        }
        Expr::Product(xs) => {
            let mut parts = Vec::new();
            for (i, x) in xs.iter().enumerate() {
                if let Some(dx) = d(x, s, table)? {
                    let mut factors = xs.clone();
                    factors[i] = dx;
                    parts.push(Expr::Product(factors));
                }
            }
            (!parts.is_empty()).then(|| super::sum(parts))
        }
        Expr::Pow(base, r) => d(base, s, table)?.map(|db| {
            let lowered = Expr::Pow(base.clone(), r - super::integer(1));
            Expr::Product(vec![Expr::Const(r.clone()), lowered, db])
        }),
        Expr::Func(app) => {
            let def = lookup(app, table)?;
            let mut parts = Vec::new();
            for (i, arg) in app.args.iter().enumerate() {
                if let Some(da) = d(arg, s, table)? {
                    let partial = partial(app, i, &def.rule, &def.signature, table)?;
                    parts.push(partial * da);
                }
            }
            (!parts.is_empty()).then(|| super::sum(parts))
        }
    })
}

fn lookup<'t>(app: &FuncApp, table: &'t FunctionTable) -> Result<&'t super::FunctionDef, DiffError> {
    let def = table
        .get(&app.name)
        .ok_or_else(|| DiffError::UnknownFunction(app.name.clone()))?;
    if def.arity() != app.args.len() || app.derivs.len() != app.args.len() {
        return Err(DiffError::Arity {
            name: app.name.clone(),
            expected: def.arity(),
            got: app.args.len(),
        });
    }
    Ok(def)
}

/// Derivative of the application with respect to its `i`-th argument slot.
fn partial(
    app: &FuncApp,
    i: usize,
    rule: &DerivativeRule,
    signature: &[Symbol],
    table: &FunctionTable,
) -> Result<Expr, DiffError> {
    match rule {
        DerivativeRule::Primed => {
            let mut next = app.clone();
            next.derivs[i] += 1;
            Ok(Expr::Func(next))
        }
        DerivativeRule::Rewrite(body) => {
            rewrite_derivative(body, &signature[0], app.derivs[0] + 1, &app.args[0], table)
        }
    }
}

/// `order`-th derivative of a rewrite symbol evaluated at `arg`.
fn rewrite_derivative(
    body: &Expr,
    var: &Symbol,
    order: u8,
    arg: &Expr,
    table: &FunctionTable,
) -> Result<Expr, DiffError> {
    let mut current = body.clone();
    for _ in 1..order {
        current = diff(&current, var, table)?;
    }
    Ok(substitute(&current, &[(var.clone(), arg.clone())]))
}

/// Replaces derived applications of rewrite-rule symbols (such as a parsed
/// `A'(u)`) by their defining expressions. Other nodes are left alone.
pub fn expand_rewrite(app: &FuncApp, table: &FunctionTable) -> Result<Option<Expr>, DiffError> {
    let def = lookup(app, table)?;
    match &def.rule {
        DerivativeRule::Rewrite(body) if app.derivs[0] > 0 => {
            rewrite_derivative(body, &def.signature[0], app.derivs[0], &app.args[0], table).map(Some)
        }
        _ => Ok(None),
    }
}

/// Simultaneous substitution of symbols, followed by normalization.
pub fn substitute(e: &Expr, bindings: &[(Symbol, Expr)]) -> Expr {
    normalize(&replace(e, bindings))
}

fn replace(e: &Expr, bindings: &[(Symbol, Expr)]) -> Expr {
    match e {
        Expr::Const(_) => e.clone(),
        Expr::Sym(s) => bindings
            .iter()
            .find(|(target, _)| target == s)
            .map(|(_, value)| value.clone())
            .unwrap_or_else(|| e.clone()),
        Expr::Func(app) => Expr::Func(FuncApp {
            name: app.name.clone(),
            derivs: app.derivs.clone(),
            args: app.args.iter().map(|a| replace(a, bindings)).collect(),
        }),
        Expr::Sum(xs) => Expr::Sum(xs.iter().map(|x| replace(x, bindings)).collect()),
        Expr::Product(xs) => Expr::Product(xs.iter().map(|x| replace(x, bindings)).collect()),
        Expr::Pow(b, r) => Expr::Pow(Box::new(replace(b, bindings)), r.clone()),
        Expr::Neg(x) => Expr::Neg(Box::new(replace(x, bindings))),
    }
}

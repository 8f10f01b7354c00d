use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{Expr, Symbol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableError {
    #[error("function `{0}` is already registered")]
    Duplicate(String),
    #[error("`{0}` is a reserved jet symbol")]
    Reserved(String),
    #[error("rewrite rule for `{name}` refers to unregistered function `{missing}`")]
    OpenRule { name: String, missing: String },
    #[error("rewrite rules are only supported for univariate symbols (`{0}`)")]
    RewriteArity(String),
    #[error("signature variable `{0}` must be one of t, x, u")]
    BadSignature(String),
}

/// How the derivative of a function symbol is formed.
#[derive(Debug, Clone, PartialEq)]
pub enum DerivativeRule {
    /// Differentiation introduces a derived symbol (`a` -> `a'`).
    Primed,
    /// The derivative is the given expression, written in terms of the
    /// symbol's single signature variable; e.g. `A' = u*a(u)`.
    Rewrite(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDef {
    pub name: String,
    /// Variables the symbol is declared over, e.g. `[u]` for `a(u)`.
    pub signature: Vec<Symbol>,
    pub rule: DerivativeRule,
}

impl FunctionDef {
    pub fn arity(&self) -> usize {
        self.signature.len()
    }
}

/// Registry of opaque function symbols and named scalar parameters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FunctionTable {
    funcs: BTreeMap<String, FunctionDef>,
    params: BTreeSet<String>,
}

fn check_name(name: &str) -> Result<(), TableError> {
    if Symbol::from_jet_name(name).is_some() {
        return Err(TableError::Reserved(name.to_string()));
    }
    Ok(())
}

impl FunctionTable {
    pub fn new() -> FunctionTable {
        FunctionTable::default()
    }

    /// `a(u)` with primed derivatives and `A(u)` with `A' = u*a(u)`, plus the
    /// opaque `tau(u)`, `xi(u)` and `lambda(u)` used by the symmetry catalog.
    pub fn burgers() -> FunctionTable {
        let mut table = FunctionTable::new();
        table.register_primed("a", vec![Symbol::u()]).unwrap();
        table
            .register_rewrite("A", Symbol::u(), Expr::u() * Expr::call("a", vec![Expr::u()]))
            .unwrap();
        for name in ["tau", "xi", "lambda"] {
            table.register_primed(name, vec![Symbol::u()]).unwrap();
        }
        table
    }

    pub fn register_primed(&mut self, name: &str, signature: Vec<Symbol>) -> Result<(), TableError> {
        self.insert(FunctionDef {
            name: name.to_string(),
            signature,
            rule: DerivativeRule::Primed,
        })
    }

    pub fn register_rewrite(&mut self, name: &str, var: Symbol, derivative: Expr) -> Result<(), TableError> {
        self.insert(FunctionDef {
            name: name.to_string(),
            signature: vec![var],
            rule: DerivativeRule::Rewrite(super::normalize(&derivative)),
        })
    }

    pub fn insert(&mut self, def: FunctionDef) -> Result<(), TableError> {
        check_name(&def.name)?;
        if self.funcs.contains_key(&def.name) || self.params.contains(&def.name) {
            return Err(TableError::Duplicate(def.name));
        }
        for s in &def.signature {
            if !matches!(s, Symbol::T | Symbol::X) && *s != Symbol::u() {
                return Err(TableError::BadSignature(s.to_string()));
            }
        }
        if let DerivativeRule::Rewrite(body) = &def.rule {
            if def.signature.len() != 1 {
                return Err(TableError::RewriteArity(def.name));
            }
            for f in body.function_names() {
                if f != def.name && !self.funcs.contains_key(&f) {
                    return Err(TableError::OpenRule {
                        name: def.name,
                        missing: f,
                    });
                }
            }
        }
        self.funcs.insert(def.name.clone(), def);
        Ok(())
    }

    /// A named constant; its derivative with respect to every coordinate is
    /// zero.
    pub fn register_param(&mut self, name: &str) -> Result<(), TableError> {
        check_name(name)?;
        if self.funcs.contains_key(name) || !self.params.insert(name.to_string()) {
            return Err(TableError::Duplicate(name.to_string()));
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&FunctionDef> {
        self.funcs.get(name)
    }

    pub fn is_param(&self, name: &str) -> bool {
        self.params.contains(name)
    }

    pub fn functions(&self) -> impl Iterator<Item = &FunctionDef> {
        self.funcs.values()
    }

    /// First unused name among `base`, `base1`, `base2`, ...
    pub fn fresh_name(&self, base: &str) -> String {
        if !self.funcs.contains_key(base) && !self.params.contains(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}{i}"))
            .find(|n| !self.funcs.contains_key(n) && !self.params.contains(n))
            .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn burgers_table_is_closed() {
        let t = FunctionTable::burgers();
        assert_eq!(t.get("a").unwrap().arity(), 1);
        assert!(matches!(t.get("A").unwrap().rule, DerivativeRule::Rewrite(_)));
    }

    #[test]
    fn rejects_open_rewrite_and_reserved_names() {
        let mut t = FunctionTable::new();
        let err = t.register_rewrite("A", Symbol::u(), Expr::call("a", vec![Expr::u()]));
        assert!(matches!(err, Err(TableError::OpenRule { .. })));
        assert!(matches!(
            t.register_primed("u_x", vec![Symbol::u()]),
            Err(TableError::Reserved(_))
        ));
        t.register_primed("q", vec![Symbol::X]).unwrap();
        assert!(matches!(t.register_param("q"), Err(TableError::Duplicate(_))));
        assert_eq!(t.fresh_name("q"), "q1");
    }
}

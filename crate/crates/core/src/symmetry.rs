//! Lie point symmetries `X = tau d/dt + xi d/dx + eta d/du` of
//! `u_t + f = 0`: determining-equation residuals, the generator catalog of
//! `u_t + a(u) u_x = 0`, and an independent prolongation check.

use std::fmt;

use thiserror::Error;

use crate::expr::{
    diff, is_zero, normalize, DiffError, Direction, Expr, Field, FunctionTable, Symbol, ZeroTestConfig, ZeroTestError,
    ZeroVerdict,
};
use crate::jet::{on_solution_reduce, total_derivative, EvolutionSpec, JetError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetryError {
    #[error("generator component {component} may not contain `{symbol}`")]
    InvalidGenerator { component: &'static str, symbol: Symbol },
    #[error("the split determining equations need the equation in (alpha, beta) form")]
    NotPairForm,
    #[error("unknown catalog generator `{0}`")]
    UnknownLabel(String),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error(transparent)]
    ZeroTest(#[from] ZeroTestError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub tau: Expr,
    pub xi: Expr,
    pub eta: Expr,
    pub name: Option<String>,
}

impl Generator {
    /// Components must be functions of `t`, `x`, `u` and parameters.
    pub fn new(tau: Expr, xi: Expr, eta: Expr) -> Result<Generator, SymmetryError> {
        let g = Generator {
            tau: normalize(&tau),
            xi: normalize(&xi),
            eta: normalize(&eta),
            name: None,
        };
        for (component, e) in [("tau", &g.tau), ("xi", &g.xi), ("eta", &g.eta)] {
            for s in e.symbols() {
                let bad = match &s {
                    Symbol::Jet {
                        field: Field::U,
                        dx: 0,
                        dt: 0,
                    } => false,
                    Symbol::Jet { .. } => true,
                    _ => false,
                };
                if bad {
                    return Err(SymmetryError::InvalidGenerator { component, symbol: s });
                }
            }
        }
        Ok(g)
    }

    pub fn named(mut self, name: &str) -> Generator {
        self.name = Some(name.to_string());
        self
    }

    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or("X")
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} = ({})d/dt + ({})d/dx + ({})d/du",
            self.label(),
            self.tau,
            self.xi,
            self.eta
        )
    }
}

struct Partials {
    t: Expr,
    x: Expr,
    u: Expr,
}

fn partials(e: &Expr, table: &FunctionTable) -> Result<Partials, DiffError> {
    Ok(Partials {
        t: diff(e, &Symbol::T, table)?,
        x: diff(e, &Symbol::X, table)?,
        u: diff(e, &Symbol::u(), table)?,
    })
}

/// The left side of the single determining equation for `u_t + f = 0`,
/// with `u_t` already eliminated:
///
/// `eta_t - xi_t u_x + (tau_t - eta_u + xi_u u_x) f + xi f_x + tau f_t
///  + eta f_u - tau_u f^2 + (eta_x + eta_u u_x - xi_x u_x - xi_u u_x^2) f_{u_x}
///  + (tau_x + tau_u u_x) f f_{u_x}`.
pub fn determining_residual_generic(
    spec: &EvolutionSpec,
    g: &Generator,
    table: &FunctionTable,
) -> Result<Expr, SymmetryError> {
    let f = spec.flux();
    let ux = Expr::u_x();
    let tau = partials(&g.tau, table)?;
    let xi = partials(&g.xi, table)?;
    let eta = partials(&g.eta, table)?;
    let ff = partials(&f, table)?;
    let f_ux = diff(&f, &Symbol::u_x(), table)?;
    let terms = vec![
        eta.t.clone(),
        -(xi.t * ux.clone()),
        (tau.t - eta.u.clone() + xi.u.clone() * ux.clone()) * f.clone(),
        g.xi.clone() * ff.x,
        g.tau.clone() * ff.t,
        g.eta.clone() * ff.u,
        -(tau.u.clone() * f.clone() * f.clone()),
        (eta.x + eta.u * ux.clone() - xi.x * ux.clone() - xi.u * ux.clone() * ux.clone()) * f_ux.clone(),
        (tau.x + tau.u * ux) * f * f_ux,
    ];
    Ok(normalize(&Expr::Sum(terms)))
}

/// The two split determining equations `(R1, R2)` for
/// `u_t + alpha u_x + beta = 0`; the generic residual is `R1 + u_x R2`.
pub fn determining_residual_pair(
    spec: &EvolutionSpec,
    g: &Generator,
    table: &FunctionTable,
) -> Result<(Expr, Expr), SymmetryError> {
    let EvolutionSpec::AlphaBeta { alpha, beta } = spec else {
        return Err(SymmetryError::NotPairForm);
    };
    let (a, b) = (alpha.clone(), beta.clone());
    let tau = partials(&g.tau, table)?;
    let xi = partials(&g.xi, table)?;
    let eta = partials(&g.eta, table)?;
    let pa = partials(alpha, table)?;
    let pb = partials(beta, table)?;
    let r1 = vec![
        eta.t,
        b.clone() * (tau.t.clone() - eta.u),
        pb.x * g.xi.clone(),
        pb.t * g.tau.clone(),
        pb.u * g.eta.clone(),
        -(b.clone() * b.clone() * tau.u.clone()),
        a.clone() * eta.x,
        a.clone() * b.clone() * tau.x.clone(),
    ];
    let r2 = vec![
        -xi.t,
        a.clone() * tau.t,
        b.clone() * xi.u,
        pa.x * g.xi.clone(),
        pa.t * g.tau.clone(),
        pa.u * g.eta.clone(),
        -(a.clone() * b * tau.u),
        -(a.clone() * xi.x),
        a.clone() * a * tau.x,
    ];
    Ok((normalize(&Expr::Sum(r1)), normalize(&Expr::Sum(r2))))
}

/// `lambda X`. Symmetry-preserving for `beta = 0` when `lambda = lambda(u)`;
/// callers should still check the residuals.
pub fn scale_generator(lambda: &Expr, g: &Generator) -> Generator {
    let scale = |e: &Expr| normalize(&(lambda.clone() * e.clone()));
    let name = g.name.as_ref().map(|n| format!("({lambda})*{n}"));
    Generator {
        tau: scale(&g.tau),
        xi: scale(&g.xi),
        eta: scale(&g.eta),
        name,
    }
}

/// Labels accepted by [`catalog_generator`], in catalog order.
pub const CATALOG_LABELS: [&str; 9] = ["X1", "X2", "X3", "X4", "X5", "X6", "X7", "X8", "Xu"];

/// A generator of `u_t + a(u) u_x = 0` by label. `X1`..`X8` span the
/// projectable symmetries (they divide by `a'`, so `a' != 0` is assumed);
/// `Xu` is the family `tau(u) d/dt + xi(u) d/dx` over the opaque `tau`, `xi`.
pub fn catalog_generator(label: &str) -> Result<Generator, SymmetryError> {
    let (t, x) = (Expr::t(), Expr::x());
    let a = Expr::call("a", vec![Expr::u()]);
    let inv_ap = Expr::call_derived("a", 1, Expr::u()).recip();
    let shifted = x.clone() - t.clone() * a.clone();
    let (tau, xi, eta) = match label {
        "X1" => (Expr::one(), Expr::zero(), Expr::zero()),
        "X2" => (Expr::zero(), Expr::one(), Expr::zero()),
        "X3" => (t, x, Expr::zero()),
        "X4" => (t, Expr::zero(), -(a * inv_ap)),
        "X5" => (Expr::zero(), t, inv_ap),
        "X6" => (x, Expr::zero(), -(a.clone() * a * inv_ap)),
        "X7" => (t.clone() * t.clone(), t * x, shifted * inv_ap),
        "X8" => (t * x.clone(), x.clone() * x, a * shifted * inv_ap),
        "Xu" => (
            Expr::call("tau", vec![Expr::u()]),
            Expr::call("xi", vec![Expr::u()]),
            Expr::zero(),
        ),
        other => return Err(SymmetryError::UnknownLabel(other.to_string())),
    };
    Ok(Generator::new(tau, xi, eta)?.named(label))
}

/// All of [`CATALOG_LABELS`]. Needs `a`, `tau` and `xi` registered as in
/// [`FunctionTable::burgers`].
pub fn burgers_catalog() -> Vec<Generator> {
    CATALOG_LABELS
        .iter()
        .map(|l| catalog_generator(l).expect("catalog labels are valid"))
        .collect()
}

/// `pr X (u_t + f)` from the first prolongation, reduced on solutions.
pub fn prolongation_residual(
    spec: &EvolutionSpec,
    g: &Generator,
    table: &FunctionTable,
) -> Result<Expr, SymmetryError> {
    let f = spec.flux();
    let w = normalize(&(g.eta.clone() - g.tau.clone() * Expr::u_t() - g.xi.clone() * Expr::u_x()));
    let eta_t = total_derivative(&w, Direction::T, table)?
        + g.tau.clone() * Expr::Sym(Symbol::u_tt())
        + g.xi.clone() * Expr::Sym(Symbol::u_xt());
    let eta_x = total_derivative(&w, Direction::X, table)?
        + g.tau.clone() * Expr::Sym(Symbol::u_xt())
        + g.xi.clone() * Expr::Sym(Symbol::u_xx());
    let ff = partials(&f, table)?;
    let f_ux = diff(&f, &Symbol::u_x(), table)?;
    let applied = Expr::Sum(vec![
        eta_t,
        g.tau.clone() * ff.t,
        g.xi.clone() * ff.x,
        g.eta.clone() * ff.u,
        eta_x * f_ux,
    ]);
    Ok(on_solution_reduce(&applied, spec, table)?)
}

/// Residuals of a generator together with their zero-test verdicts.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryCheck {
    pub generator: Generator,
    /// `[R1, R2]` for pair-form equations, `[R]` otherwise.
    pub residuals: Vec<Expr>,
    pub verdicts: Vec<ZeroVerdict>,
}

impl SymmetryCheck {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(ZeroVerdict::is_zero)
    }
}

/// Runs the split equations for pair-form specs and the single equation
/// otherwise.
pub fn verify_generator(
    spec: &EvolutionSpec,
    g: &Generator,
    table: &FunctionTable,
    cfg: &ZeroTestConfig,
) -> Result<SymmetryCheck, SymmetryError> {
    let residuals = match spec {
        EvolutionSpec::AlphaBeta { .. } => {
            let (r1, r2) = determining_residual_pair(spec, g, table)?;
            vec![r1, r2]
        }
        EvolutionSpec::Generic { .. } => vec![determining_residual_generic(spec, g, table)?],
    };
    let verdicts = residuals
        .iter()
        .map(|r| is_zero(r, cfg, table))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SymmetryCheck {
        generator: g.clone(),
        residuals,
        verdicts,
    })
}

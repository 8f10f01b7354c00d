//! Evolution equations on the jet space: total derivatives, reduction on
//! solutions, and the adjoint equation of the formal Lagrangian `v * F`.

use thiserror::Error;

use crate::expr::{diff, normalize, substitute, DiffError, Direction, Expr, Field, FunctionTable, Symbol};

/// Highest jet order reachable by total differentiation.
pub const MAX_JET_ORDER: u32 = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("total derivative would reach order {0}, beyond the supported depth {MAX_JET_ORDER}")]
    UnsupportedDepth(u32),
    #[error("invalid equation: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Diff(#[from] DiffError),
}

/// The equation `u_t + f = 0`, given either by a generic flux or by the pair
/// `(alpha, beta)` with `f = alpha * u_x + beta`.
#[derive(Debug, Clone, PartialEq)]
pub enum EvolutionSpec {
    Generic { f: Expr },
    AlphaBeta { alpha: Expr, beta: Expr },
}

fn check_symbols(e: &Expr, allow_ux: bool, what: &str) -> Result<(), JetError> {
    for s in e.symbols() {
        let ok = match &s {
            Symbol::T | Symbol::X | Symbol::Param(_) => true,
            Symbol::Jet {
                field: Field::U,
                dx: 0,
                dt: 0,
            } => true,
            Symbol::Jet {
                field: Field::U,
                dx: 1,
                dt: 0,
            } => allow_ux,
            _ => false,
        };
        if !ok {
            return Err(JetError::InvalidSpec(format!("{what} may not contain `{s}`")));
        }
    }
    Ok(())
}

impl EvolutionSpec {
    pub fn generic(f: Expr) -> Result<EvolutionSpec, JetError> {
        let f = normalize(&f);
        check_symbols(&f, true, "f")?;
        Ok(EvolutionSpec::Generic { f })
    }

    pub fn alpha_beta(alpha: Expr, beta: Expr) -> Result<EvolutionSpec, JetError> {
        let alpha = normalize(&alpha);
        let beta = normalize(&beta);
        check_symbols(&alpha, false, "alpha")?;
        check_symbols(&beta, false, "beta")?;
        if alpha.is_const_zero() {
            return Err(JetError::InvalidSpec("alpha must not vanish".into()));
        }
        Ok(EvolutionSpec::AlphaBeta { alpha, beta })
    }

    /// `u_t + a(u) u_x = 0` over the opaque symbol `a`.
    pub fn burgers() -> EvolutionSpec {
        EvolutionSpec::AlphaBeta {
            alpha: Expr::call("a", vec![Expr::u()]),
            beta: Expr::zero(),
        }
    }

    /// The flux `f` in `u_t + f = 0`.
    pub fn flux(&self) -> Expr {
        match self {
            EvolutionSpec::Generic { f } => f.clone(),
            EvolutionSpec::AlphaBeta { alpha, beta } => normalize(&(alpha * &Expr::u_x() + beta.clone())),
        }
    }

    /// `F = u_t + f`.
    pub fn equation(&self) -> Expr {
        normalize(&(Expr::u_t() + self.flux()))
    }

    pub fn to_generic(&self) -> EvolutionSpec {
        EvolutionSpec::Generic { f: self.flux() }
    }
}

/// `D_t` or `D_x` applied to `e`.
pub fn total_derivative(e: &Expr, dir: Direction, table: &FunctionTable) -> Result<Expr, JetError> {
    let explicit = match dir {
        Direction::T => Symbol::T,
        Direction::X => Symbol::X,
    };
    let mut parts = vec![diff(e, &explicit, table)?];
    for s in e.symbols() {
        let Some(next) = s.shifted(dir) else { continue };
        let partial = diff(e, &s, table)?;
        if partial.is_const_zero() {
            continue;
        }
        if next.order() > MAX_JET_ORDER {
            return Err(JetError::UnsupportedDepth(next.order()));
        }
        parts.push(partial * Expr::Sym(next));
    }
    Ok(normalize(&Expr::Sum(parts)))
}

pub fn total_derivative_n(e: &Expr, dir: Direction, n: u32, table: &FunctionTable) -> Result<Expr, JetError> {
    (0..n).try_fold(e.clone(), |acc, _| total_derivative(&acc, dir, table))
}

/// Eliminates every `t`-derivative of `u` using `u_t = -f` and its
/// differential consequences. The result contains no `u_t`, `u_xt`, `u_tt`,
/// ...; `v` and its derivatives are untouched.
pub fn on_solution_reduce(e: &Expr, spec: &EvolutionSpec, table: &FunctionTable) -> Result<Expr, JetError> {
    let minus_f = normalize(&-spec.flux());
    let mut current = normalize(e);
    // Each pass lowers the highest t-order present by one.
    for _ in 0..=MAX_JET_ORDER + 1 {
        let targets: Vec<Symbol> = current
            .symbols()
            .into_iter()
            .filter(|s| matches!(s, Symbol::Jet { field: Field::U, dt, .. } if *dt > 0))
            .collect();
        if targets.is_empty() {
            return Ok(current);
        }
        let mut bindings = Vec::with_capacity(targets.len());
        for s in targets {
            let Symbol::Jet { dx, dt, .. } = s else { unreachable!() };
            let r = total_derivative_n(&minus_f, Direction::T, u32::from(dt) - 1, table)?;
            let r = total_derivative_n(&r, Direction::X, u32::from(dx), table)?;
            bindings.push((s, r));
        }
        current = substitute(&current, &bindings);
    }
    Err(JetError::UnsupportedDepth(current.max_jet_order()))
}

/// True when no `t`-derivative of `u` appears in `e`.
pub fn free_of_time_derivatives(e: &Expr) -> bool {
    e.symbols()
        .iter()
        .all(|s| !matches!(s, Symbol::Jet { field: Field::U, dt, .. } if *dt > 0))
}

/// Variational derivative of `v * (u_t + f)` with respect to `u`:
/// `dL/du - D_t(dL/du_t) - D_x(dL/du_x) + D_x^2(dL/du_xx)`.
pub fn adjoint_of(spec: &EvolutionSpec, table: &FunctionTable) -> Result<Expr, JetError> {
    let lagrangian = normalize(&(Expr::v() * spec.equation()));
    let d_u = diff(&lagrangian, &Symbol::u(), table)?;
    let d_ut = diff(&lagrangian, &Symbol::u_t(), table)?;
    let d_ux = diff(&lagrangian, &Symbol::u_x(), table)?;
    let d_uxx = diff(&lagrangian, &Symbol::u_xx(), table)?;
    let adjoint = normalize(&Expr::Sum(vec![
        d_u,
        -total_derivative(&d_ut, Direction::T, table)?,
        -total_derivative(&d_ux, Direction::X, table)?,
        total_derivative_n(&d_uxx, Direction::X, 2, table)?,
    ]));
    debug_assert_eq!(
        normalize(&(adjoint.clone() - adjoint_transcribed(spec, table)?)),
        Expr::zero(),
        "variational and closed-form adjoints disagree"
    );
    Ok(adjoint)
}

/// The closed form
/// `-v_t - v_x f_{u_x} + v f_u - v f_{x u_x} - v u_x f_{u u_x} - v f_{u_x u_x} u_xx`.
pub fn adjoint_transcribed(spec: &EvolutionSpec, table: &FunctionTable) -> Result<Expr, JetError> {
    let f = spec.flux();
    let f_u = diff(&f, &Symbol::u(), table)?;
    let f_ux = diff(&f, &Symbol::u_x(), table)?;
    let f_x_ux = diff(&f_ux, &Symbol::X, table)?;
    let f_u_ux = diff(&f_ux, &Symbol::u(), table)?;
    let f_ux_ux = diff(&f_ux, &Symbol::u_x(), table)?;
    let v = Expr::v();
    Ok(normalize(&Expr::Sum(vec![
        -Expr::Sym(Symbol::v_t()),
        -(Expr::Sym(Symbol::v_x()) * f_ux),
        v.clone() * f_u,
        -(v.clone() * f_x_ux),
        -(v.clone() * Expr::u_x() * f_u_ux),
        -(v * f_ux_ux * Expr::Sym(Symbol::u_xx())),
    ])))
}

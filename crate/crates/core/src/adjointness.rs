//! Self-adjointness and quasi-self-adjointness of `u_t + alpha u_x + beta = 0`.
//!
//! Under `v = phi(u)` the adjoint equation becomes
//! `F*|_{v=phi} = -phi' F + phi (beta_u - alpha_x) + phi' beta`, so the
//! equation is quasi-self-adjoint with factor `-phi'` exactly when
//! `phi' beta = phi (alpha_x - beta_u)`.

use std::fmt;

use thiserror::Error;

use crate::expr::{
    diff, is_zero, normalize, substitute, DiffError, Direction, Expr, FunctionTable, Rational, Symbol, TableError,
    ZeroTestConfig, ZeroTestError, ZeroVerdict,
};
use crate::jet::{adjoint_of, total_derivative, EvolutionSpec, JetError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdjointnessKind {
    SelfAdjoint,
    QuasiSelfAdjoint,
    NotQuasiSelfAdjoint,
}

impl AdjointnessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AdjointnessKind::SelfAdjoint => "self-adjoint",
            AdjointnessKind::QuasiSelfAdjoint => "quasi-self-adjoint",
            AdjointnessKind::NotQuasiSelfAdjoint => "not quasi-self-adjoint",
        }
    }
}

impl fmt::Display for AdjointnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The branch of the decision procedure that produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassificationCase {
    /// `f_{u_x u_x}` does not vanish.
    NonlinearInUx,
    /// `beta = 0` and `alpha_x = 0`: every `phi(u)` works.
    ArbitraryPhi,
    /// `beta = 0` but `alpha_x != 0`: no `phi` with `phi' != 0` works.
    TransportRejected,
    /// `beta != 0` and `(alpha_x - beta_u)/beta` depends on `t` or `x`.
    RatioNotInU,
    /// `beta != 0` and `alpha_x = beta_u`: only constant `phi` works.
    RatioZero,
    /// `beta != 0` and `phi'/phi = (alpha_x - beta_u)/beta` is a function of
    /// `u` alone.
    RatioInU,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjointnessVerdict {
    pub kind: AdjointnessKind,
    /// `u` for self-adjoint equations; a closed form `u^c` or an opaque
    /// symbol carrying `phi' = r phi` otherwise.
    pub phi: Option<Expr>,
    /// The multiplier `-phi'` in `F*|_{v=phi} = factor * F`.
    pub factor: Option<Expr>,
    /// `u beta - integral(u alpha_x du)` for self-adjoint equations with
    /// `beta != 0`, when the integral is closed-form.
    pub lambda: Option<Expr>,
    /// `(alpha_x - beta_u)/beta` when `beta != 0`.
    pub ratio: Option<Expr>,
    pub case: ClassificationCase,
    pub diagnostics: Vec<String>,
    /// The input table, extended by the opaque `phi` symbol if one was
    /// introduced.
    pub table: FunctionTable,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdjointnessError {
    #[error(transparent)]
    ZeroTest(#[from] ZeroTestError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("phi must depend on u only, got `{0}`")]
    BadPhi(Expr),
}

impl AdjointnessError {
    pub fn is_inconclusive(&self) -> bool {
        matches!(self, AdjointnessError::ZeroTest(ZeroTestError::Inconclusive(_)))
    }
}

fn vanishes(e: &Expr, cfg: &ZeroTestConfig, table: &FunctionTable) -> Result<bool, AdjointnessError> {
    Ok(is_zero(e, cfg, table)?.is_zero())
}

/// Splits `f` into `(alpha, beta)`; `None` when `f` is not linear in `u_x`.
pub fn split_linear(
    spec: &EvolutionSpec,
    cfg: &ZeroTestConfig,
    table: &FunctionTable,
) -> Result<Option<(Expr, Expr)>, AdjointnessError> {
    match spec {
        EvolutionSpec::AlphaBeta { alpha, beta } => Ok(Some((alpha.clone(), beta.clone()))),
        EvolutionSpec::Generic { f } => {
            let f_ux = diff(f, &Symbol::u_x(), table)?;
            let f_uxux = diff(&f_ux, &Symbol::u_x(), table)?;
            if !vanishes(&f_uxux, cfg, table)? {
                return Ok(None);
            }
            let at_zero = [(Symbol::u_x(), Expr::zero())];
            Ok(Some((substitute(&f_ux, &at_zero), substitute(f, &at_zero))))
        }
    }
}

/// Antiderivative in `u` vanishing at `u = 0`, for sums of `c * u^k` with
/// `c` free of `u` and `k != -1`.
pub fn integrate_in_u(e: &Expr) -> Option<Expr> {
    let e = normalize(e);
    let terms: Vec<Expr> = match e {
        Expr::Sum(ts) => ts,
        other => vec![other],
    };
    let u = Symbol::u();
    let mut out = Vec::with_capacity(terms.len());
    for term in terms {
        let (sign, body) = match term {
            Expr::Neg(inner) => (true, *inner),
            other => (false, other),
        };
        let factors: Vec<Expr> = match body {
            Expr::Product(fs) => fs,
            other => vec![other],
        };
        let mut k = Rational::from_integer(0.into());
        let mut rest = Vec::new();
        for f in factors {
            match &f {
                Expr::Sym(s) if *s == u => k += Rational::from_integer(1.into()),
                Expr::Pow(b, p) if **b == Expr::u() => k += p.clone(),
                _ if f.contains_symbol(&u) => return None,
                _ => rest.push(f),
            }
        }
        if k == Rational::from_integer((-1).into()) {
            return None;
        }
        let k1 = k + Rational::from_integer(1.into());
        let mut t = Expr::Product(rest) * Expr::u().pow(k1.clone()) * Expr::Const(k1.recip());
        if sign {
            t = -t;
        }
        out.push(t);
    }
    Some(normalize(&Expr::Sum(out)))
}

/// `u^c` when `r = c/u` for a constant `c`.
fn closed_form_phi(r: &Expr) -> Option<Expr> {
    let c = normalize(&(r.clone() * Expr::u()));
    let c = c.as_const()?.clone();
    Some(normalize(&Expr::u().pow(c)))
}

/// Decides self-adjointness and quasi-self-adjointness.
pub fn classify(
    spec: &EvolutionSpec,
    table: &FunctionTable,
    cfg: &ZeroTestConfig,
) -> Result<AdjointnessVerdict, AdjointnessError> {
    let mut verdict = AdjointnessVerdict {
        kind: AdjointnessKind::NotQuasiSelfAdjoint,
        phi: None,
        factor: None,
        lambda: None,
        ratio: None,
        case: ClassificationCase::NonlinearInUx,
        diagnostics: Vec::new(),
        table: table.clone(),
    };
    let Some((alpha, beta)) = split_linear(spec, cfg, table)? else {
        verdict
            .diagnostics
            .push("f is not linear in u_x (f_{u_x u_x} != 0)".into());
        return Ok(verdict);
    };
    let alpha_x = diff(&alpha, &Symbol::X, table)?;

    if vanishes(&beta, cfg, table)? {
        if vanishes(&alpha_x, cfg, table)? {
            verdict.kind = AdjointnessKind::SelfAdjoint;
            verdict.case = ClassificationCase::ArbitraryPhi;
            verdict.phi = Some(Expr::u());
            verdict.factor = Some(Expr::int(-1));
            verdict
                .diagnostics
                .push("beta = 0 and alpha = alpha(t, u): any phi(u) with phi' != 0 works".into());
        } else {
            verdict.case = ClassificationCase::TransportRejected;
            verdict
                .diagnostics
                .push("beta = 0 forces phi(u) * alpha_x = 0, but alpha_x != 0".into());
            if !alpha.contains_symbol(&Symbol::u()) {
                verdict.diagnostics.push(
                    "linear transport with a speed depending on x is sometimes listed among quasi-self-adjoint \
                     equations; the defining condition rejects it"
                        .into(),
                );
            }
        }
        return Ok(verdict);
    }

    let beta_u = diff(&beta, &Symbol::u(), table)?;
    let r = normalize(&((alpha_x.clone() - beta_u.clone()) * beta.clone().recip()));
    verdict.ratio = Some(r.clone());
    if vanishes(&r, cfg, table)? {
        verdict.case = ClassificationCase::RatioZero;
        verdict.diagnostics.push("alpha_x = beta_u forces phi' = 0".into());
        return Ok(verdict);
    }
    let r_t = diff(&r, &Symbol::T, table)?;
    let r_x = diff(&r, &Symbol::X, table)?;
    if !vanishes(&r_t, cfg, table)? || !vanishes(&r_x, cfg, table)? {
        verdict.case = ClassificationCase::RatioNotInU;
        verdict.diagnostics.push(format!("phi'/phi = {r} depends on t or x"));
        return Ok(verdict);
    }
    verdict.case = ClassificationCase::RatioInU;

    // d/du (u beta - integral(u alpha_x du)) = beta + u beta_u - u alpha_x
    let g_u = normalize(&(beta.clone() + Expr::u() * beta_u - Expr::u() * alpha_x.clone()));
    if vanishes(&g_u, cfg, table)? {
        verdict.kind = AdjointnessKind::SelfAdjoint;
        verdict.phi = Some(Expr::u());
        verdict.factor = Some(Expr::int(-1));
        match integrate_in_u(&(Expr::u() * alpha_x)) {
            Some(integral) => {
                let g = normalize(&(Expr::u() * beta - integral));
                verdict
                    .diagnostics
                    .push(format!("beta = (integral(u alpha_x du) + lambda)/u with lambda = {g}"));
                verdict.lambda = Some(g);
            }
            None => verdict
                .diagnostics
                .push("lambda not reported: integral of u*alpha_x is not closed-form".into()),
        }
        return Ok(verdict);
    }

    verdict.kind = AdjointnessKind::QuasiSelfAdjoint;
    let phi = match closed_form_phi(&r) {
        Some(p) => p,
        None => {
            // r is u-only up to zero testing; pin any structural t, x.
            let r_u = substitute(&r, &[(Symbol::T, Expr::one()), (Symbol::X, Expr::one())]);
            let name = verdict.table.fresh_name("phi");
            let phi = Expr::call(&name, vec![Expr::u()]);
            verdict.table.register_rewrite(&name, Symbol::u(), r_u * phi.clone())?;
            phi
        }
    };
    verdict.factor = Some(normalize(&-diff(&phi, &Symbol::u(), &verdict.table)?));
    verdict.diagnostics.push(format!("phi'/phi = {r}"));
    verdict.phi = Some(phi);
    Ok(verdict)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubstitutionReport {
    /// `F*|_{v=phi} + phi' F`.
    pub residual: Expr,
    pub verdict: ZeroVerdict,
}

impl SubstitutionReport {
    pub fn passed(&self) -> bool {
        self.verdict.is_zero()
    }
}

/// Checks `F*|_{v=phi(u)} = -phi'(u) F`.
pub fn verify_substitution(
    spec: &EvolutionSpec,
    phi: &Expr,
    table: &FunctionTable,
    cfg: &ZeroTestConfig,
) -> Result<SubstitutionReport, AdjointnessError> {
    let phi = normalize(phi);
    if phi.symbols().iter().any(|s| *s != Symbol::u()) {
        return Err(AdjointnessError::BadPhi(phi));
    }
    let adjoint = adjoint_of(spec, table)?;
    let bindings = [
        (Symbol::v(), phi.clone()),
        (Symbol::v_t(), total_derivative(&phi, Direction::T, table)?),
        (Symbol::v_x(), total_derivative(&phi, Direction::X, table)?),
    ];
    let phi_u = diff(&phi, &Symbol::u(), table)?;
    let residual = normalize(&(substitute(&adjoint, &bindings) + phi_u * spec.equation()));
    let verdict = is_zero(&residual, cfg, table)?;
    Ok(SubstitutionReport { residual, verdict })
}

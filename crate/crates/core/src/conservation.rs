//! Conserved vectors `(C0, C1)` with `D_t C0 + D_x C1 = 0` on solutions.
//!
//! Vectors are built from a symmetry generator either in the general
//! two-field form (with the adjoint variable `v` free) or, for
//! (quasi-)self-adjoint equations, with `v = phi(u)` already substituted.

use std::fmt;

use thiserror::Error;

use crate::adjointness::{classify, split_linear, verify_substitution, AdjointnessError, AdjointnessKind};
use crate::expr::{
    diff, is_zero, normalize, substitute, DiffError, Direction, Expr, Field, FunctionTable, Symbol, ZeroTestConfig,
    ZeroTestError, ZeroVerdict,
};
use crate::jet::{on_solution_reduce, total_derivative, EvolutionSpec, JetError};
use crate::symmetry::Generator;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConservationError {
    #[error("refusing to build a self-adjoint vector: the equation is {kind}")]
    Refused {
        kind: AdjointnessKind,
        diagnostics: Vec<String>,
    },
    #[error("refusing to build a vector: the substitution v = {0} does not close the adjoint equation")]
    PhiRejected(Expr),
    #[error("the equation is not linear in u_x")]
    NotLinear,
    #[error("the vector depends on v; a binding v = phi(u) is required")]
    MissingPhi,
    #[error("unknown conservation-law label `{0}`")]
    UnknownLabel(String),
    #[error(transparent)]
    Adjointness(#[from] AdjointnessError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error(transparent)]
    ZeroTest(#[from] ZeroTestError),
}

/// Which construction produced a vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    /// `C0 = W v`, `C1 = W v f_{u_x}` with `W = eta + tau f - xi u_x`.
    General,
    /// `v = u` in the pair form.
    SelfAdjoint,
    /// `v = phi(u)` in the pair form.
    QuasiSelfAdjoint,
    /// `v = u` with `alpha = a(u)`, `beta = 0`.
    Burgers,
    /// A simplified Burgers vector from the built-in catalog.
    Catalog,
    /// The variant that drops `alpha` from the `eta` term of `C1`; kept only
    /// as a negative control.
    PrintedVariant,
    Custom,
}

impl Formula {
    pub fn as_str(self) -> &'static str {
        match self {
            Formula::General => "general",
            Formula::SelfAdjoint => "self-adjoint",
            Formula::QuasiSelfAdjoint => "quasi-self-adjoint",
            Formula::Burgers => "burgers",
            Formula::Catalog => "catalog",
            Formula::PrintedVariant => "printed-variant",
            Formula::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub formula: Formula,
    pub generator: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConservedVector {
    pub c0: Expr,
    pub c1: Expr,
    pub provenance: Provenance,
}

impl ConservedVector {
    pub fn new(c0: Expr, c1: Expr, formula: Formula, generator: Option<&str>) -> ConservedVector {
        ConservedVector {
            c0: normalize(&c0),
            c1: normalize(&c1),
            provenance: Provenance {
                formula,
                generator: generator.map(str::to_string),
            },
        }
    }

    pub fn custom(c0: Expr, c1: Expr) -> ConservedVector {
        ConservedVector::new(c0, c1, Formula::Custom, None)
    }

    /// True when `v` or one of its derivatives occurs.
    pub fn has_adjoint_variable(&self) -> bool {
        let is_v = |s: &Symbol| matches!(s, Symbol::Jet { field: Field::V, .. });
        self.c0.symbols().iter().any(is_v) || self.c1.symbols().iter().any(is_v)
    }
}

impl fmt::Display for ConservedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C0 = {}, C1 = {}", self.c0, self.c1)
    }
}

/// The general vector with `v` left free; `u_t` is folded to `-f`.
pub fn build_vector_general(
    spec: &EvolutionSpec,
    g: &Generator,
    table: &FunctionTable,
) -> Result<ConservedVector, ConservationError> {
    let f = spec.flux();
    let f_ux = diff(&f, &Symbol::u_x(), table)?;
    let w = g.eta.clone() + g.tau.clone() * f - g.xi.clone() * Expr::u_x();
    let c0 = w.clone() * Expr::v();
    let c1 = w * Expr::v() * f_ux;
    Ok(ConservedVector::new(c0, c1, Formula::General, g.name.as_deref()))
}

/// `C0 = [eta + tau beta + (tau alpha - xi) u_x] phi`,
/// `C1 = [eta alpha + xi beta - (tau alpha - xi) u_t] phi`.
pub fn pair_vector(alpha: &Expr, beta: &Expr, g: &Generator, phi: &Expr) -> (Expr, Expr) {
    let k = g.tau.clone() * alpha.clone() - g.xi.clone();
    let c0 = (g.eta.clone() + g.tau.clone() * beta.clone() + k.clone() * Expr::u_x()) * phi.clone();
    let c1 = (g.eta.clone() * alpha.clone() + g.xi.clone() * beta.clone() - k * Expr::u_t()) * phi.clone();
    (normalize(&c0), normalize(&c1))
}

/// The pair-form vector with `v = u`, or with `v = phi` when `phi` is given.
///
/// Without `phi` the equation must classify as self-adjoint. With `phi` the
/// substitution identity must hold; `table` must know any opaque symbol in
/// `phi`. `C1` keeps `u_t`.
pub fn build_vector_self(
    spec: &EvolutionSpec,
    g: &Generator,
    phi: Option<&Expr>,
    table: &FunctionTable,
    cfg: &ZeroTestConfig,
) -> Result<ConservedVector, ConservationError> {
    let (alpha, beta) = split_linear(spec, cfg, table)?.ok_or(ConservationError::NotLinear)?;
    let (phi, formula) = match phi {
        None => {
            let verdict = classify(spec, table, cfg)?;
            if verdict.kind != AdjointnessKind::SelfAdjoint {
                return Err(ConservationError::Refused {
                    kind: verdict.kind,
                    diagnostics: verdict.diagnostics,
                });
            }
            (Expr::u(), Formula::SelfAdjoint)
        }
        Some(phi) => {
            if !verify_substitution(spec, phi, table, cfg)?.passed() {
                return Err(ConservationError::PhiRejected(phi.clone()));
            }
            let formula = if normalize(phi) == Expr::u() {
                Formula::SelfAdjoint
            } else {
                Formula::QuasiSelfAdjoint
            };
            (phi.clone(), formula)
        }
    };
    let (c0, c1) = pair_vector(&alpha, &beta, g, &phi);
    Ok(ConservedVector::new(c0, c1, formula, g.name.as_deref()))
}

/// `C0 = [eta + (tau a - xi) u_x] u`, `C1 = [eta a - (tau a - xi) u_t] u`
/// for `u_t + a(u) u_x = 0`.
pub fn build_vector_burgers(g: &Generator) -> ConservedVector {
    let (c0, c1) = pair_vector(&Expr::call("a", vec![Expr::u()]), &Expr::zero(), g, &Expr::u());
    ConservedVector::new(c0, c1, Formula::Burgers, g.name.as_deref())
}

/// `C0 = lambda [eta + (tau a - xi) u_x] u`, `C1 = lambda [eta - (tau a - xi) u_t] u`.
/// Not divergence-free in general: the `eta` term of `C1` lacks the factor
/// `a`. Exposed for negative tests only.
pub fn build_vector_printed_variant(g: &Generator, lambda: &Expr) -> ConservedVector {
    let a = Expr::call("a", vec![Expr::u()]);
    let k = g.tau.clone() * a - g.xi.clone();
    let u = Expr::u();
    let c0 = lambda.clone() * (g.eta.clone() + k.clone() * Expr::u_x()) * u.clone();
    let c1 = lambda.clone() * (g.eta.clone() - k * Expr::u_t()) * u;
    ConservedVector::new(c0, c1, Formula::PrintedVariant, g.name.as_deref())
}

/// Labels of [`burgers_claw_catalog`] with the generator each derives from.
pub const CLAW_LABELS: [(&str, &str); 6] = [
    ("l1", "X3"),
    ("l2", "X4"),
    ("l3", "X5"),
    ("l4", "X6"),
    ("l5a", "X7"),
    ("l5b", "X8"),
];

/// A simplified conserved vector of `u_t + a(u) u_x = 0`, over `a`, `a'` and
/// `A` with `A' = u a(u)`.
pub fn claw_catalog_entry(label: &str) -> Result<ConservedVector, ConservationError> {
    let generator = CLAW_LABELS
        .iter()
        .find(|(l, _)| *l == label)
        .map(|(_, g)| *g)
        .ok_or_else(|| ConservationError::UnknownLabel(label.to_string()))?;
    let (t, x, u) = (Expr::t(), Expr::x(), Expr::u());
    let a = Expr::call("a", vec![Expr::u()]);
    let big_a = Expr::call("A", vec![Expr::u()]);
    let inv_ap = Expr::call_derived("a", 1, Expr::u()).recip();
    let half_u2 = u.clone() * u.clone() * Expr::ratio(1, 2);
    let shifted = x.clone() - t.clone() * a.clone();
    let (c0, c1) = match label {
        "l1" => (half_u2, big_a),
        "l2" => (
            a.clone() * u.clone() * inv_ap.clone(),
            a.clone() * a * u * inv_ap - big_a,
        ),
        "l3" => (u.clone() * inv_ap.clone(), a * u * inv_ap - half_u2),
        "l4" => (
            a.clone() * a.clone() * u.clone() * inv_ap.clone() + big_a,
            a.clone() * a.clone() * a * u * inv_ap,
        ),
        "l5a" => (
            shifted.clone() * u.clone() * inv_ap.clone() + t.clone() * half_u2.clone(),
            shifted * a * u * inv_ap + Expr::int(2) * t * big_a - x * half_u2,
        ),
        "l5b" => (
            shifted.clone() * a.clone() * u.clone() * inv_ap.clone() + x.clone() * u.clone() * u.clone()
                - t * big_a.clone(),
            shifted * a.clone() * a * u * inv_ap + x * big_a,
        ),
        _ => unreachable!(),
    };
    Ok(ConservedVector::new(c0, c1, Formula::Catalog, Some(generator)))
}

/// All entries of [`CLAW_LABELS`] with their labels.
pub fn burgers_claw_catalog() -> Vec<(String, ConservedVector)> {
    CLAW_LABELS
        .iter()
        .map(|(l, _)| (l.to_string(), claw_catalog_entry(l).expect("catalog labels are valid")))
        .collect()
}

/// `D_t C0 + D_x C1` reduced on solutions, after `v = phi(u)` when the
/// vector involves `v`.
pub fn divergence_residual(
    cv: &ConservedVector,
    spec: &EvolutionSpec,
    phi: Option<&Expr>,
    table: &FunctionTable,
) -> Result<Expr, ConservationError> {
    let (mut c0, mut c1) = (cv.c0.clone(), cv.c1.clone());
    if cv.has_adjoint_variable() {
        let phi = phi.ok_or(ConservationError::MissingPhi)?;
        let bindings = [
            (Symbol::v(), phi.clone()),
            (Symbol::v_t(), total_derivative(phi, Direction::T, table)?),
            (Symbol::v_x(), total_derivative(phi, Direction::X, table)?),
        ];
        c0 = substitute(&c0, &bindings);
        c1 = substitute(&c1, &bindings);
    }
    let div = total_derivative(&c0, Direction::T, table)? + total_derivative(&c1, Direction::X, table)?;
    Ok(on_solution_reduce(&div, spec, table)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub residual: Expr,
    pub verdict: ZeroVerdict,
}

impl DivergenceReport {
    pub fn passed(&self) -> bool {
        self.verdict.is_zero()
    }
}

/// [`divergence_residual`] with its zero-test verdict.
pub fn certify(
    cv: &ConservedVector,
    spec: &EvolutionSpec,
    phi: Option<&Expr>,
    table: &FunctionTable,
    cfg: &ZeroTestConfig,
) -> Result<DivergenceReport, ConservationError> {
    let residual = divergence_residual(cv, spec, phi, table)?;
    let verdict = is_zero(&residual, cfg, table)?;
    Ok(DivergenceReport { residual, verdict })
}

/// `C1` with `u_t` eliminated on solutions, ready for numeric use.
pub fn reduced_flux(
    cv: &ConservedVector,
    spec: &EvolutionSpec,
    table: &FunctionTable,
) -> Result<Expr, ConservationError> {
    Ok(on_solution_reduce(&cv.c1, spec, table)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::symmetry::{catalog_generator, scale_generator};

    fn table() -> FunctionTable {
        FunctionTable::burgers()
    }

    fn p(s: &str) -> Expr {
        parse(s, &table()).unwrap()
    }

    fn gen(tau: &str, xi: &str, eta: &str) -> Generator {
        Generator::new(p(tau), p(xi), p(eta)).unwrap()
    }

    fn passes(cv: &ConservedVector, spec: &EvolutionSpec, phi: Option<&Expr>) -> bool {
        certify(cv, spec, phi, &table(), &ZeroTestConfig::default())
            .unwrap()
            .passed()
    }

    #[test]
    fn general_vector_examples() {
        let t = table();
        let spec = EvolutionSpec::generic(p("a(u)*u_x")).unwrap();
        let cv = build_vector_general(&spec, &gen("1", "0", "0"), &t).unwrap();
        assert_eq!((cv.c0.clone(), cv.c1.clone()), (p("a(u)*u_x*v"), p("a(u)^2*u_x*v")));
        assert!(passes(&cv, &spec, Some(&Expr::u())));
        let spec = EvolutionSpec::generic(p("u^2*u_x + x*u")).unwrap();
        let cv = build_vector_general(&spec, &gen("0", "1", "0"), &t).unwrap();
        assert_eq!((cv.c0, cv.c1), (p("-u_x*v"), p("-u^2*u_x*v")));
    }

    #[test]
    fn general_vector_needs_phi() {
        let spec = EvolutionSpec::burgers();
        let cv = build_vector_general(&spec, &gen("1", "0", "0"), &table()).unwrap();
        assert_eq!(
            divergence_residual(&cv, &spec, None, &table()),
            Err(ConservationError::MissingPhi)
        );
    }

    #[test]
    fn self_vector_examples() {
        let t = table();
        let cfg = ZeroTestConfig::default();
        let burgers = EvolutionSpec::burgers();
        let cv = build_vector_self(&burgers, &catalog_generator("X3").unwrap(), None, &t, &cfg).unwrap();
        assert_eq!(cv.c0, p("(t*a(u) - x)*u*u_x"));
        assert_eq!(cv.c1, p("(x - t*a(u))*u*u_t"));
        assert!(passes(&cv, &burgers, None));

        let classic = EvolutionSpec::alpha_beta(Expr::u(), Expr::zero()).unwrap();
        let x5 = Generator::new(Expr::zero(), Expr::t(), Expr::one()).unwrap();
        let cv = build_vector_self(&classic, &x5, None, &t, &cfg).unwrap();
        assert_eq!((cv.c0.clone(), cv.c1.clone()), (p("u - t*u*u_x"), p("u^2 + t*u*u_t")));
        assert!(passes(&cv, &classic, None));

        let spec = EvolutionSpec::alpha_beta(p("2*x"), Expr::u()).unwrap();
        let cv = build_vector_self(&spec, &gen("1", "0", "0"), None, &t, &cfg).unwrap();
        assert_eq!((cv.c0.clone(), cv.c1.clone()), (p("(u + 2*x*u_x)*u"), p("-2*x*u_t*u")));
        assert!(passes(&cv, &spec, None));
    }

    #[test]
    fn refuses_non_self_adjoint() {
        let spec = EvolutionSpec::alpha_beta(Expr::u(), p("u^2")).unwrap();
        let err = build_vector_self(&spec, &gen("1", "0", "0"), None, &table(), &ZeroTestConfig::default());
        assert!(matches!(
            err,
            Err(ConservationError::Refused {
                kind: AdjointnessKind::QuasiSelfAdjoint,
                ..
            })
        ));
        let err = build_vector_self(
            &spec,
            &gen("1", "0", "0"),
            Some(&Expr::u()),
            &table(),
            &ZeroTestConfig::default(),
        );
        assert!(matches!(err, Err(ConservationError::PhiRejected(_))));
    }

    #[test]
    fn quasi_vector_with_phi() {
        let spec = EvolutionSpec::alpha_beta(Expr::u(), p("u^2")).unwrap();
        let phi = p("u^(-2)");
        let cv = build_vector_self(
            &spec,
            &gen("1", "0", "0"),
            Some(&phi),
            &table(),
            &ZeroTestConfig::default(),
        )
        .unwrap();
        assert_eq!(cv.provenance.formula, Formula::QuasiSelfAdjoint);
        assert!(passes(&cv, &spec, None));
    }

    #[test]
    fn catalog_values() {
        assert_eq!(claw_catalog_entry("l1").unwrap().c0, p("u^2/2"));
        assert_eq!(claw_catalog_entry("l1").unwrap().c1, p("A(u)"));
        assert_eq!(
            claw_catalog_entry("l3").unwrap().provenance.generator.as_deref(),
            Some("X5")
        );
        assert!(claw_catalog_entry("l6").is_err());
    }

    #[test]
    fn catalog_is_divergence_free() {
        let burgers = EvolutionSpec::burgers();
        for (label, cv) in burgers_claw_catalog() {
            assert!(passes(&cv, &burgers, None), "{label}: {cv}");
        }
    }

    #[test]
    fn l1_residual_is_a_multiple_of_the_equation() {
        let burgers = EvolutionSpec::burgers();
        let cv = claw_catalog_entry("l1").unwrap();
        let raw = total_derivative(&cv.c0, Direction::T, &table()).unwrap()
            + total_derivative(&cv.c1, Direction::X, &table()).unwrap();
        assert_eq!(normalize(&raw), p("u*u_t + u*a(u)*u_x"));
        assert_eq!(
            divergence_residual(&cv, &burgers, None, &table()).unwrap(),
            Expr::zero()
        );
    }

    #[test]
    fn scaled_generators_give_laws() {
        let burgers = EvolutionSpec::burgers();
        for label in ["X1", "X4", "X7"] {
            for lambda in ["1", "u", "u^2"] {
                let g = scale_generator(&p(lambda), &catalog_generator(label).unwrap());
                assert!(passes(&build_vector_burgers(&g), &burgers, None), "{lambda} {label}");
            }
        }
    }

    #[test]
    fn printed_variant_fails() {
        let classic = EvolutionSpec::alpha_beta(Expr::u(), Expr::zero()).unwrap();
        let x5 = Generator::new(Expr::zero(), Expr::t(), Expr::one()).unwrap();
        let cv = build_vector_printed_variant(&x5, &Expr::one());
        let r = divergence_residual(&cv, &classic, None, &table()).unwrap();
        assert_eq!(r, p("u_x - 2*u*u_x"));
    }

    #[test]
    fn translation_laws_are_trivial() {
        let x2 = build_vector_burgers(&catalog_generator("X2").unwrap());
        assert_eq!(x2.c0, p("-u*u_x"));
        assert!(passes(&x2, &EvolutionSpec::burgers(), None));
    }

    #[test]
    fn burgers_form_matches_pair_form() {
        let t = table();
        let cfg = ZeroTestConfig::default();
        for g in crate::symmetry::burgers_catalog() {
            let a = build_vector_burgers(&g);
            let b = build_vector_self(&EvolutionSpec::burgers(), &g, None, &t, &cfg).unwrap();
            assert_eq!((a.c0, a.c1), (b.c0, b.c1));
        }
    }

    #[test]
    fn reduced_flux_has_no_time_derivative() {
        let cv = build_vector_burgers(&catalog_generator("X3").unwrap());
        let c1 = reduced_flux(&cv, &EvolutionSpec::burgers(), &table()).unwrap();
        assert_eq!(c1, p("(t*a(u) - x)*a(u)*u*u_x"));
    }
}

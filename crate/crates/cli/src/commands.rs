use std::f64::consts::PI;

use lieconserve::adjointness::{classify, verify_substitution, AdjointnessError, AdjointnessKind};
use lieconserve::characteristics::{
    verify_law, Boundary, CharError, CharacteristicSolution, Domain, InitialProfile, InstantiatedLaw,
};
use lieconserve::conservation::{
    build_vector_burgers, build_vector_general, build_vector_self, certify, claw_catalog_entry, ConservationError,
    ConservedVector,
};
use lieconserve::expr::{expr_to_polynomial, FunctionInstantiation, Polynomial, ZeroTestError, ZeroVerdict};
use lieconserve::symmetry::{verify_generator, SymmetryError};
use lieconserve::{EvolutionSpec, Expr, FunctionTable, Symbol, ZeroTestConfig};

use crate::config::RunArgs;
use crate::error::{CliError, Exit};
use crate::input::Inputs;
use crate::report::{ClawSection, NumericSection, Report, Residual, WitnessInfo};

pub const DEFAULT_NODES: usize = 2048;
pub const DEFAULT_TOL: f64 = 1e-6;
/// Default sample times as fractions of the shock time.
pub const DEFAULT_TIME_FRACTIONS: [f64; 4] = [0.25, 0.5, 0.75, 0.9];

fn zero_error(e: ZeroTestError) -> CliError {
    match e {
        ZeroTestError::Inconclusive(_) => CliError::Inconclusive(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

fn adjointness_error(e: AdjointnessError) -> CliError {
    match e {
        AdjointnessError::ZeroTest(z) => zero_error(z),
        other => CliError::Config(other.to_string()),
    }
}

fn symmetry_error(e: SymmetryError) -> CliError {
    match e {
        SymmetryError::ZeroTest(z) => zero_error(z),
        other => CliError::Config(other.to_string()),
    }
}

fn conservation_error(e: ConservationError) -> CliError {
    match e {
        ConservationError::ZeroTest(z) => zero_error(z),
        ConservationError::Adjointness(a) => adjointness_error(a),
        other => CliError::Config(other.to_string()),
    }
}

fn char_error(e: CharError) -> CliError {
    CliError::Config(e.to_string())
}

fn residual(name: String, expr: &Expr, verdict: &ZeroVerdict, cfg: &ZeroTestConfig) -> Residual {
    Residual {
        name,
        expr: expr.to_string(),
        zero: verdict.is_zero(),
        witness: verdict.witness().map(|w| WitnessInfo::new(w, cfg)),
    }
}

pub fn cmd_classify(args: &RunArgs) -> Result<Report, CliError> {
    let mut inputs = Inputs::new(args)?;
    let spec = inputs.spec(args)?;
    let probe = inputs.phi(args)?;
    let cfg = inputs.zero_config(args)?;
    let verdict = classify(&spec, &inputs.table, &cfg).map_err(adjointness_error)?;

    let mut report = Report::new("classify");
    report.verdict = verdict.kind.as_str().to_string();
    report.phi = verdict.phi.as_ref().map(Expr::to_string);
    report.summary = match (&verdict.kind, &verdict.phi) {
        (AdjointnessKind::SelfAdjoint, Some(phi)) => match &verdict.lambda {
            Some(lambda) => format!("self-adjoint (λ = {lambda}), φ(u) = {phi}"),
            None => format!("self-adjoint, φ(u) = {phi}"),
        },
        (AdjointnessKind::QuasiSelfAdjoint, Some(phi)) => format!("quasi-self-adjoint, φ(u) = {phi}"),
        (kind, _) => kind.as_str().to_string(),
    };
    report.diagnostics.extend(verdict.diagnostics.iter().cloned());
    if let (Some(phi), Some(factor)) = (&verdict.phi, &verdict.factor) {
        if let Some(def) = phi.function_names().iter().find_map(|n| verdict.table.get(n)) {
            if let lieconserve::expr::DerivativeRule::Rewrite(rule) = &def.rule {
                report
                    .diagnostics
                    .push(format!("{}(u) is defined by {}' = {rule}", def.name, def.name));
            }
        }
        report.diagnostics.push(format!("F*|(v = φ) = ({factor}) F"));
    }

    // Each candidate phi is checked against the adjoint equation directly.
    let mut checks: Vec<(Expr, FunctionTable)> = Vec::new();
    match &verdict.phi {
        Some(phi) => checks.push((phi.clone(), verdict.table.clone())),
        None if verdict.kind == AdjointnessKind::NotQuasiSelfAdjoint && args.phi.is_none() => {
            for p in [Expr::u(), Expr::u() * Expr::u()] {
                checks.push((p, inputs.table.clone()));
            }
        }
        None => {}
    }
    if let Some(p) = &probe {
        checks.push((p.clone(), inputs.table.clone()));
    }
    for (phi, table) in checks {
        let sub = verify_substitution(&spec, &phi, &table, &cfg).map_err(adjointness_error)?;
        report.residuals.push(residual(
            format!("F*|(v = {phi}) + φ' F"),
            &sub.residual,
            &sub.verdict,
            &cfg,
        ));
    }
    if let (Some(p), Some(r)) = (&probe, report.residuals.last()) {
        if r.zero && verdict.kind == AdjointnessKind::NotQuasiSelfAdjoint {
            report
                .diagnostics
                .push(format!("the probe φ = {p} closes the adjoint equation but φ' ≡ 0"));
        }
    }
    report.diagnostics.extend(inputs.diagnostics);
    report.exit = match verdict.kind {
        AdjointnessKind::SelfAdjoint | AdjointnessKind::QuasiSelfAdjoint => Exit::Ok,
        AdjointnessKind::NotQuasiSelfAdjoint => Exit::Fail,
    };
    Ok(report)
}

pub fn cmd_verify(args: &RunArgs) -> Result<Report, CliError> {
    let mut inputs = Inputs::new(args)?;
    let spec = inputs.spec(args)?;
    let g = inputs
        .generator(args)?
        .ok_or_else(|| CliError::Config("verify needs --generator or --tau/--xi/--eta".into()))?;
    let cfg = inputs.zero_config(args)?;
    let check = verify_generator(&spec, &g, &inputs.table, &cfg).map_err(symmetry_error)?;

    let mut report = Report::new("verify");
    let names: Vec<String> = match check.residuals.len() {
        1 => vec!["R".into()],
        n => (1..=n).map(|i| format!("R{i}")).collect(),
    };
    for ((name, r), v) in names.into_iter().zip(&check.residuals).zip(&check.verdicts) {
        report.residuals.push(residual(name, r, v, &cfg));
    }
    let passed = check.passed();
    report.verdict = if passed { "pass" } else { "fail" }.into();
    report.summary = format!(
        "{}: {g} {} the determining equations",
        report.verdict,
        if passed { "satisfies" } else { "does not satisfy" }
    );
    report.diagnostics.extend(inputs.diagnostics);
    report.exit = if passed { Exit::Ok } else { Exit::Fail };
    Ok(report)
}

fn is_builtin_burgers(args: &RunArgs) -> bool {
    args.builtin.as_deref() == Some("burgers")
}

/// The vector to certify, the `phi` needed to close it, the table knowing
/// any opaque `phi`, and a description.
struct ClawSource {
    cv: ConservedVector,
    phi: Option<Expr>,
    table: FunctionTable,
    label: String,
    description: String,
}

fn refusal(report: &mut Report, message: String, diagnostics: Vec<String>) -> Result<(), CliError> {
    report.verdict = "refused".into();
    report.summary = format!("refused: {message}");
    report.diagnostics.extend(diagnostics);
    report.exit = Exit::Fail;
    Ok(())
}

fn claw_source(
    args: &RunArgs,
    inputs: &mut Inputs,
    spec: &EvolutionSpec,
    cfg: &ZeroTestConfig,
    report: &mut Report,
) -> Result<Option<ClawSource>, CliError> {
    let g = inputs.generator(args)?;
    let phi = inputs.phi(args)?;
    if let Some(label) = &args.catalog {
        if g.is_some() || args.general {
            return Err(CliError::Config(
                "--catalog conflicts with a generator or --general".into(),
            ));
        }
        if !is_builtin_burgers(args) {
            return Err(CliError::Config("--catalog entries belong to --builtin burgers".into()));
        }
        let cv = claw_catalog_entry(label).map_err(conservation_error)?;
        let generator = cv.provenance.generator.clone().unwrap_or_default();
        return Ok(Some(ClawSource {
            cv,
            phi: None,
            table: inputs.table.clone(),
            label: label.clone(),
            description: format!("catalog {label}, from {generator}"),
        }));
    }
    let g = g.ok_or_else(|| CliError::Config("claw needs --catalog, --generator or --tau/--xi/--eta".into()))?;
    let label = g.label().to_string();

    if args.general {
        let cv = build_vector_general(spec, &g, &inputs.table).map_err(conservation_error)?;
        let (phi, table) = match phi {
            Some(p) => (p, inputs.table.clone()),
            None => {
                let verdict = classify(spec, &inputs.table, cfg).map_err(adjointness_error)?;
                match verdict.phi {
                    Some(p) => (p, verdict.table),
                    None => {
                        refusal(
                            report,
                            format!(
                                "the equation is {}; the general vector needs a binding v = φ(u)",
                                verdict.kind
                            ),
                            verdict.diagnostics,
                        )?;
                        return Ok(None);
                    }
                }
            }
        };
        report.phi = Some(phi.to_string());
        return Ok(Some(ClawSource {
            cv,
            description: format!("general formula for {label} with v = {phi}"),
            phi: Some(phi),
            table,
            label,
        }));
    }

    if is_builtin_burgers(args) && phi.is_none() {
        report.phi = Some("u".into());
        return Ok(Some(ClawSource {
            cv: build_vector_burgers(&g),
            phi: None,
            table: inputs.table.clone(),
            description: format!("formula for u_t + a(u) u_x = 0 with v = u and {label}"),
            label,
        }));
    }

    match build_vector_self(spec, &g, phi.as_ref(), &inputs.table, cfg) {
        Ok(cv) => {
            let shown = phi.clone().unwrap_or_else(Expr::u);
            report.phi = Some(shown.to_string());
            Ok(Some(ClawSource {
                description: format!(
                    "{} formula for {label} with v = {shown}",
                    cv.provenance.formula.as_str()
                ),
                cv,
                phi: None,
                table: inputs.table.clone(),
                label,
            }))
        }
        Err(ConservationError::Refused { kind, mut diagnostics }) => {
            diagnostics.push("pass --phi with a substitution that closes the adjoint equation".into());
            refusal(report, format!("the equation is {kind}, not self-adjoint"), diagnostics)?;
            Ok(None)
        }
        Err(ConservationError::PhiRejected(p)) => {
            refusal(
                report,
                format!("v = {p} does not close the adjoint equation"),
                Vec::new(),
            )?;
            Ok(None)
        }
        Err(e) => Err(conservation_error(e)),
    }
}

pub fn cmd_claw(args: &RunArgs) -> Result<Report, CliError> {
    let mut inputs = Inputs::new(args)?;
    let spec = inputs.spec(args)?;
    let cfg = inputs.zero_config(args)?;
    let mut report = Report::new("claw");
    let Some(source) = claw_source(args, &mut inputs, &spec, &cfg, &mut report)? else {
        report.diagnostics.extend(inputs.diagnostics);
        return Ok(report);
    };

    let div = certify(&source.cv, &spec, source.phi.as_ref(), &source.table, &cfg).map_err(conservation_error)?;
    report.claw = Some(ClawSection {
        source: source.description.clone(),
        c0: source.cv.c0.to_string(),
        c1: source.cv.c1.to_string(),
        divergence: div.residual.to_string(),
        divergence_zero: div.passed(),
        witness: div.verdict.witness().map(|w| WitnessInfo::new(w, &cfg)),
    });
    let mut passed = div.passed();

    if args.numeric.is_some() {
        let numeric = run_numeric(args, &mut inputs, &source)?;
        passed &= numeric.pass;
        report.numeric = Some(numeric);
    }
    report.verdict = if passed { "pass" } else { "fail" }.into();
    report.summary = match (&report.numeric, div.passed()) {
        (_, false) => "fail: the divergence does not vanish on solutions".into(),
        (Some(n), true) if !n.pass => {
            "fail: conserved symbolically, but the numeric drift exceeds the tolerance".into()
        }
        (Some(_), true) => "pass: conserved symbolically and numerically".into(),
        (None, true) => "pass: the divergence vanishes on solutions".into(),
    };
    report.diagnostics.extend(inputs.diagnostics);
    report.exit = if passed { Exit::Ok } else { Exit::Fail };
    Ok(report)
}

fn speed_polynomial(inputs: &mut Inputs, text: &str) -> Result<Polynomial, CliError> {
    let e = inputs.expr("a", text)?;
    expr_to_polynomial(&e, &Symbol::u(), &FunctionInstantiation::new())
        .ok_or_else(|| CliError::Config(format!("--a must be a polynomial in u, got `{e}`")))
}

/// A profile with its default domain, if it has one, and boundary.
type ProfileDefaults = (InitialProfile, Option<(f64, f64)>, Boundary);

/// Profile, default domain and default boundary for `--numeric`.
fn profile(name: &str) -> Result<ProfileDefaults, CliError> {
    Ok(match name {
        "sin" | "sine" => (InitialProfile::sine(), Some((0.0, 2.0 * PI)), Boundary::Periodic),
        "gaussian" => (InitialProfile::gaussian(), Some((-8.0, 8.0)), Boundary::CompactSupport),
        "bump" => (InitialProfile::bump(), Some((-2.0, 3.0)), Boundary::CompactSupport),
        expr => {
            let table = FunctionTable::new();
            let value = lieconserve::parse(expr, &table).map_err(|e| CliError::Parse {
                what: "initial profile".into(),
                text: expr.into(),
                message: e.to_string(),
            })?;
            (
                InitialProfile::from_expr(value, &table).map_err(char_error)?,
                None,
                Boundary::CompactSupport,
            )
        }
    })
}

fn run_numeric(args: &RunArgs, inputs: &mut Inputs, source: &ClawSource) -> Result<NumericSection, CliError> {
    if !is_builtin_burgers(args) {
        return Err(CliError::Config("numeric checks need --builtin burgers".into()));
    }
    let a_text = args.a.as_deref().unwrap_or("u");
    if args.a.is_none() {
        inputs
            .diagnostics
            .push("numeric check uses a(u) = u; pass --a to change it".into());
    }
    let a = speed_polynomial(inputs, a_text)?;
    let (u0, default_domain, default_boundary) = profile(args.numeric.as_deref().unwrap_or_default())?;
    let (lo, hi) = match (&args.domain, default_domain) {
        (Some(d), _) => (d[0], d[1]),
        (None, Some(d)) => d,
        (None, None) => return Err(CliError::Config("an expression profile needs --domain".into())),
    };
    let boundary = match args.boundary.as_deref() {
        None => default_boundary,
        Some("periodic") => Boundary::Periodic,
        Some("compact") => Boundary::CompactSupport,
        Some(other) => {
            return Err(CliError::Config(format!(
                "unknown boundary `{other}`; use periodic or compact"
            )))
        }
    };
    let domain = Domain::new(lo, hi, boundary).map_err(char_error)?;
    let mut sol = CharacteristicSolution::new(a, u0.clone(), domain).map_err(char_error)?;
    if let Some(tol) = args.inversion_tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Config("--inversion-tol must be positive".into()));
        }
        sol = sol.with_tolerance(tol);
    }
    let times = match &args.times {
        Some(t) => t.clone(),
        None => {
            let scale = if sol.shock_time().is_finite() {
                sol.shock_time()
            } else {
                1.0
            };
            DEFAULT_TIME_FRACTIONS.iter().map(|f| f * scale).collect()
        }
    };
    let nodes = args.nodes.unwrap_or(DEFAULT_NODES);
    let tol = args.tol.unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Config("--tol must be positive".into()));
    }
    let law = InstantiatedLaw::new(&source.cv, sol.speed(), &source.table, &source.label).map_err(char_error)?;
    let rep = verify_law(&sol, &law, &times, nodes, tol).map_err(char_error)?;
    Ok(NumericSection {
        profile: u0.name(),
        a: a_text.to_string(),
        domain: (lo, hi),
        boundary: match boundary {
            Boundary::Periodic => "periodic",
            Boundary::CompactSupport => "compact",
        }
        .into(),
        mode: rep.mode.as_str().into(),
        shock_time: rep.shock_time,
        cutoff: sol.cutoff(),
        nodes: rep.nodes,
        tolerance: rep.tolerance,
        times: rep.times,
        q: rep.q,
        q0: rep.q0,
        deviations: rep.deviations,
        drift: rep.drift,
        pass: rep.passed,
    })
}

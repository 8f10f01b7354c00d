use lieconserve::expr::{parse_instantiation, ParseErrorKind, ZeroTestError};
use lieconserve::symmetry::{catalog_generator, scale_generator, Generator};
use lieconserve::{parse, EvolutionSpec, Expr, FunctionTable, Symbol, ZeroTestConfig};

use crate::config::RunArgs;
use crate::error::CliError;

/// Environment variable overriding the zero-test seed.
pub const SEED_VAR: &str = "LIECONSERVE_SEED";

/// Parsing context: the Burgers table plus user declarations, and notes
/// about anything declared implicitly.
pub struct Inputs {
    pub table: FunctionTable,
    pub diagnostics: Vec<String>,
}

fn signature_symbol(name: &str) -> Option<Symbol> {
    match name {
        "t" => Some(Symbol::T),
        "x" => Some(Symbol::X),
        "u" => Some(Symbol::u()),
        _ => None,
    }
}

/// Splits `name(v1, v2)` into the name and its signature variables.
fn parse_declaration(decl: &str) -> Option<(String, Vec<Symbol>)> {
    let (name, rest) = decl.trim().split_once('(')?;
    let inner = rest.trim().strip_suffix(')')?;
    let name = name.trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return None;
    }
    let mut sig = Vec::new();
    for v in inner.split(',') {
        let s = signature_symbol(v.trim())?;
        if sig.contains(&s) {
            return None;
        }
        sig.push(s);
    }
    Some((name.to_string(), sig))
}

/// The argument list following the call of an unknown function at `offset`,
/// when every argument is a bare `t`, `x` or `u`.
fn implied_signature(text: &str, offset: usize) -> Option<Vec<Symbol>> {
    let rest = text.get(offset..)?;
    let open = rest.find('(')?;
    if rest[..open]
        .chars()
        .any(|c| !(c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c.is_whitespace()))
    {
        return None;
    }
    let close = rest[open..].find(')')? + open;
    let mut sig = Vec::new();
    for v in rest[open + 1..close].split(',') {
        let s = signature_symbol(v.trim())?;
        if sig.contains(&s) {
            return None;
        }
        sig.push(s);
    }
    Some(sig)
}

impl Inputs {
    pub fn new(args: &RunArgs) -> Result<Inputs, CliError> {
        let mut table = FunctionTable::burgers();
        for decl in &args.functions {
            let (name, sig) = parse_declaration(decl).ok_or_else(|| {
                CliError::Config(format!("bad --function `{decl}`; expected e.g. `q(x)` over t, x, u"))
            })?;
            table
                .register_primed(&name, sig)
                .map_err(|e| CliError::Config(format!("--function `{decl}`: {e}")))?;
        }
        Ok(Inputs {
            table,
            diagnostics: Vec::new(),
        })
    }

    /// Parses `text`, declaring unknown functions whose arguments are plain
    /// coordinates and treating unknown bare names as constant parameters.
    pub fn expr(&mut self, what: &str, text: &str) -> Result<Expr, CliError> {
        loop {
            let err = match parse(text, &self.table) {
                Ok(e) => return Ok(e),
                Err(err) => err,
            };
            let parse_err = || CliError::Parse {
                what: what.to_string(),
                text: text.to_string(),
                message: err.to_string(),
            };
            match &err.kind {
                ParseErrorKind::UnknownFunction(name) => {
                    let Some(sig) = implied_signature(text, err.offset) else {
                        return Err(CliError::Parse {
                            what: what.to_string(),
                            text: text.to_string(),
                            message: format!("{err}; declare it with --function, e.g. --function \"{name}(x)\""),
                        });
                    };
                    self.table.register_primed(name, sig.clone()).map_err(|_| parse_err())?;
                    let vars: Vec<String> = sig.iter().map(Symbol::to_string).collect();
                    self.diagnostics
                        .push(format!("declared {name}({}) as an arbitrary function", vars.join(", ")));
                }
                ParseErrorKind::UnknownSymbol(name) => {
                    self.table.register_param(name).map_err(|_| parse_err())?;
                    self.diagnostics
                        .push(format!("treating `{name}` as a constant parameter"));
                }
                _ => return Err(parse_err()),
            }
        }
    }

    pub fn spec(&mut self, args: &RunArgs) -> Result<EvolutionSpec, CliError> {
        let pair = args.alpha.is_some() || args.beta.is_some();
        let given = [pair, args.f.is_some(), args.builtin.is_some()]
            .iter()
            .filter(|b| **b)
            .count();
        if given != 1 {
            return Err(CliError::Config(
                "give the equation exactly one way: --alpha/--beta, --f or --builtin burgers".into(),
            ));
        }
        if let Some(b) = &args.builtin {
            return match b.as_str() {
                "burgers" => Ok(EvolutionSpec::burgers()),
                other => Err(CliError::Config(format!(
                    "unknown builtin `{other}`; only `burgers` exists"
                ))),
            };
        }
        if let Some(f) = &args.f {
            let f = self.expr("f", f)?;
            return EvolutionSpec::generic(f).map_err(|e| CliError::Config(e.to_string()));
        }
        let alpha = self.expr("alpha", args.alpha.as_deref().unwrap_or("0"))?;
        let beta = self.expr("beta", args.beta.as_deref().unwrap_or("0"))?;
        EvolutionSpec::alpha_beta(alpha, beta).map_err(|e| CliError::Config(e.to_string()))
    }

    /// A catalog generator or one assembled from `--tau/--xi/--eta`
    /// (missing components are zero), scaled by `--lambda`.
    pub fn generator(&mut self, args: &RunArgs) -> Result<Option<Generator>, CliError> {
        let explicit = args.tau.is_some() || args.xi.is_some() || args.eta.is_some();
        let g = match (&args.generator, explicit) {
            (Some(_), true) => {
                return Err(CliError::Config("--generator conflicts with --tau/--xi/--eta".into()));
            }
            (Some(label), false) => catalog_generator(label).map_err(|e| CliError::Config(e.to_string()))?,
            (None, true) => {
                let tau = self.expr("tau", args.tau.as_deref().unwrap_or("0"))?;
                let xi = self.expr("xi", args.xi.as_deref().unwrap_or("0"))?;
                let eta = self.expr("eta", args.eta.as_deref().unwrap_or("0"))?;
                Generator::new(tau, xi, eta).map_err(|e| CliError::Config(e.to_string()))?
            }
            (None, false) => return Ok(None),
        };
        match &args.lambda {
            Some(l) => {
                let lambda = self.expr("lambda", l)?;
                if lambda
                    .symbols()
                    .iter()
                    .any(|s| *s != Symbol::u() && !matches!(s, Symbol::Param(_)))
                {
                    return Err(CliError::Config(format!(
                        "--lambda must depend on u only, got `{lambda}`"
                    )));
                }
                Ok(Some(scale_generator(&lambda, &g)))
            }
            None => Ok(Some(g)),
        }
    }

    pub fn phi(&mut self, args: &RunArgs) -> Result<Option<Expr>, CliError> {
        args.phi.as_deref().map(|p| self.expr("phi", p)).transpose()
    }

    pub fn zero_config(&self, args: &RunArgs) -> Result<ZeroTestConfig, CliError> {
        let mut cfg = ZeroTestConfig::default();
        if let Some(n) = args.samples {
            if n == 0 {
                return Err(CliError::Config("--samples must be positive".into()));
            }
            cfg.samples = n;
        }
        if let Some(tol) = args.zero_tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::Config("--zero-tol must be positive".into()));
            }
            cfg.tolerance = tol;
        }
        if let Some(text) = &args.instantiations {
            let groups = text
                .split('|')
                .map(|g| parse_instantiation(g, &self.table))
                .collect::<Result<Vec<_>, ZeroTestError>>()
                .map_err(|e| CliError::Config(format!("--instantiations: {e}")))?;
            cfg.instantiations = groups;
        }
        if let Ok(seed) = std::env::var(SEED_VAR) {
            let seed = parse_seed(&seed).ok_or_else(|| CliError::Config(format!("{SEED_VAR}: bad seed `{seed}`")))?;
            cfg.seed = seed;
        }
        Ok(cfg)
    }
}

/// Decimal or `0x`-prefixed hexadecimal.
fn parse_seed(s: &str) -> Option<u64> {
    let s = s.trim().replace('_', "");
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16).ok(),
        None => s.parse().ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declarations() {
        assert_eq!(parse_declaration("q(x)"), Some(("q".into(), vec![Symbol::X])));
        assert_eq!(
            parse_declaration(" k ( t , u ) "),
            Some(("k".into(), vec![Symbol::T, Symbol::u()]))
        );
        assert_eq!(parse_declaration("q(x, x)"), None);
        assert_eq!(parse_declaration("q(y)"), None);
        assert_eq!(parse_declaration("q"), None);
    }

    #[test]
    fn unknown_functions_are_declared() {
        let mut inputs = Inputs::new(&RunArgs::default()).unwrap();
        let e = inputs.expr("alpha", "q(x) + c*u").unwrap();
        assert_eq!(inputs.table.get("q").unwrap().signature, vec![Symbol::X]);
        assert!(inputs.table.is_param("c"));
        assert_eq!(
            e.function_names().into_iter().collect::<Vec<_>>(),
            vec!["q".to_string()]
        );
        assert_eq!(inputs.diagnostics.len(), 2);
    }

    #[test]
    fn compound_arguments_need_a_declaration() {
        let mut inputs = Inputs::new(&RunArgs::default()).unwrap();
        let err = inputs.expr("alpha", "q(x + u)").unwrap_err();
        assert!(err.to_string().contains("--function"), "{err}");
    }

    #[test]
    fn one_equation_source() {
        let mut inputs = Inputs::new(&RunArgs::default()).unwrap();
        assert!(inputs.spec(&RunArgs::default()).is_err());
        let both = RunArgs {
            alpha: Some("u".into()),
            builtin: Some("burgers".into()),
            ..RunArgs::default()
        };
        assert!(inputs.spec(&both).is_err());
        let f = RunArgs {
            f: Some("u*u_x".into()),
            ..RunArgs::default()
        };
        assert!(matches!(inputs.spec(&f).unwrap(), EvolutionSpec::Generic { .. }));
    }

    #[test]
    fn seeds() {
        assert_eq!(parse_seed("42"), Some(42));
        assert_eq!(parse_seed("0x5eed_1e0c"), Some(0x5eed_1e0c));
        assert_eq!(parse_seed("seed"), None);
    }
}

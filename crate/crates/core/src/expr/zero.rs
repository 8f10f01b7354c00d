//! Probabilistic zero-equivalence testing.
//!
//! An expression that does not normalize to the literal `0` is evaluated at
//! random jet points under several polynomial instantiations of its opaque
//! function symbols. It is declared zero when every successful evaluation is
//! below `tolerance * (1 + scale)`, where `scale` is the largest magnitude of
//! any subterm met during that evaluation.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::eval::{eval_scaled, EvalError, FunctionInstantiation, Instance, JetPoint};
use super::poly::{expr_to_polynomial, MultiPolynomial, Polynomial};
use super::{normalize, parse, DerivativeRule, Expr, FunctionTable, Symbol};

pub const DEFAULT_SAMPLES: usize = 200;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 0x5eed_1e0c;

/// Degree of the random polynomials filled in for uninstantiated symbols.
const FILL_DEGREE: u32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTestConfig {
    /// Sample points per instantiation.
    pub samples: usize,
    /// Each coordinate is drawn from `[-hi, -lo] ∪ [lo, hi]`.
    pub lo: f64,
    pub hi: f64,
    /// One pass per entry; symbols missing from an entry get random
    /// polynomials.
    pub instantiations: Vec<FunctionInstantiation>,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for ZeroTestConfig {
    fn default() -> Self {
        ZeroTestConfig {
            samples: DEFAULT_SAMPLES,
            lo: 0.1,
            hi: 2.0,
            instantiations: default_instantiations(),
            tolerance: DEFAULT_TOLERANCE,
            seed: DEFAULT_SEED,
        }
    }
}

/// `a := u`, `a := 2 + u^2`, `a := u + u^3/3`. Constant `a` is excluded: the
/// Burgers generators divide by `a'`.
pub fn default_instantiations() -> Vec<FunctionInstantiation> {
    vec![
        FunctionInstantiation::univariate("a", vec![0.0, 1.0]),
        FunctionInstantiation::univariate("a", vec![2.0, 0.0, 1.0]),
        FunctionInstantiation::univariate("a", vec![0.0, 1.0, 0.0, 1.0 / 3.0]),
    ]
}

impl ZeroTestConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_instantiations(mut self, instantiations: Vec<FunctionInstantiation>) -> Self {
        self.instantiations = instantiations;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub point: JetPoint,
    pub value: f64,
    pub scale: f64,
    /// Index into `ZeroTestConfig::instantiations`.
    pub instantiation: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZeroVerdict {
    /// `structural` is set when normalization alone produced `0`.
    Zero {
        structural: bool,
        evaluations: usize,
    },
    NonZero(Box<Witness>),
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroVerdict::Zero { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            ZeroVerdict::NonZero(w) => Some(w),
            ZeroVerdict::Zero { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZeroTestError {
    #[error("inconclusive: every sample point of `{0}` hit a pole; enlarge the box or change instantiations")]
    Inconclusive(Expr),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("bad instantiation `{0}`")]
    BadInstantiation(String),
}

/// Function names reachable from `e`, following rewrite rules.
fn needed_functions(e: &Expr, table: &FunctionTable) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut stack: Vec<String> = e.function_names().into_iter().collect();
    while let Some(name) = stack.pop() {
        if !out.insert(name.clone()) {
            continue;
        }
        if let Some(def) = table.get(&name) {
            if let DerivativeRule::Rewrite(body) = &def.rule {
                stack.extend(body.function_names());
            }
        }
    }
    out
}

fn random_fill(arity: usize, rng: &mut ChaCha8Rng) -> Instance {
    if arity == 1 {
        let coeffs = (0..=FILL_DEGREE).map(|_| rng.gen_range(-1.0..1.0)).collect();
        return Instance::Univariate(Polynomial::new(coeffs));
    }
    let mut terms = Vec::new();
    let mut exps = vec![0u32; arity];
    loop {
        if exps.iter().sum::<u32>() <= FILL_DEGREE {
            terms.push((exps.clone(), rng.gen_range(-1.0..1.0)));
        }
        // odometer over [0, FILL_DEGREE]^arity
        let mut i = 0;
        loop {
            if i == arity {
                return Instance::Multivariate(MultiPolynomial { arity, terms });
            }
            exps[i] += 1;
            if exps[i] <= FILL_DEGREE {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}

fn sample(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let m = rng.gen_range(lo..=hi);
    if rng.gen_bool(0.5) {
        m
    } else {
        -m
    }
}

/// Decides whether `e` vanishes identically.
pub fn is_zero(e: &Expr, cfg: &ZeroTestConfig, table: &FunctionTable) -> Result<ZeroVerdict, ZeroTestError> {
    let n = normalize(e);
    if n.is_const_zero() {
        return Ok(ZeroVerdict::Zero {
            structural: true,
            evaluations: 0,
        });
    }
    let symbols: Vec<Symbol> = n.symbols().into_iter().collect();
    let needed = needed_functions(&n, table);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let passes: Vec<FunctionInstantiation> = if cfg.instantiations.is_empty() {
        vec![FunctionInstantiation::new()]
    } else {
        cfg.instantiations.clone()
    };

    let mut evaluations = 0usize;
    for (k, base) in passes.into_iter().enumerate() {
        let mut inst = base;
        for name in &needed {
            if inst.contains(name) {
                continue;
            }
            match table.get(name) {
                Some(def) if matches!(def.rule, DerivativeRule::Rewrite(_)) => {}
                Some(def) => inst.set(name, random_fill(def.arity(), &mut rng)),
                None => {}
            }
        }
        inst.resolve_rewrites(table, rng.gen_range(0.5..2.0));

        let mut point = JetPoint::new().with_functions(inst);
        for _ in 0..cfg.samples {
            for s in &symbols {
                point.set(s.clone(), sample(&mut rng, cfg.lo, cfg.hi));
            }
            match eval_scaled(&n, &point, table) {
                Ok((value, scale)) => {
                    evaluations += 1;
                    if value.abs() > cfg.tolerance * (1.0 + scale) {
                        return Ok(ZeroVerdict::NonZero(Box::new(Witness {
                            point,
                            value,
                            scale,
                            instantiation: k,
                        })));
                    }
                }
                Err(EvalError::Pole(_)) | Err(EvalError::NonFinite(_)) | Err(EvalError::NegativeBase(_)) => {}
                Err(other) => return Err(other.into()),
            }
        }
    }
    if evaluations == 0 {
        return Err(ZeroTestError::Inconclusive(n));
    }
    Ok(ZeroVerdict::Zero {
        structural: false,
        evaluations,
    })
}

/// Parses `name := polynomial` (or `name = polynomial`) entries separated by
/// `;`. Right-hand sides are polynomials in the symbol's signature variable.
pub fn parse_instantiation(text: &str, table: &FunctionTable) -> Result<FunctionInstantiation, ZeroTestError> {
    let mut inst = FunctionInstantiation::new();
    for entry in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = || ZeroTestError::BadInstantiation(entry.to_string());
        let (name, rhs) = entry
            .split_once(":=")
            .or_else(|| entry.split_once('='))
            .ok_or_else(bad)?;
        let name = name.trim();
        let def = table.get(name).ok_or_else(bad)?;
        if def.arity() != 1 {
            return Err(bad());
        }
        let body = parse(rhs.trim(), table).map_err(|_| bad())?;
        let poly = expr_to_polynomial(&body, &def.signature[0], &inst).ok_or_else(bad)?;
        inst.set(name, Instance::Univariate(poly));
    }
    Ok(inst)
}

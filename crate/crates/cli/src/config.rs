use std::fs;
use std::path::Path;

use clap::Args;

use crate::error::CliError;

/// Every option shared by the subcommands. All fields are optional so that
/// a config file can fill whatever the command line leaves unset.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Coefficient of u_x in u_t + alpha u_x + beta = 0.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Right side f of u_t + f(t, x, u, u_x) = 0.
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    /// A built-in equation; only `burgers` (u_t + a(u) u_x = 0) exists.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Polynomial a(u) for numeric runs of the built-in equation.
    #[arg(long = "a", allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Declares an opaque function, e.g. `q(x)` or `k(t, u)`.
    #[arg(long = "function")]
    pub functions: Vec<String>,

    /// Catalog generator X1..X8 or Xu.
    #[arg(long)]
    pub generator: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<String>,
    /// Scales the generator by lambda(u).
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Catalog conservation law l1..l5b of the built-in equation.
    #[arg(long)]
    pub catalog: Option<String>,
    /// Builds the general vector with v left free.
    #[arg(long)]
    pub general: bool,
    /// Substitution v = phi(u).
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,

    /// Zero-test sample points per instantiation.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Instantiation groups separated by `|`, entries by `;`,
    /// e.g. `a := u | a := 2 + u^2`.
    #[arg(long)]
    pub instantiations: Option<String>,
    #[arg(long = "zero-tol")]
    pub zero_tol: Option<f64>,

    /// Initial profile: sin, gaussian, bump or an expression in x.
    #[arg(long, allow_hyphen_values = true)]
    pub numeric: Option<String>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub domain: Option<Vec<f64>>,
    /// periodic or compact.
    #[arg(long)]
    pub boundary: Option<String>,
    /// Quadrature intervals.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    pub times: Option<Vec<f64>>,
    /// Tolerance of the numeric conservation check.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "inversion-tol")]
    pub inversion_tol: Option<f64>,

    /// Writes the JSON report to this path.
    #[arg(long)]
    pub out: Option<String>,
    /// text or json on stdout.
    #[arg(long)]
    pub format: Option<String>,
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    value.split_whitespace().map(|v| parse_num(key, v)).collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(CliError::Config(format!(
            "`{key}`: expected true or false, got `{other}`"
        ))),
    }
}

fn fill<T>(slot: &mut Option<T>, value: T) {
    if slot.is_none() {
        *slot = Some(value);
    }
}

impl RunArgs {
    /// Fills unset fields from `key = value` lines. Keys are the flag names;
    /// `_` and `-` are interchangeable. `#` starts a comment.
    pub fn merge_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config `{}`: {e}", path.display())))?;
        self.merge_text(&text)
    }

    pub fn merge_text(&mut self, text: &str) -> Result<(), CliError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("config line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim().replace('_', "-");
            let value = strip_quotes(value.trim());
            self.set(&key, value)?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let s = value.to_string();
        match key {
            "alpha" => fill(&mut self.alpha, s),
            "beta" => fill(&mut self.beta, s),
            "f" => fill(&mut self.f, s),
            "builtin" => fill(&mut self.builtin, s),
            "a" => fill(&mut self.a, s),
            // Declarations from the file add to those on the command line.
            "function" => self
                .functions
                .extend(value.split(';').map(|f| f.trim().to_string()).filter(|f| !f.is_empty())),
            "generator" => fill(&mut self.generator, s),
            "tau" => fill(&mut self.tau, s),
            "xi" => fill(&mut self.xi, s),
            "eta" => fill(&mut self.eta, s),
            "lambda" => fill(&mut self.lambda, s),
            "catalog" => fill(&mut self.catalog, s),
            "general" => self.general |= parse_bool(key, value)?,
            "phi" => fill(&mut self.phi, s),
            "samples" => fill(&mut self.samples, parse_num(key, value)?),
            "instantiations" => fill(&mut self.instantiations, s),
            "zero-tol" => fill(&mut self.zero_tol, parse_num(key, value)?),
            "numeric" => fill(&mut self.numeric, s),
            "domain" => {
                let d = parse_list(key, value)?;
                if d.len() != 2 {
                    return Err(CliError::Config("`domain` needs exactly two numbers".into()));
                }
                fill(&mut self.domain, d)
            }
            "boundary" => fill(&mut self.boundary, s),
            "nodes" => fill(&mut self.nodes, parse_num(key, value)?),
            "times" => fill(&mut self.times, parse_list(key, value)?),
            "tol" => fill(&mut self.tol, parse_num(key, value)?),
            "inversion-tol" => fill(&mut self.inversion_tol, parse_num(key, value)?),
            "out" => fill(&mut self.out, s),
            "format" => fill(&mut self.format, s),
            other => return Err(CliError::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }
}

fn strip_quotes(v: &str) -> &str {
    for q in ['"', '\''] {
        if v.len() >= 2 && v.starts_with(q) && v.ends_with(q) {
            return &v[1..v.len() - 1];
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let mut args = RunArgs {
            alpha: Some("u".into()),
            ..RunArgs::default()
        };
        args.merge_text("alpha = x\nbeta = \"u^2\"  # comment\nzero_tol = 1e-8\ndomain = -2 3\n")
            .unwrap();
        assert_eq!(args.alpha.as_deref(), Some("u"));
        assert_eq!(args.beta.as_deref(), Some("u^2"));
        assert_eq!(args.zero_tol, Some(1e-8));
        assert_eq!(args.domain, Some(vec![-2.0, 3.0]));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(RunArgs::default().merge_text("colour = red").is_err());
        assert!(RunArgs::default().merge_text("nodes = many").is_err());
        assert!(RunArgs::default().merge_text("just text").is_err());
        assert!(RunArgs::default().merge_text("domain = 1").is_err());
    }

    #[test]
    fn functions_accumulate() {
        let mut args = RunArgs {
            functions: vec!["q(x)".into()],
            ..RunArgs::default()
        };
        args.merge_text("function = k(t, u); m(u)").unwrap();
        assert_eq!(args.functions, vec!["q(x)", "k(t, u)", "m(u)"]);
    }
}

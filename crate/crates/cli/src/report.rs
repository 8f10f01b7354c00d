use std::fmt::Write as _;

use lieconserve::expr::Witness;
use lieconserve::ZeroTestConfig;
use serde_json::{json, Value};

use crate::error::Exit;

/// Rounds to 12 significant digits; text and JSON both print the result.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Shortest text that parses back to `round12(x)`.
pub fn fmt_num(x: f64) -> String {
    let r = round12(x);
    if r.is_nan() {
        "nan".into()
    } else if r.is_infinite() {
        if r > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if r == 0.0 || (1e-4..1e7).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// Non-finite values become `null`.
pub fn num(x: f64) -> Value {
    let r = round12(x);
    if r.is_finite() {
        json!(r)
    } else {
        Value::Null
    }
}

fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|x| num(*x)).collect())
}

#[derive(Debug, Clone)]
pub struct WitnessInfo {
    pub point: Vec<(String, f64)>,
    pub value: f64,
    pub scale: f64,
    pub instantiation: String,
}

impl WitnessInfo {
    pub fn new(w: &Witness, cfg: &ZeroTestConfig) -> WitnessInfo {
        // The point carries the filled-in instantiation; fall back to the
        // configured one when nothing was recorded.
        let mut instantiation = w.point.functions.to_string();
        if instantiation.is_empty() {
            if let Some(inst) = cfg.instantiations.get(w.instantiation) {
                instantiation = inst.to_string();
            }
        }
        WitnessInfo {
            point: w.point.values.iter().map(|(s, v)| (s.to_string(), *v)).collect(),
            value: w.value,
            scale: w.scale,
            instantiation,
        }
    }

    fn text(&self) -> String {
        let coords: Vec<String> = self
            .point
            .iter()
            .map(|(s, v)| format!("{s} = {}", fmt_num(*v)))
            .collect();
        format!(
            "value {} (scale {}) at {{{}}} with {}",
            fmt_num(self.value),
            fmt_num(self.scale),
            coords.join(", "),
            if self.instantiation.is_empty() {
                "no instantiation"
            } else {
                &self.instantiation
            }
        )
    }

    fn json(&self) -> Value {
        let point: serde_json::Map<String, Value> = self.point.iter().map(|(s, v)| (s.clone(), num(*v))).collect();
        json!({
            "point": point,
            "value": num(self.value),
            "scale": num(self.scale),
            "instantiation": self.instantiation,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Residual {
    pub name: String,
    pub expr: String,
    pub zero: bool,
    pub witness: Option<WitnessInfo>,
}

#[derive(Debug, Clone)]
pub struct ClawSection {
    pub source: String,
    pub c0: String,
    pub c1: String,
    pub divergence: String,
    pub divergence_zero: bool,
    pub witness: Option<WitnessInfo>,
}

#[derive(Debug, Clone)]
pub struct NumericSection {
    pub profile: String,
    pub a: String,
    pub domain: (f64, f64),
    pub boundary: String,
    pub mode: String,
    pub shock_time: f64,
    pub cutoff: f64,
    pub nodes: usize,
    pub tolerance: f64,
    pub times: Vec<f64>,
    pub q: Vec<f64>,
    pub q0: f64,
    pub deviations: Vec<f64>,
    pub drift: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    /// First line of the text report.
    pub summary: String,
    pub verdict: String,
    pub phi: Option<String>,
    pub residuals: Vec<Residual>,
    pub claw: Option<ClawSection>,
    pub numeric: Option<NumericSection>,
    pub diagnostics: Vec<String>,
    pub exit: Exit,
}

impl Report {
    pub fn new(command: &'static str) -> Report {
        Report {
            command,
            summary: String::new(),
            verdict: String::new(),
            phi: None,
            residuals: Vec::new(),
            claw: None,
            numeric: None,
            diagnostics: Vec::new(),
            exit: Exit::Ok,
        }
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.summary);
        for r in &self.residuals {
            let status = if r.zero {
                "≡ 0".to_string()
            } else {
                "NOT zero".to_string()
            };
            let _ = writeln!(out, "{} = {}  [{status}]", r.name, r.expr);
            if let Some(w) = &r.witness {
                let _ = writeln!(out, "  witness: {}", w.text());
            }
        }
        if let Some(c) = &self.claw {
            let _ = writeln!(out, "conserved vector ({})", c.source);
            let _ = writeln!(out, "C0 = {}", c.c0);
            let _ = writeln!(out, "C1 = {}", c.c1);
            if c.divergence_zero {
                let _ = writeln!(out, "divergence ≡ 0");
            } else {
                let _ = writeln!(out, "divergence = {}  [NOT zero]", c.divergence);
                if let Some(w) = &c.witness {
                    let _ = writeln!(out, "  witness: {}", w.text());
                }
            }
        }
        if let Some(n) = &self.numeric {
            let _ = writeln!(out, "numeric check: u0 = {}, a(u) = {}", n.profile, n.a);
            let _ = writeln!(
                out,
                "  domain [{}, {}] ({}), {} intervals, mode {}",
                fmt_num(n.domain.0),
                fmt_num(n.domain.1),
                n.boundary,
                n.nodes,
                n.mode
            );
            let _ = writeln!(
                out,
                "  shock time {}, cutoff {}",
                fmt_num(n.shock_time),
                fmt_num(n.cutoff)
            );
            let _ = writeln!(out, "  Q(0) = {}", fmt_num(n.q0));
            let _ = writeln!(out, "  {:>20}  {:>20}  {:>20}", "t", "Q(t)", "deviation");
            for i in 0..n.times.len() {
                let _ = writeln!(
                    out,
                    "  {:>20}  {:>20}  {:>20}",
                    fmt_num(n.times[i]),
                    fmt_num(n.q[i]),
                    fmt_num(n.deviations[i])
                );
            }
            let _ = writeln!(
                out,
                "  drift {} (tolerance {}): {}",
                fmt_num(n.drift),
                fmt_num(n.tolerance),
                if n.pass { "pass" } else { "FAIL" }
            );
        }
        for d in &self.diagnostics {
            let _ = writeln!(out, "note: {d}");
        }
        out
    }

    pub fn json(&self) -> Value {
        let residuals: Vec<Value> = self
            .residuals
            .iter()
            .map(|r| {
                json!({
                    "name": r.name,
                    "expr": r.expr,
                    "zero": r.zero,
                    "witness": r.witness.as_ref().map(WitnessInfo::json),
                })
            })
            .collect();
        let claw = self.claw.as_ref().map(|c| {
            json!({
                "source": c.source,
                "C0": c.c0,
                "C1": c.c1,
                "divergence": c.divergence,
                "divergence_zero": c.divergence_zero,
                "witness": c.witness.as_ref().map(WitnessInfo::json),
            })
        });
        let numeric = self.numeric.as_ref().map(|n| {
            json!({
                "profile": n.profile,
                "a": n.a,
                "domain": nums(&[n.domain.0, n.domain.1]),
                "boundary": n.boundary,
                "mode": n.mode,
                "shock_time": num(n.shock_time),
                "cutoff": num(n.cutoff),
                "nodes": n.nodes,
                "tolerance": num(n.tolerance),
                "times": nums(&n.times),
                "Q": nums(&n.q),
                "Q0": num(n.q0),
                "deviations": nums(&n.deviations),
                "drift": num(n.drift),
                "pass": n.pass,
            })
        });
        json!({
            "command": self.command,
            "summary": self.summary,
            "verdict": self.verdict,
            "phi": self.phi,
            "residuals": residuals,
            "claw": claw,
            "numeric": numeric,
            "diagnostics": self.diagnostics,
            "exit_code": self.exit.code(),
        })
    }
}

/// Report for a run that stopped on an error.
pub fn error_json(command: &str, message: &str, exit: Exit) -> Value {
    json!({
        "command": command,
        "summary": message,
        "verdict": "error",
        "phi": Value::Null,
        "residuals": [],
        "claw": Value::Null,
        "numeric": Value::Null,
        "diagnostics": [message],
        "exit_code": exit.code(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_shared_by_text_and_json() {
        for x in [
            std::f64::consts::PI,
            1.0 / 3.0,
            2.5e-13,
            -7.123456789012345e8,
            0.0,
            1e300,
        ] {
            let text: f64 = fmt_num(x).parse().unwrap();
            assert_eq!(text, num(x).as_f64().unwrap());
            assert_eq!(text, round12(x));
        }
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(num(f64::NAN), Value::Null);
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
    }
}

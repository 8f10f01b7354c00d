use crate::expr::{diff, eval, Expr, FunctionTable, JetPoint, Polynomial, Symbol};

use super::CharError;

/// Initial data `u0(x)` with its derivative.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialProfile {
    /// `offset + amplitude * sin(wavenumber * x)`.
    Sine {
        amplitude: f64,
        wavenumber: f64,
        offset: f64,
    },
    /// `offset + amplitude * exp(-((x - center)/width)^2)`.
    Gaussian {
        amplitude: f64,
        center: f64,
        width: f64,
        offset: f64,
    },
    /// Cubic B-spline scaled to `height` at `center`, supported on
    /// `[center - half_width, center + half_width]`; `C^2` and zero outside.
    CubicBump {
        center: f64,
        half_width: f64,
        height: f64,
    },
    Polynomial(Polynomial),
    /// An expression in `x`; its derivative is taken symbolically.
    Expr(ExprProfile),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExprProfile {
    pub value: Expr,
    pub derivative: Expr,
    pub table: FunctionTable,
}

impl InitialProfile {
    pub fn sine() -> InitialProfile {
        InitialProfile::Sine {
            amplitude: 1.0,
            wavenumber: 1.0,
            offset: 0.0,
        }
    }

    pub fn gaussian() -> InitialProfile {
        InitialProfile::Gaussian {
            amplitude: 1.0,
            center: 0.0,
            width: 1.0,
            offset: 0.0,
        }
    }

    pub fn bump() -> InitialProfile {
        InitialProfile::CubicBump {
            center: 0.0,
            half_width: 1.0,
            height: 1.0,
        }
    }

    /// Rejects expressions containing anything but `x`, constants and
    /// parameters.
    pub fn from_expr(value: Expr, table: &FunctionTable) -> Result<InitialProfile, CharError> {
        if let Some(s) = value.symbols().into_iter().find(|s| *s != Symbol::X) {
            return Err(CharError::BadProfile(format!(
                "initial profile may only depend on x, found `{s}`"
            )));
        }
        if let Some(f) = value.function_names().into_iter().next() {
            return Err(CharError::BadProfile(format!(
                "initial profile may not use the opaque symbol `{f}`"
            )));
        }
        let derivative = diff(&value, &Symbol::X, table).map_err(|e| CharError::BadProfile(e.to_string()))?;
        Ok(InitialProfile::Expr(ExprProfile {
            value,
            derivative,
            table: table.clone(),
        }))
    }

    pub fn value(&self, x: f64) -> Result<f64, CharError> {
        Ok(match self {
            InitialProfile::Sine {
                amplitude,
                wavenumber,
                offset,
            } => offset + amplitude * (wavenumber * x).sin(),
            InitialProfile::Gaussian {
                amplitude,
                center,
                width,
                offset,
            } => {
                let s = (x - center) / width;
                offset + amplitude * (-s * s).exp()
            }
            InitialProfile::CubicBump {
                center,
                half_width,
                height,
            } => height * 1.5 * bspline(2.0 * (x - center) / half_width),
            InitialProfile::Polynomial(p) => p.eval(x),
            InitialProfile::Expr(p) => eval_x(&p.value, x, &p.table)?,
        })
    }

    pub fn derivative(&self, x: f64) -> Result<f64, CharError> {
        Ok(match self {
            InitialProfile::Sine {
                amplitude, wavenumber, ..
            } => amplitude * wavenumber * (wavenumber * x).cos(),
            InitialProfile::Gaussian {
                amplitude,
                center,
                width,
                ..
            } => {
                let s = (x - center) / width;
                -2.0 * amplitude * s / width * (-s * s).exp()
            }
            InitialProfile::CubicBump {
                center,
                half_width,
                height,
            } => height * 1.5 * bspline_derivative(2.0 * (x - center) / half_width) * 2.0 / half_width,
            InitialProfile::Polynomial(p) => p.derivative().eval(x),
            InitialProfile::Expr(p) => eval_x(&p.derivative, x, &p.table)?,
        })
    }

    /// `[lo, hi]` outside of which the profile vanishes, if any.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            InitialProfile::CubicBump { center, half_width, .. } => Some((center - half_width, center + half_width)),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            InitialProfile::Sine {
                amplitude,
                wavenumber,
                offset,
            } => {
                format!("{offset} + {amplitude}*sin({wavenumber}*x)")
            }
            InitialProfile::Gaussian {
                amplitude,
                center,
                width,
                offset,
            } => {
                format!("{offset} + {amplitude}*exp(-((x - {center})/{width})^2)")
            }
            InitialProfile::CubicBump {
                center,
                half_width,
                height,
            } => {
                format!(
                    "cubic bump of height {height} on [{}, {}]",
                    center - half_width,
                    center + half_width
                )
            }
            InitialProfile::Polynomial(p) => format!("polynomial {:?}", p.coeffs),
            InitialProfile::Expr(p) => p.value.to_string(),
        }
    }
}

fn eval_x(e: &Expr, x: f64, table: &FunctionTable) -> Result<f64, CharError> {
    let point = JetPoint::new().with(Symbol::X, x);
    eval(e, &point, table).map_err(|err| CharError::Eval(err.to_string()))
}

/// Uniform cubic B-spline on `[-2, 2]`, peak `2/3` at zero.
fn bspline(s: f64) -> f64 {
    let a = s.abs();
    if a >= 2.0 {
        0.0
    } else if a >= 1.0 {
        (2.0 - a).powi(3) / 6.0
    } else {
        2.0 / 3.0 - a * a + a * a * a / 2.0
    }
}

fn bspline_derivative(s: f64) -> f64 {
    let a = s.abs();
    let d = if a >= 2.0 {
        0.0
    } else if a >= 1.0 {
        -(2.0 - a).powi(2) / 2.0
    } else {
        -2.0 * a + 1.5 * a * a
    };
    d * s.signum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn fd(p: &InitialProfile, x: f64) -> f64 {
        let h = 1e-6;
        (p.value(x + h).unwrap() - p.value(x - h).unwrap()) / (2.0 * h)
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let t = FunctionTable::new();
        let profiles = [
            InitialProfile::sine(),
            InitialProfile::Gaussian {
                amplitude: 0.7,
                center: 0.3,
                width: 0.8,
                offset: 0.1,
            },
            InitialProfile::bump(),
            InitialProfile::Polynomial(Polynomial::new(vec![1.0, -2.0, 0.5])),
            InitialProfile::from_expr(parse("x^2/(1 + x^2)", &t).unwrap(), &t).unwrap(),
        ];
        for p in &profiles {
            for x in [-1.7, -0.6, 0.2, 0.9, 1.3] {
                let d = p.derivative(x).unwrap();
                assert!((d - fd(p, x)).abs() < 1e-6 * (1.0 + d.abs()), "{} at {x}", p.name());
            }
        }
    }

    #[test]
    fn bump_is_compact_and_normalized() {
        let b = InitialProfile::CubicBump {
            center: 1.0,
            half_width: 2.0,
            height: 3.0,
        };
        assert_eq!(b.value(1.0).unwrap(), 3.0);
        assert_eq!(b.value(-1.0).unwrap(), 0.0);
        assert_eq!(b.value(3.5).unwrap(), 0.0);
        assert_eq!(b.support(), Some((-1.0, 3.0)));
    }

    #[test]
    fn expression_profiles_must_be_in_x() {
        let t = FunctionTable::burgers();
        assert!(InitialProfile::from_expr(parse("u + x", &t).unwrap(), &t).is_err());
        assert!(InitialProfile::from_expr(parse("a(x)", &t).unwrap(), &t).is_err());
    }
}

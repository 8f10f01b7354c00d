//! Exact pre-shock solutions of `u_t + a(u) u_x = 0` by characteristics,
//! and numeric checks of conservation laws against them.
//!
//! `u` is constant along `x = xi + a(u0(xi)) t`. Before the first crossing
//! of characteristics the map `xi -> xi + a(u0(xi)) t` is strictly
//! increasing and is inverted pointwise.

mod law;
mod profile;

use thiserror::Error;

use crate::expr::Polynomial;

pub use law::{verify_law, CheckMode, ConservationReport, InstantiatedLaw};
pub use profile::{ExprProfile, InitialProfile};

/// Default tolerance on `|xi + a(u0(xi)) t - x|`.
pub const DEFAULT_INVERSION_TOL: f64 = 1e-12;
/// Queries are only answered for `t <= PRESHOCK_FRACTION * shock_time`.
pub const PRESHOCK_FRACTION: f64 = 0.95;
/// Grid size for locating the steepest compression.
pub const SHOCK_GRID: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CharError {
    #[error("bad initial profile: {0}")]
    BadProfile(String),
    #[error("evaluation failed: {0}")]
    Eval(String),
    #[error("bad domain: {0}")]
    BadDomain(String),
    #[error("non-finite value of d/dxi a(u0(xi)) at xi = {0}")]
    NonFinite(f64),
    #[error("time {t} is beyond the pre-shock cutoff {limit}")]
    PastCutoff { t: f64, limit: f64 },
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("characteristic inversion failed at x = {x}, t = {t}: no sign change on [{lo}, {hi}]")]
    Bracket { x: f64, t: f64, lo: f64, hi: f64 },
    #[error("characteristics cross before the computed shock time (1 + t (a o u0)' = {0} at t = 0.95 t*)")]
    NotMonotone(f64),
    #[error("quadrature needs an even number of at least 64 intervals, got {0}")]
    Nodes(usize),
    #[error("times must be positive and strictly increasing")]
    Times,
    #[error("law cannot be evaluated numerically: {0}")]
    Law(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    /// The solution vanishes near both ends for all queried times.
    CompactSupport,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
    pub boundary: Boundary,
}

impl Domain {
    pub fn new(lo: f64, hi: f64, boundary: Boundary) -> Result<Domain, CharError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(CharError::BadDomain(format!("need finite lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Domain { lo, hi, boundary })
    }

    pub fn periodic(lo: f64, hi: f64) -> Result<Domain, CharError> {
        Domain::new(lo, hi, Boundary::Periodic)
    }

    pub fn compact(lo: f64, hi: f64) -> Result<Domain, CharError> {
        Domain::new(lo, hi, Boundary::CompactSupport)
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    /// `x` mapped into `[lo, hi)` for periodic domains; unchanged otherwise.
    pub fn wrap(&self, x: f64) -> f64 {
        match self.boundary {
            Boundary::Periodic => self.lo + (x - self.lo).rem_euclid(self.length()),
            Boundary::CompactSupport => x,
        }
    }

    fn grid(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        // Periodic grids omit the duplicated right end.
        let steps = match self.boundary {
            Boundary::Periodic => n,
            Boundary::CompactSupport => n - 1,
        };
        let h = self.length() / steps as f64;
        (0..n).map(move |i| self.lo + h * i as f64)
    }
}

/// The characteristic speed `a(u0(xi))` and its `xi`-derivative.
struct Characteristic<'a> {
    a: &'a Polynomial,
    a_prime: &'a Polynomial,
    u0: &'a InitialProfile,
}

impl Characteristic<'_> {
    fn speed(&self, xi: f64) -> Result<f64, CharError> {
        Ok(self.a.eval(self.u0.value(xi)?))
    }

    fn compression(&self, xi: f64) -> Result<f64, CharError> {
        let d = self.a_prime.eval(self.u0.value(xi)?) * self.u0.derivative(xi)?;
        if d.is_finite() {
            Ok(d)
        } else {
            Err(CharError::NonFinite(xi))
        }
    }
}

/// Golden-section minimization of `f` on `[lo, hi]`.
fn golden_min<F: Fn(f64) -> Result<f64, CharError>>(f: F, mut lo: f64, mut hi: f64) -> Result<(f64, f64), CharError> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..200 {
        if (hi - lo).abs() < 1e-14 * (1.0 + lo.abs()) {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d)?;
        }
    }
    let x = (lo + hi) / 2.0;
    Ok((x, f(x)?))
}

/// `-1 / min d/dxi a(u0(xi))` over the domain, or `+inf` when the minimum
/// is not negative. The grid minimum is refined by golden-section search
/// between its neighbours.
pub fn shock_time(a: &Polynomial, u0: &InitialProfile, domain: &Domain) -> Result<f64, CharError> {
    let a_prime = a.derivative();
    let ch = Characteristic {
        a,
        a_prime: &a_prime,
        u0,
    };
    let h = domain.length() / SHOCK_GRID as f64;
    let mut best = (domain.lo, f64::INFINITY);
    for xi in domain.grid(SHOCK_GRID) {
        let d = ch.compression(xi)?;
        if d < best.1 {
            best = (xi, d);
        }
    }
    let (_, mut m) = best;
    let (lo, hi) = match domain.boundary {
        Boundary::Periodic => (best.0 - h, best.0 + h),
        Boundary::CompactSupport => ((best.0 - h).max(domain.lo), (best.0 + h).min(domain.hi)),
    };
    let (_, refined) = golden_min(|xi| ch.compression(xi), lo, hi)?;
    m = m.min(refined);
    Ok(if m < 0.0 { -1.0 / m } else { f64::INFINITY })
}

/// Exact solution of `u_t + a(u) u_x = 0` with `u(x, 0) = u0(x)` up to
/// `PRESHOCK_FRACTION * shock_time`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicSolution {
    a: Polynomial,
    a_prime: Polynomial,
    u0: InitialProfile,
    domain: Domain,
    shock_time: f64,
    tolerance: f64,
    speed_range: (f64, f64),
}

impl CharacteristicSolution {
    pub fn new(a: Polynomial, u0: InitialProfile, domain: Domain) -> Result<CharacteristicSolution, CharError> {
        let t_star = shock_time(&a, &u0, &domain)?;
        let a_prime = a.derivative();
        let ch = Characteristic {
            a: &a,
            a_prime: &a_prime,
            u0: &u0,
        };
        let t_check = if t_star.is_finite() {
            PRESHOCK_FRACTION * t_star
        } else {
            0.0
        };
        let mut speed_range = (f64::INFINITY, f64::NEG_INFINITY);
        for xi in domain.grid(4 * SHOCK_GRID) {
            let s = ch.speed(xi)?;
            speed_range = (speed_range.0.min(s), speed_range.1.max(s));
            let jac = 1.0 + t_check * ch.compression(xi)?;
            if jac <= 0.0 {
                return Err(CharError::NotMonotone(jac));
            }
        }
        if let Some((lo, hi)) = u0.support() {
            // The profile is zero outside its support, so speed a(0) occurs too.
            if lo > domain.lo || hi < domain.hi {
                let s = a.eval(0.0);
                speed_range = (speed_range.0.min(s), speed_range.1.max(s));
            }
        }
        Ok(CharacteristicSolution {
            a,
            a_prime,
            u0,
            domain,
            shock_time: t_star,
            tolerance: DEFAULT_INVERSION_TOL,
            speed_range,
        })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> CharacteristicSolution {
        self.tolerance = tolerance;
        self
    }

    pub fn shock_time(&self) -> f64 {
        self.shock_time
    }

    /// Largest admissible query time.
    pub fn cutoff(&self) -> f64 {
        PRESHOCK_FRACTION * self.shock_time
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn speed(&self) -> &Polynomial {
        &self.a
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    fn characteristic(&self) -> Characteristic<'_> {
        Characteristic {
            a: &self.a,
            a_prime: &self.a_prime,
            u0: &self.u0,
        }
    }

    fn check_time(&self, t: f64) -> Result<(), CharError> {
        if t < 0.0 {
            return Err(CharError::NegativeTime(t));
        }
        if t > self.cutoff() {
            return Err(CharError::PastCutoff {
                t,
                limit: self.cutoff(),
            });
        }
        Ok(())
    }

    /// The foot `xi` of the characteristic through `(x, t)`.
    pub fn foot(&self, x: f64, t: f64) -> Result<f64, CharError> {
        self.check_time(t)?;
        let ch = self.characteristic();
        let x = self.domain.wrap(x);
        let at = |xi: f64| -> Result<f64, CharError> { Ok(xi + t * ch.speed(self.domain.wrap(xi))? - x) };
        if t == 0.0 {
            return Ok(x);
        }
        let (smin, smax) = self.speed_range;
        let margin = 1e-9 + 0.01 * (smax - smin).abs();
        let mut lo = x - t * (smax + margin);
        let mut hi = x - t * (smin - margin);
        let (mut f_lo, mut f_hi) = (at(lo)?, at(hi)?);
        let mut widen = 0;
        while f_lo > 0.0 || f_hi < 0.0 {
            widen += 1;
            if widen > 30 {
                return Err(CharError::Bracket { x, t, lo, hi });
            }
            let w = hi - lo + 1.0;
            if f_lo > 0.0 {
                lo -= w;
                f_lo = at(lo)?;
            }
            if f_hi < 0.0 {
                hi += w;
                f_hi = at(hi)?;
            }
        }
        // Safeguarded Newton: fall back to bisection whenever a step leaves
        // the bracket.
        let mut xi = 0.5 * (lo + hi);
        for _ in 0..200 {
            let f = at(xi)?;
            if f.abs() <= 0.1 * self.tolerance {
                return Ok(xi);
            }
            if f < 0.0 {
                lo = xi;
            } else {
                hi = xi;
            }
            let df = 1.0 + t * ch.compression(self.domain.wrap(xi))?;
            let newton = xi - f / df;
            xi = if df > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= f64::EPSILON * (1.0 + xi.abs()) {
                break;
            }
        }
        let residual = at(xi)?.abs();
        if residual <= self.tolerance {
            Ok(xi)
        } else {
            Err(CharError::Bracket { x, t, lo, hi })
        }
    }

    /// `(u, u_x)` at `(x, t)`: `u = u0(xi)` and
    /// `u_x = u0'(xi) / (1 + t (a o u0)'(xi))`.
    pub fn solve_at(&self, x: f64, t: f64) -> Result<(f64, f64), CharError> {
        let xi = self.domain.wrap(self.foot(x, t)?);
        let ch = self.characteristic();
        let u = self.u0.value(xi)?;
        let u_x = self.u0.derivative(xi)? / (1.0 + t * ch.compression(xi)?);
        Ok((u, u_x))
    }

    /// Composite Simpson rule over the domain of `density(t, x, u, u_x)`
    /// with `nodes` intervals.
    pub fn conserved_integral<F>(&self, density: F, t: f64, nodes: usize) -> Result<f64, CharError>
    where
        F: Fn(f64, f64, f64, f64) -> Result<f64, CharError>,
    {
        self.check_time(t)?;
        simpson(
            |x| {
                let (u, u_x) = self.solve_at(x, t)?;
                density(t, x, u, u_x)
            },
            self.domain.lo,
            self.domain.hi,
            nodes,
        )
    }
}

/// Composite Simpson rule with `n` (even, at least 64) intervals.
pub fn simpson<F>(f: F, lo: f64, hi: f64, n: usize) -> Result<f64, CharError>
where
    F: Fn(f64) -> Result<f64, CharError>,
{
    if n < 64 || !n.is_multiple_of(2) {
        return Err(CharError::Nodes(n));
    }
    let h = (hi - lo) / n as f64;
    let mut acc = f(lo)? + f(hi)?;
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + h * i as f64)?;
    }
    Ok(acc * h / 3.0)
}

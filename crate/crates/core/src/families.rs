//! Scalar function families used throughout the certification engines.
//!
//! Three families give a computational home to every symbol of the core
//! differential inequality
//!
//! ```text
//! g'(t) <= -gamma(t) g(t) + alpha(t, g(t)) + beta(t),    t >= 0,
//! ```
//!
//! * [`CoefficientFunction`] covers the dissipation rate `gamma(t)` and the
//!   forcing envelope `beta(t)`: continuous, nonnegative functions of time.
//! * [`Nonlinearity`] covers `alpha(t, g)`: nonnegative and nondecreasing in
//!   `g` at every fixed `t`.
//! * [`Majorant`] covers the positive candidate `mu(t)` whose reciprocal
//!   `1/mu(t)` is the certified bound. Majorants carry their derivative so
//!   the engines never differentiate numerically; the ratio `mu'(t)/mu(t)`
//!   enters the feasibility condition directly and numerical differentiation
//!   would pollute certificates.
//!
//! Every family is immutable after construction, so values can be shared and
//! sent between concurrent workers freely.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Construction error for the function families.
#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("{name} must be nonnegative, got {value}")]
    NegativeParameter { name: &'static str, value: f64 },
    #[error("{name} must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("{name} must be finite, got {value}")]
    NonFiniteParameter { name: &'static str, value: f64 },
    #[error("nonlinearity power must exceed 1, got {value}")]
    PowerNotSuperlinear { value: f64 },
    #[error("invalid table: {0}")]
    Table(String),
}

fn require_finite(name: &'static str, value: f64) -> Result<(), FamilyError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(FamilyError::NonFiniteParameter { name, value })
    }
}

fn require_nonneg(name: &'static str, value: f64) -> Result<(), FamilyError> {
    require_finite(name, value)?;
    if value >= 0.0 {
        Ok(())
    } else {
        Err(FamilyError::NegativeParameter { name, value })
    }
}

fn require_positive(name: &'static str, value: f64) -> Result<(), FamilyError> {
    require_finite(name, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(FamilyError::NonPositiveParameter { name, value })
    }
}

/// Validates a strictly increasing knot vector starting at t = 0 with
/// matching nonnegative values.
fn validate_table(knots: &[f64], values: &[f64]) -> Result<(), FamilyError> {
    if knots.is_empty() {
        return Err(FamilyError::Table("knot vector is empty".into()));
    }
    if knots.len() != values.len() {
        return Err(FamilyError::Table(format!(
            "{} knots but {} values",
            knots.len(),
            values.len()
        )));
    }
    if knots[0] != 0.0 {
        return Err(FamilyError::Table(format!(
            "first knot must be 0, got {}",
            knots[0]
        )));
    }
    for pair in knots.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(FamilyError::Table(format!(
                "knots must be strictly increasing, got {} after {}",
                pair[1], pair[0]
            )));
        }
    }
    for &v in values {
        if !v.is_finite() || v < 0.0 {
            return Err(FamilyError::Table(format!(
                "values must be finite and nonnegative, got {v}"
            )));
        }
    }
    Ok(())
}

/// Piecewise-linear interpolation over a validated table, constant beyond
/// the last knot.
fn interp_table(knots: &[f64], values: &[f64], x: f64) -> f64 {
    let last = knots.len() - 1;
    if x >= knots[last] {
        return values[last];
    }
    // partition_point returns the first index with knot > x; x < knots[last]
    // guarantees 1 <= idx <= last.
    let idx = knots.partition_point(|&k| k <= x);
    let (k0, k1) = (knots[idx - 1], knots[idx]);
    let (v0, v1) = (values[idx - 1], values[idx]);
    let w = (x - k0) / (k1 - k0);
    v0 + w * (v1 - v0)
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum CoeffKind {
    Constant {
        value: f64,
    },
    /// `scale / (1 + t)^exponent`
    PowerDecay {
        scale: f64,
        exponent: f64,
    },
    /// `scale * exp(-rate * t)`
    ExponentialDecay {
        scale: f64,
        rate: f64,
    },
    /// Linear interpolation between knots, constant beyond the last knot.
    Tabulated {
        knots: Vec<f64>,
        values: Vec<f64>,
    },
}

/// A continuous, nonnegative scalar function of time.
///
/// Used for the dissipation rate `gamma(t)` and the forcing envelope
/// `beta(t)`. Tabulated members use linear interpolation and constant
/// extrapolation beyond the last knot, which preserves continuity and
/// nonnegativity.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFunction {
    pub(crate) kind: CoeffKind,
}

impl CoefficientFunction {
    pub fn constant(value: f64) -> Result<Self, FamilyError> {
        require_nonneg("constant value", value)?;
        Ok(Self {
            kind: CoeffKind::Constant { value },
        })
    }

    /// The identically-zero coefficient.
    pub fn zero() -> Self {
        Self {
            kind: CoeffKind::Constant { value: 0.0 },
        }
    }

    /// `scale / (1 + t)^exponent` with `scale, exponent >= 0`.
    pub fn power_decay(scale: f64, exponent: f64) -> Result<Self, FamilyError> {
        require_nonneg("power-decay scale", scale)?;
        require_nonneg("power-decay exponent", exponent)?;
        Ok(Self {
            kind: CoeffKind::PowerDecay { scale, exponent },
        })
    }

    /// `scale * exp(-rate * t)` with `scale, rate >= 0`.
    pub fn exponential_decay(scale: f64, rate: f64) -> Result<Self, FamilyError> {
        require_nonneg("exponential-decay scale", scale)?;
        require_nonneg("exponential-decay rate", rate)?;
        Ok(Self {
            kind: CoeffKind::ExponentialDecay { scale, rate },
        })
    }

    /// Piecewise-linear table; knots strictly increasing with the first knot
    /// at t = 0, values nonnegative.
    pub fn tabulated(knots: Vec<f64>, values: Vec<f64>) -> Result<Self, FamilyError> {
        validate_table(&knots, &values)?;
        Ok(Self {
            kind: CoeffKind::Tabulated { knots, values },
        })
    }

    /// Evaluates the coefficient at time `t >= 0`.
    ///
    /// Panics on negative time: grids guarantee nonnegative times upstream,
    /// so a negative argument is a caller bug, not recoverable input.
    pub fn eval(&self, t: f64) -> f64 {
        assert!(t >= 0.0, "coefficient evaluated at negative time {t}");
        match &self.kind {
            CoeffKind::Constant { value } => *value,
            CoeffKind::PowerDecay { scale, exponent } => scale / (1.0 + t).powf(*exponent),
            CoeffKind::ExponentialDecay { scale, rate } => scale * (-rate * t).exp(),
            CoeffKind::Tabulated { knots, values } => interp_table(knots, values, t),
        }
    }

    /// True when the function is identically zero.
    pub fn is_zero(&self) -> bool {
        match &self.kind {
            CoeffKind::Constant { value } => *value == 0.0,
            CoeffKind::PowerDecay { scale, .. } | CoeffKind::ExponentialDecay { scale, .. } => {
                *scale == 0.0
            }
            CoeffKind::Tabulated { values, .. } => values.iter().all(|&v| v == 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum NonlinKind {
    /// `scale * g^power` with `power > 1`.
    PowerLaw { scale: f64, power: f64 },
    /// Bilinear table over a fixed time grid: `values[i][j]` is the value at
    /// `(t_knots[i], g_knots[j])`; each row is nondecreasing in `g`.
    Tabulated {
        t_knots: Vec<f64>,
        g_knots: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

/// The superlinear term `alpha(t, g)`: nonnegative and nondecreasing in `g`
/// at every fixed `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Nonlinearity {
    pub(crate) kind: NonlinKind,
}

impl Nonlinearity {
    /// `scale * g^power`; the power must exceed 1 so the term is superlinear
    /// near zero. `scale = 0` encodes the linear problem.
    pub fn power_law(scale: f64, power: f64) -> Result<Self, FamilyError> {
        require_nonneg("power-law scale", scale)?;
        require_finite("power-law power", power)?;
        if power <= 1.0 {
            return Err(FamilyError::PowerNotSuperlinear { value: power });
        }
        Ok(Self {
            kind: NonlinKind::PowerLaw { scale, power },
        })
    }

    /// Table over a fixed time grid, interpolated linearly in both `t` and
    /// `g`, constant beyond the last knot in each direction. Every row must
    /// be nondecreasing in `g` so the monotonicity assumption holds.
    pub fn tabulated(
        t_knots: Vec<f64>,
        g_knots: Vec<f64>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self, FamilyError> {
        if values.len() != t_knots.len() {
            return Err(FamilyError::Table(format!(
                "{} time knots but {} value rows",
                t_knots.len(),
                values.len()
            )));
        }
        for row in &values {
            validate_table(&g_knots, row)?;
            for pair in row.windows(2) {
                if pair[1] < pair[0] {
                    return Err(FamilyError::Table(format!(
                        "rows must be nondecreasing in g, got {} after {}",
                        pair[1], pair[0]
                    )));
                }
            }
        }
        // Reuse the knot checks on the time axis with a dummy value row.
        let dummy = vec![0.0; t_knots.len()];
        validate_table(&t_knots, &dummy)?;
        Ok(Self {
            kind: NonlinKind::Tabulated {
                t_knots,
                g_knots,
                values,
            },
        })
    }

    /// Evaluates `alpha(t, g)` for `t >= 0`, `g >= 0`.
    ///
    /// Negative `g` panics rather than clamping: silent clamping would hide
    /// simulator bugs.
    pub fn eval(&self, t: f64, g: f64) -> f64 {
        assert!(t >= 0.0, "nonlinearity evaluated at negative time {t}");
        assert!(g >= 0.0, "nonlinearity evaluated at negative state {g}");
        match &self.kind {
            NonlinKind::PowerLaw { scale, power } => scale * g.powf(*power),
            NonlinKind::Tabulated {
                t_knots,
                g_knots,
                values,
            } => {
                let last = t_knots.len() - 1;
                if t >= t_knots[last] {
                    return interp_table(g_knots, &values[last], g);
                }
                let idx = t_knots.partition_point(|&k| k <= t);
                let lo = interp_table(g_knots, &values[idx - 1], g);
                let hi = interp_table(g_knots, &values[idx], g);
                let w = (t - t_knots[idx - 1]) / (t_knots[idx] - t_knots[idx - 1]);
                lo + w * (hi - lo)
            }
        }
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub(crate) enum MajorantKind {
    /// `scale * exp(rate * t)`
    Exponential { scale: f64, rate: f64 },
    /// `scale * (1 + t)^exponent`
    Power { scale: f64, exponent: f64 },
    /// User-supplied value and derivative.
    Generic { eval: ScalarFn, deriv: ScalarFn },
}

/// A positive, continuously differentiable candidate `mu(t)` whose
/// reciprocal bounds the norm trajectory once the feasibility condition
/// holds.
#[derive(Clone)]
pub struct Majorant {
    pub(crate) kind: MajorantKind,
}

impl fmt::Debug for Majorant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MajorantKind::Exponential { scale, rate } => f
                .debug_struct("Majorant::Exponential")
                .field("scale", scale)
                .field("rate", rate)
                .finish(),
            MajorantKind::Power { scale, exponent } => f
                .debug_struct("Majorant::Power")
                .field("scale", scale)
                .field("exponent", exponent)
                .finish(),
            MajorantKind::Generic { .. } => f.write_str("Majorant::Generic"),
        }
    }
}

impl Majorant {
    /// `scale * exp(rate * t)` with `scale > 0`. The rate may be negative;
    /// certification then simply fails where it must.
    pub fn exponential(scale: f64, rate: f64) -> Result<Self, FamilyError> {
        require_positive("majorant scale", scale)?;
        require_finite("majorant rate", rate)?;
        Ok(Self {
            kind: MajorantKind::Exponential { scale, rate },
        })
    }

    /// `scale * (1 + t)^exponent` with `scale > 0`.
    pub fn power(scale: f64, exponent: f64) -> Result<Self, FamilyError> {
        require_positive("majorant scale", scale)?;
        require_finite("majorant exponent", exponent)?;
        Ok(Self {
            kind: MajorantKind::Power { scale, exponent },
        })
    }

    /// A majorant given by arbitrary closures for the value and its
    /// derivative. Positivity cannot be validated up front; it is asserted
    /// at every evaluation instead.
    pub fn generic(
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            kind: MajorantKind::Generic {
                eval: Arc::new(eval),
                deriv: Arc::new(deriv),
            },
        }
    }

    /// Evaluates `mu(t)` for `t >= 0`; the result is positive.
    pub fn eval(&self, t: f64) -> f64 {
        assert!(t >= 0.0, "majorant evaluated at negative time {t}");
        let value = match &self.kind {
            MajorantKind::Exponential { scale, rate } => scale * (rate * t).exp(),
            MajorantKind::Power { scale, exponent } => scale * (1.0 + t).powf(*exponent),
            MajorantKind::Generic { eval, .. } => eval(t),
        };
        assert!(value > 0.0, "majorant must stay positive, got {value} at t = {t}");
        value
    }

    /// Evaluates `mu'(t)`; analytic for the parametric variants,
    /// user-supplied for the generic one.
    pub fn deriv(&self, t: f64) -> f64 {
        assert!(t >= 0.0, "majorant derivative at negative time {t}");
        match &self.kind {
            MajorantKind::Exponential { scale, rate } => scale * rate * (rate * t).exp(),
            MajorantKind::Power { scale, exponent } => {
                scale * exponent * (1.0 + t).powf(exponent - 1.0)
            }
            MajorantKind::Generic { deriv, .. } => deriv(t),
        }
    }

    /// True when the family provably grows without bound, which makes the
    /// certified bound `1/mu(t)` decay to zero. Conservatively false for
    /// generic majorants.
    pub fn grows_unbounded(&self) -> bool {
        match &self.kind {
            MajorantKind::Exponential { rate, .. } => *rate > 0.0,
            MajorantKind::Power { exponent, .. } => *exponent > 0.0,
            MajorantKind::Generic { .. } => false,
        }
    }
}

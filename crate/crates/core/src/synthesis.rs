//! Explicit majorant constructions from problem constants.
//!
//! Given the constants of a dissipative problem (dissipation rate, the
//! nonlinearity envelope `c0 ||u||^p`, optionally a forcing envelope),
//! these routines produce a concrete majorant together with the largest
//! admissible initial radius `1/lambda`:
//!
//! * [`synth_exponential`]: constant dissipation `k`, no forcing. Sacrifice
//!   `epsilon` of the rate to pay for the nonlinearity; the decay is
//!   `exp(-(k - epsilon) t)`.
//! * [`synth_exponential_from_u0`]: same setting, but the scale is pinned
//!   to the initial norm; feasible exactly when `c0 ||u0||^(p-1) < k`.
//! * [`synth_power`]: power dissipation `c1/(1+t)^q1`, no forcing; decay
//!   `(1+t)^-(c1 - epsilon)`.
//! * [`synth_forced`]: power dissipation plus a power forcing envelope
//!   `c2/(1+t)^q2`; the scale is pinned at the minimizer `lambda0` of
//!   `h(lambda) = c0/lambda^(p-1) + lambda c2`, which maximizes the rate
//!   budget.
//!
//! The scale is always set to its minimal admissible value because the
//! initial radius is its reciprocal, and the largest certified radius is
//! what callers want. Infeasibility is data, not an error: stability
//! analyses routinely compare many constant regimes, most of which fail.

use thiserror::Error;

use crate::conditions::{ConditionCheck, ConditionId};
use crate::families::{FamilyError, Majorant};

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error("nonlinearity power must exceed 1, got {0}")]
    PowerNotSuperlinear(f64),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("rate sacrifice epsilon = {epsilon} must lie strictly inside (0, {limit})")]
    EpsilonOutOfRange { epsilon: f64, limit: f64 },
    #[error("dissipation exponent q1 = {0} must not exceed 1")]
    DissipationExponentTooLarge(f64),
    #[error("missing constant: {0}")]
    MissingConstant(&'static str),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// Which explicit construction applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Constant dissipation, zero forcing, exponential decay.
    Exponential,
    /// Power dissipation, zero forcing, power decay.
    Power,
    /// Power dissipation with persistent power-envelope forcing.
    Forced,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Exponential => "exponential",
            Regime::Power => "power",
            Regime::Forced => "forced",
        }
    }
}

/// Constants of a problem instance, as read from a scenario.
#[derive(Debug, Clone, Default)]
pub struct ProblemConstants {
    /// Nonlinearity envelope scale (`||F(t,u)|| <= c0 ||u||^p`).
    pub c0: f64,
    /// Nonlinearity envelope power, `p > 1`.
    pub p: f64,
    /// Constant dissipation rate (exponential regime).
    pub k: Option<f64>,
    /// Power dissipation scale and exponent (power/forced regimes).
    pub c1: Option<f64>,
    pub q1: Option<f64>,
    /// Forcing envelope scale and exponent (forced regime).
    pub c2: Option<f64>,
    pub q2: Option<f64>,
    /// Rate sacrifice for the exponential/power syntheses.
    pub epsilon: Option<f64>,
    /// Target power rate for the forced synthesis.
    pub nu: Option<f64>,
}

impl ProblemConstants {
    /// Validates the constants that are present.
    pub fn validate(&self) -> Result<(), SynthesisError> {
        if !(self.p > 1.0) {
            return Err(SynthesisError::PowerNotSuperlinear(self.p));
        }
        if !(self.c0 >= 0.0) || !self.c0.is_finite() {
            return Err(SynthesisError::NonPositive {
                name: "c0",
                value: self.c0,
            });
        }
        for (name, value) in [
            ("k", self.k),
            ("c1", self.c1),
            ("c2", self.c2),
            ("q2", self.q2),
            ("epsilon", self.epsilon),
            ("nu", self.nu),
        ] {
            if let Some(v) = value {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(SynthesisError::NonPositive { name, value: v });
                }
            }
        }
        if let Some(q1) = self.q1 {
            if !(q1 >= 0.0) || !q1.is_finite() {
                return Err(SynthesisError::NonPositive {
                    name: "q1",
                    value: q1,
                });
            }
            if q1 > 1.0 {
                return Err(SynthesisError::DissipationExponentTooLarge(q1));
            }
        }
        Ok(())
    }

    fn require(&self, field: Option<f64>, name: &'static str) -> Result<f64, SynthesisError> {
        field.ok_or(SynthesisError::MissingConstant(name))
    }
}

/// Decay rate certified by a synthesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayRate {
    /// `exp(-rate t) / lambda`
    Exponential { rate: f64 },
    /// `1 / (lambda (1+t)^exponent)`
    Power { exponent: f64 },
}

impl std::fmt::Display for DecayRate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DecayRate::Exponential { rate } => write!(f, "exp(-{rate} t) decay"),
            DecayRate::Power { exponent } => write!(f, "(1+t)^-{exponent} decay"),
        }
    }
}

/// Constants a synthesis pins down, for report embedding.
#[derive(Debug, Clone, Copy, Default)]
pub struct SynthesizedConstants {
    /// Majorant scale lambda (or lambda0 in the forced regime).
    pub lambda: f64,
    /// Exponential growth rate `b`, when applicable.
    pub growth_rate: Option<f64>,
    /// Power exponent `nu`, when applicable.
    pub exponent: Option<f64>,
    /// Minimum of `h(lambda) = c0/lambda^(p-1) + lambda c2`, forced regime.
    pub h_min: Option<f64>,
}

/// A constructed majorant plus the feasibility record behind it.
#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub majorant: Majorant,
    /// Largest admissible initial norm, `1/lambda`.
    pub initial_radius: f64,
    pub decay: DecayRate,
    /// All constraints hold; the majorant certifies the decay.
    pub feasible: bool,
    /// Every constraint checked, in catalog order.
    pub checks: Vec<ConditionCheck>,
    pub constants: SynthesizedConstants,
}

impl SynthesisResult {
    /// The checks that failed, if any.
    pub fn violated(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

/// Constant dissipation `k`, zero forcing: chooses `b = k - epsilon` and the
/// minimal admissible scale `lambda = (c0/epsilon)^(1/(p-1))`, certifying
/// `exp(-(k - epsilon) t)` decay for initial norms up to `1/lambda`.
pub fn synth_exponential(
    k: f64,
    c0: f64,
    p: f64,
    epsilon: f64,
) -> Result<SynthesisResult, SynthesisError> {
    check_envelope(c0, p)?;
    require_positive("k", k)?;
    if !(epsilon > 0.0 && epsilon < k) {
        return Err(SynthesisError::EpsilonOutOfRange { epsilon, limit: k });
    }
    let rate = k - epsilon;
    let lambda = (c0 / epsilon).powf(1.0 / (p - 1.0));
    let budget = ConditionCheck::le(
        ConditionId::ExponentialRate,
        c0 / lambda.powf(p - 1.0) + rate,
        k,
        1e-12,
    );
    let feasible = budget.holds;
    Ok(SynthesisResult {
        majorant: Majorant::exponential(lambda, rate)?,
        initial_radius: 1.0 / lambda,
        decay: DecayRate::Exponential { rate },
        feasible,
        checks: vec![budget],
        constants: SynthesizedConstants {
            lambda,
            growth_rate: Some(rate),
            ..Default::default()
        },
    })
}

/// Constant dissipation with the scale pinned to the initial norm,
/// `lambda = 1/||u0||`. Feasible exactly when `c0 ||u0||^(p-1) < k`; the
/// certified bound is then `||u0|| exp(-(k - c0 ||u0||^(p-1)) t)`.
///
/// Infeasibility (the nonlinearity eats the whole rate) is returned as
/// data with the violated inequality, not as an error.
pub fn synth_exponential_from_u0(
    k: f64,
    c0: f64,
    p: f64,
    u0_norm: f64,
) -> Result<SynthesisResult, SynthesisError> {
    check_envelope(c0, p)?;
    require_positive("k", k)?;
    require_positive("u0 norm", u0_norm)?;
    let lambda = 1.0 / u0_norm;
    let correction = c0 * u0_norm.powf(p - 1.0);
    let rate = k - correction;
    // strict inequality: equality leaves no rate to decay with
    let budget = ConditionCheck {
        condition: ConditionId::ExponentialRate,
        lhs: correction,
        rhs: k,
        holds: correction < k,
    };
    let feasible = budget.holds;
    let majorant = Majorant::exponential(lambda, if feasible { rate } else { 0.0 })?;
    Ok(SynthesisResult {
        majorant,
        initial_radius: u0_norm,
        decay: DecayRate::Exponential {
            rate: if feasible { rate } else { 0.0 },
        },
        feasible,
        checks: vec![budget],
        constants: SynthesizedConstants {
            lambda,
            growth_rate: feasible.then_some(rate),
            ..Default::default()
        },
    })
}

/// Power dissipation `c1/(1+t)^q1` with `q1 <= 1`, zero forcing: chooses
/// `nu = c1 - epsilon` and `lambda = (c0/epsilon)^(1/(p-1))`, certifying
/// `1/(lambda (1+t)^(c1-epsilon))` decay provided the exponent split
/// `(p-1) nu >= q1` holds.
pub fn synth_power(
    c1: f64,
    q1: f64,
    c0: f64,
    p: f64,
    epsilon: f64,
) -> Result<SynthesisResult, SynthesisError> {
    check_envelope(c0, p)?;
    require_positive("c1", c1)?;
    if !(q1 >= 0.0) || !q1.is_finite() {
        return Err(SynthesisError::NonPositive {
            name: "q1",
            value: q1,
        });
    }
    if q1 > 1.0 {
        return Err(SynthesisError::DissipationExponentTooLarge(q1));
    }
    if !(epsilon > 0.0 && epsilon < c1) {
        return Err(SynthesisError::EpsilonOutOfRange {
            epsilon,
            limit: c1,
        });
    }
    let nu = c1 - epsilon;
    let lambda = (c0 / epsilon).powf(1.0 / (p - 1.0));
    let split = ConditionCheck {
        condition: ConditionId::PowerRateSplit,
        lhs: q1,
        rhs: (p - 1.0) * nu,
        holds: (p - 1.0) * nu >= q1,
    };
    let budget = ConditionCheck::le(
        ConditionId::PowerRate,
        c0 / lambda.powf(p - 1.0) + nu,
        c1,
        1e-12,
    );
    let feasible = split.holds && budget.holds;
    Ok(SynthesisResult {
        majorant: Majorant::power(lambda, nu)?,
        initial_radius: 1.0 / lambda,
        decay: DecayRate::Power { exponent: nu },
        feasible,
        checks: vec![split, budget],
        constants: SynthesizedConstants {
            lambda,
            exponent: Some(nu),
            ..Default::default()
        },
    })
}

/// The minimum of `h(lambda) = c0/lambda^(p-1) + lambda c2` over positive
/// scales, attained at `lambda0 = ((p-1) c0 / c2)^(1/p)`.
pub fn hmin(c0: f64, p: f64, c2: f64) -> f64 {
    c0.powf(1.0 / p) * c2.powf(1.0 - 1.0 / p) * (p - 1.0).powf(1.0 / p) * p / (p - 1.0)
}

/// The minimizer of `h(lambda)`.
pub fn optimal_lambda(c0: f64, p: f64, c2: f64) -> f64 {
    ((p - 1.0) * c0 / c2).powf(1.0 / p)
}

/// Power dissipation plus a persistent forcing envelope `c2/(1+t)^q2`:
/// pins the scale at the minimizer `lambda0` of the rate cost
/// `h(lambda) = c0/lambda^(p-1) + lambda c2` and certifies
/// `1/(lambda0 (1+t)^nu)` decay when the exponent ordering
/// `q1 <= min(1, q2 - nu, nu (p-1))` and the rate budget
/// `h_min + nu <= c1` both hold.
pub fn synth_forced(
    c1: f64,
    q1: f64,
    c0: f64,
    p: f64,
    c2: f64,
    q2: f64,
    nu: f64,
) -> Result<SynthesisResult, SynthesisError> {
    check_envelope(c0, p)?;
    require_positive("c0", c0)?;
    require_positive("c1", c1)?;
    require_positive("c2", c2)?;
    require_positive("q2", q2)?;
    require_positive("nu", nu)?;
    if !(q1 >= 0.0) || !q1.is_finite() {
        return Err(SynthesisError::NonPositive {
            name: "q1",
            value: q1,
        });
    }

    let lambda0 = optimal_lambda(c0, p, c2);
    let h_min = hmin(c0, p, c2);
    let exponents = ConditionCheck {
        condition: ConditionId::ForcedExponents,
        lhs: q1,
        rhs: 1.0f64.min(q2 - nu).min(nu * (p - 1.0)),
        holds: q1 <= 1.0f64.min(q2 - nu).min(nu * (p - 1.0)),
    };
    let budget = ConditionCheck::le(ConditionId::ForcedBudget, h_min + nu, c1, 1e-12);
    let feasible = exponents.holds && budget.holds;
    Ok(SynthesisResult {
        majorant: Majorant::power(lambda0, nu)?,
        initial_radius: 1.0 / lambda0,
        decay: DecayRate::Power { exponent: nu },
        feasible,
        checks: vec![exponents, budget],
        constants: SynthesizedConstants {
            lambda: lambda0,
            exponent: Some(nu),
            h_min: Some(h_min),
            ..Default::default()
        },
    })
}

/// Sweep helper for the forced regime: the feasibility constraints bound
/// `nu` by `q2 - q1` (exponent ordering) and `c1 - h_min` (rate budget)
/// from above and `q1/(p-1)` from below, so the largest feasible `nu` is
/// their meet. Returns the synthesis at that `nu`, or the infeasible
/// synthesis at the upper candidate when the window is empty.
pub fn synth_forced_best_nu(
    c1: f64,
    q1: f64,
    c0: f64,
    p: f64,
    c2: f64,
    q2: f64,
) -> Result<SynthesisResult, SynthesisError> {
    let h_min = hmin(c0, p, c2);
    let upper = (q2 - q1).min(c1 - h_min);
    // a nonpositive window has no feasible nu; synthesize at a nominal
    // value so the caller still sees the violated constraints
    let nu = if upper > 0.0 { upper } else { c1 * 0.5 };
    synth_forced(c1, q1, c0, p, c2, q2, nu)
}

fn check_envelope(c0: f64, p: f64) -> Result<(), SynthesisError> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(SynthesisError::PowerNotSuperlinear(p));
    }
    if !(c0 >= 0.0) || !c0.is_finite() {
        return Err(SynthesisError::NonPositive {
            name: "c0",
            value: c0,
        });
    }
    Ok(())
}

fn require_positive(name: &'static str, value: f64) -> Result<(), SynthesisError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(SynthesisError::NonPositive { name, value })
    }
}

/// Dispatches to the regime's construction using scenario constants.
///
/// In the exponential regime, `epsilon` selects the rate-sacrifice form
/// and its absence falls back to the initial-norm form (which then
/// requires `u0_norm`).
pub fn synthesize(
    regime: Regime,
    constants: &ProblemConstants,
    u0_norm: Option<f64>,
) -> Result<SynthesisResult, SynthesisError> {
    constants.validate()?;
    match regime {
        Regime::Exponential => {
            let k = constants.require(constants.k, "k")?;
            match constants.epsilon {
                Some(eps) => synth_exponential(k, constants.c0, constants.p, eps),
                None => {
                    let u0 = u0_norm.ok_or(SynthesisError::MissingConstant(
                        "epsilon (or an initial state to pin lambda)",
                    ))?;
                    synth_exponential_from_u0(k, constants.c0, constants.p, u0)
                }
            }
        }
        Regime::Power => {
            let c1 = constants.require(constants.c1, "c1")?;
            let q1 = constants.require(constants.q1, "q1")?;
            let eps = constants.require(constants.epsilon, "epsilon")?;
            synth_power(c1, q1, constants.c0, constants.p, eps)
        }
        Regime::Forced => {
            let c1 = constants.require(constants.c1, "c1")?;
            let q1 = constants.require(constants.q1, "q1")?;
            let c2 = constants.require(constants.c2, "c2")?;
            let q2 = constants.require(constants.q2, "q2")?;
            match constants.nu {
                Some(nu) => synth_forced(c1, q1, constants.c0, constants.p, c2, q2, nu),
                None => synth_forced_best_nu(c1, q1, constants.c0, constants.p, c2, q2),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::SmallRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn exponential_examples() {
        let r = synth_exponential(1.0, 1.0, 2.0, 0.5).unwrap();
        assert!(r.feasible);
        assert_eq!(r.constants.lambda, 2.0);
        assert_eq!(r.constants.growth_rate, Some(0.5));
        assert_eq!(r.initial_radius, 0.5);

        let r = synth_exponential(1.0, 1.0, 3.0, 0.25).unwrap();
        assert_eq!(r.constants.lambda, 2.0);
        assert_eq!(r.constants.growth_rate, Some(0.75));
        assert_eq!(r.initial_radius, 0.5);

        let r = synth_exponential(1.0, 0.3, 2.0, 0.3).unwrap();
        assert!((r.constants.lambda - 1.0).abs() < 1e-15);
        assert!((r.initial_radius - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exponential_epsilon_bounds() {
        assert!(synth_exponential(1.0, 1.0, 2.0, 1.0).is_err());
        assert!(synth_exponential(1.0, 1.0, 2.0, 0.0).is_err());
        assert!(synth_exponential(1.0, 1.0, 2.0, 1.5).is_err());
    }

    #[test]
    fn from_u0_examples() {
        let r = synth_exponential_from_u0(1.0, 0.5, 2.0, 0.5).unwrap();
        assert!(r.feasible);
        assert_eq!(r.constants.growth_rate, Some(0.75));
        assert_eq!(r.initial_radius, 0.5);
        assert!((r.majorant.eval(1.0) - 2.0 * 0.75f64.exp()).abs() < 1e-12);

        // the boundary case is excluded by the strict inequality
        let r = synth_exponential_from_u0(1.0, 2.0, 2.0, 0.5).unwrap();
        assert!(!r.feasible);
        assert_eq!(r.violated().count(), 1);

        // vanishing initial norm recovers the full rate
        let r = synth_exponential_from_u0(2.0, 5.0, 2.0, 1e-9).unwrap();
        assert!((r.constants.growth_rate.unwrap() - 2.0).abs() < 1e-7);
    }

    #[test]
    fn power_examples() {
        let r = synth_power(1.0, 1.0, 1.0, 3.0, 0.5).unwrap();
        assert!(r.feasible);
        assert_eq!(r.constants.exponent, Some(0.5));
        assert!((r.constants.lambda - 2.0f64.sqrt()).abs() < 1e-15);
        assert!((r.initial_radius - 1.0 / 2.0f64.sqrt()).abs() < 1e-15);

        // p = 2 fails the exponent split
        let r = synth_power(1.0, 1.0, 1.0, 2.0, 0.5).unwrap();
        assert!(!r.feasible);
        let bad: Vec<_> = r.violated().collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].condition, ConditionId::PowerRateSplit);

        // q1 = 0 reads as constant dissipation and always splits
        let r = synth_power(1.0, 0.0, 1.0, 2.0, 0.5).unwrap();
        assert!(r.feasible);
    }

    #[test]
    fn power_rejects_bad_exponent() {
        assert!(matches!(
            synth_power(1.0, 1.5, 1.0, 2.0, 0.5),
            Err(SynthesisError::DissipationExponentTooLarge(_))
        ));
    }

    #[test]
    fn forced_examples() {
        let r = synth_forced(1.0, 0.5, 1.0, 2.0, 0.04, 1.5, 0.5).unwrap();
        assert!(r.feasible, "checks: {:?}", r.checks);
        assert_eq!(r.constants.lambda, 5.0);
        assert!((r.constants.h_min.unwrap() - 0.4).abs() < 1e-15);
        assert!((r.initial_radius - 0.2).abs() < 1e-15);

        let r = synth_forced(1.0, 0.5, 1.0, 2.0, 1.0, 1.5, 0.5).unwrap();
        assert!(!r.feasible);
        let bad: Vec<_> = r.violated().collect();
        assert!(bad.iter().any(|c| c.condition == ConditionId::ForcedBudget));

        // vanishing forcing drives the scale up and the radius down
        let r1 = synth_forced(1.0, 0.5, 1.0, 2.0, 1e-2, 1.5, 0.5).unwrap();
        let r2 = synth_forced(1.0, 0.5, 1.0, 2.0, 1e-6, 1.5, 0.5).unwrap();
        let r3 = synth_forced(1.0, 0.5, 1.0, 2.0, 1e-10, 1.5, 0.5).unwrap();
        assert!(r2.constants.lambda > r1.constants.lambda);
        assert!(r3.constants.lambda > r2.constants.lambda);
        assert!(r3.initial_radius < r2.initial_radius);
        assert!(r2.initial_radius < r1.initial_radius);
    }

    #[test]
    fn hmin_examples() {
        assert!((hmin(1.0, 2.0, 1.0) - 2.0).abs() < 1e-15);
        assert!((hmin(1.0, 2.0, 0.04) - 0.4).abs() < 1e-15);
        // both routes agree for p = 3
        let closed = hmin(1.0, 3.0, 2.0);
        let lambda0 = optimal_lambda(1.0, 3.0, 2.0);
        let direct = 1.0 / lambda0.powf(2.0) + lambda0 * 2.0;
        assert!((closed - 3.0).abs() < 1e-12);
        assert!((closed - direct).abs() / closed < 1e-12);
    }

    #[test]
    fn hmin_is_the_minimum() {
        let mut rng = SmallRng::seed_from_u64(0x41);
        for _ in 0..200 {
            let c0 = rng.gen_range(0.01..10.0);
            let p = rng.gen_range(1.1..5.0);
            let c2 = rng.gen_range(0.01..10.0);
            let closed = hmin(c0, p, c2);
            let lambda0 = optimal_lambda(c0, p, c2);
            let at_opt = c0 / lambda0.powf(p - 1.0) + lambda0 * c2;
            assert!((closed - at_opt).abs() / closed < 1e-12);
            for _ in 0..50 {
                let lambda = 10f64.powf(rng.gen_range(-3.0..3.0));
                let h = c0 / lambda.powf(p - 1.0) + lambda * c2;
                assert!(closed <= h * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn smaller_epsilon_means_larger_lambda() {
        let mut rng = SmallRng::seed_from_u64(0x42);
        for _ in 0..100 {
            let k = rng.gen_range(0.5..3.0);
            let c0 = rng.gen_range(0.1..2.0);
            let p = rng.gen_range(1.2..4.0);
            let eps = rng.gen_range(0.05..k * 0.9);
            let eps_smaller = eps * rng.gen_range(0.2..0.95);
            let a = synth_exponential(k, c0, p, eps).unwrap();
            let b = synth_exponential(k, c0, p, eps_smaller).unwrap();
            assert!(b.constants.lambda >= a.constants.lambda);
            assert!(b.initial_radius <= a.initial_radius);
        }
    }

    #[test]
    fn remark_equality_when_lambda_pinned_to_u0() {
        // with lambda = 1/||u0|| and b = k - c0 ||u0||^(p-1) the rate budget
        // is exactly saturated
        let mut rng = SmallRng::seed_from_u64(0x43);
        for _ in 0..100 {
            let k: f64 = rng.gen_range(0.5..3.0);
            let c0: f64 = rng.gen_range(0.1..2.0);
            let p: f64 = rng.gen_range(1.2..4.0);
            let u0 = rng.gen_range(0.01..(k / c0).powf(1.0 / (p - 1.0)) * 0.99);
            let r = synth_exponential_from_u0(k, c0, p, u0).unwrap();
            assert!(r.feasible);
            let lambda = r.constants.lambda;
            let b = r.constants.growth_rate.unwrap();
            let lhs = c0 / lambda.powf(p - 1.0) + b;
            assert!(
                (lhs - k).abs() <= 1e-12 * k,
                "budget should hold with equality, gap {}",
                lhs - k
            );
        }
    }

    #[test]
    fn best_nu_sweep() {
        // h_min = 0.4, so nu can spend up to 0.6; the exponent ordering
        // allows up to q2 - q1 = 1.0; the meet is 0.6
        let r = synth_forced_best_nu(1.0, 0.5, 1.0, 2.0, 0.04, 1.5).unwrap();
        assert!(r.feasible);
        assert!((r.constants.exponent.unwrap() - 0.6).abs() < 1e-12);

        // and a slightly larger nu must be infeasible
        let r = synth_forced(1.0, 0.5, 1.0, 2.0, 0.04, 1.5, 0.6 + 1e-6).unwrap();
        assert!(!r.feasible);

        // empty window
        let r = synth_forced_best_nu(1.0, 0.5, 1.0, 2.0, 1.0, 1.5).unwrap();
        assert!(!r.feasible);
    }

    #[test]
    fn dispatch_by_regime() {
        let constants = ProblemConstants {
            c0: 1.0,
            p: 2.0,
            k: Some(1.0),
            epsilon: Some(0.5),
            ..Default::default()
        };
        let r = synthesize(Regime::Exponential, &constants, None).unwrap();
        assert_eq!(r.constants.lambda, 2.0);

        let constants = ProblemConstants {
            c0: 1.0,
            p: 2.0,
            k: Some(1.0),
            ..Default::default()
        };
        assert!(synthesize(Regime::Exponential, &constants, None).is_err());
        let r = synthesize(Regime::Exponential, &constants, Some(0.25)).unwrap();
        assert!(r.feasible);

        let constants = ProblemConstants {
            c0: 1.0,
            p: 3.0,
            c1: Some(1.0),
            q1: Some(1.0),
            epsilon: Some(0.5),
            ..Default::default()
        };
        let r = synthesize(Regime::Power, &constants, None).unwrap();
        assert!(r.feasible);
    }
}

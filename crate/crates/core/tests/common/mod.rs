//! Shared generators for the cross-module test suites.

use majorant::{
    synth_exponential, synth_forced, synth_power, CoefficientFunction, Majorant, Nonlinearity,
    SynthesisResult,
};
use rand::rngs::SmallRng;
use rand::Rng;

/// A randomly drawn feasible certification instance: families, majorant and
/// an admissible initial value.
pub struct FeasibleInstance {
    pub nonlinearity: Nonlinearity,
    pub forcing: CoefficientFunction,
    pub dissipation: CoefficientFunction,
    pub majorant: Majorant,
    pub g0: f64,
}

/// Draws a feasible instance from one of the three synthesis regimes with
/// random constants. Feasibility holds by construction of the draws.
pub fn random_feasible_instance(rng: &mut SmallRng) -> FeasibleInstance {
    let c0: f64 = rng.gen_range(0.05..2.0);
    let p: f64 = rng.gen_range(1.2..3.5);
    let frac: f64 = rng.gen_range(0.3..0.999);

    let (result, dissipation, forcing): (SynthesisResult, _, _) = match rng.gen_range(0..3u8) {
        0 => {
            let k: f64 = rng.gen_range(0.3..2.0);
            let eps = k * rng.gen_range(0.05..0.95);
            (
                synth_exponential(k, c0, p, eps).unwrap(),
                CoefficientFunction::constant(k).unwrap(),
                CoefficientFunction::zero(),
            )
        }
        1 => {
            let c1: f64 = rng.gen_range(0.3..2.0);
            let eps = c1 * rng.gen_range(0.05..0.95);
            let nu = c1 - eps;
            // the exponent split requires q1 <= min(1, (p-1) nu)
            let q1 = rng.gen_range(0.0..1.0f64.min((p - 1.0) * nu));
            (
                synth_power(c1, q1, c0, p, eps).unwrap(),
                CoefficientFunction::power_decay(c1, q1).unwrap(),
                CoefficientFunction::zero(),
            )
        }
        _ => {
            let c2: f64 = rng.gen_range(0.01..1.0);
            let h_min = majorant::hmin(c0, p, c2);
            // leave room in the rate budget for nu
            let c1 = h_min + rng.gen_range(0.1..1.0);
            let nu = (c1 - h_min) * rng.gen_range(0.3..0.999);
            let q2 = nu + rng.gen_range(0.05..2.0);
            let q1 = rng.gen_range(0.0..1.0f64.min(q2 - nu).min(nu * (p - 1.0)) * 0.999);
            (
                synth_forced(c1, q1, c0, p, c2, q2, nu).unwrap(),
                CoefficientFunction::power_decay(c1, q1).unwrap(),
                CoefficientFunction::power_decay(c2, q2).unwrap(),
            )
        }
    };
    assert!(
        result.feasible,
        "generator must draw feasible instances: {:?}",
        result.checks
    );
    FeasibleInstance {
        nonlinearity: Nonlinearity::power_law(c0, p).unwrap(),
        forcing,
        dissipation,
        majorant: result.majorant.clone(),
        g0: frac * result.initial_radius,
    }
}

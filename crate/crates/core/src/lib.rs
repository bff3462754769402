//! Certified large-time decay bounds for dissipative evolution problems.
//!
//! The crate revolves around one nonlinear differential inequality. A
//! nonnegative scalar `g(t)` (in practice the norm of a trajectory) that
//! obeys
//!
//! ```text
//! g'(t) <= -gamma(t) g(t) + alpha(t, g(t)) + beta(t)
//! ```
//!
//! stays below `1/mu(t)` for all time as soon as a positive, continuously
//! differentiable majorant `mu(t)` satisfies
//!
//! ```text
//! alpha(t, 1/mu(t)) + beta(t) <= (1/mu(t)) (gamma(t) - mu'(t)/mu(t))
//! ```
//!
//! everywhere together with `mu(0) g(0) <= 1`. When `mu` grows without
//! bound the certified trajectory decays to zero. The crate provides:
//!
//! * [`families`]: evaluatable, differentiable parametric families for
//!   `gamma`, `beta`, `alpha`, `mu`;
//! * [`inequality`]: the feasibility check on a time grid (with exact
//!   reductions to `t = 0` for the analytic family combinations), the
//!   certified bound, and an independent cross-check that integrates the
//!   comparison equation `w' = a(t) [alpha(t, w/a) + beta]`;
//! * [`discrete`]: the recursion analogue for step sequences, with the
//!   extremal (equality) recursion as the worst admissible sequence;
//! * [`synthesis`]: explicit majorant constructions from problem constants
//!   for constant dissipation, power-decay dissipation, and persistently
//!   forced problems;
//! * [`simulator`]: finite-dimensional instances `u' = A(t)u + F(t,u) + b(t)`,
//!   measured dissipativity margins, a step-halving integrator with an
//!   independent closed-form oracle, and the end-to-end pipeline
//!   synthesize -> certify -> integrate -> verify.
//!
//! Everything is deterministic and immutable after construction; engines
//! may run concurrently over scenarios.

// `!(x > 0.0)` style checks are kept as written: the negated form also
// rejects NaN, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conditions;
pub mod discrete;
pub mod families;
pub mod grid;
pub mod inequality;
pub mod linalg;
pub mod quadrature;
pub mod simulator;
pub mod synthesis;

pub use conditions::{ConditionCheck, ConditionId};
pub use discrete::{
    check_discrete_condition, evolve_extremal, random_feasible_scheme, verify_discrete_bound,
    DiscreteBoundReport, DiscreteCertificate, DiscreteError, DiscreteScheme, TimeScale,
};
pub use families::{CoefficientFunction, FamilyError, Majorant, Nonlinearity};
pub use grid::{GridError, TimeGrid};
pub use inequality::{
    bound_at, check_majorant_condition, integrating_factor, solve_comparison_ode, verify_bound,
    BoundReport, BoundViolation, Certificate, EngineError, ScalarTrajectory, DEFAULT_TOL,
};
pub use linalg::{MatrixError, SquareMatrix};
pub use simulator::{
    dissipativity_margin, end_to_end_verify, integrate, verify_nonlinearity_envelope,
    BernoulliOracle, EndToEndReport, EnvelopeReport, EvolutionProblem, Forcing, NonlinearTerm,
    OperatorFamily, PrecheckReport, SimulatorError, Stage, Trajectory,
};
pub use synthesis::{
    hmin, optimal_lambda, synth_exponential, synth_exponential_from_u0, synth_forced,
    synth_forced_best_nu, synth_power, synthesize, DecayRate, ProblemConstants, Regime,
    SynthesisError, SynthesisResult,
};

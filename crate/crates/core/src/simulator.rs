//! Finite-dimensional instances of the abstract evolution problem and the
//! machinery to check certified bounds against computed trajectories.
//!
//! An [`EvolutionProblem`] is
//!
//! ```text
//! u'(t) = A(t) u + F(t, u) + b(t),    u(0) = u0,
//! ```
//!
//! on a real finite-dimensional state space with the Euclidean inner
//! product. The dissipativity margin of `A(t)` is the largest `gamma` with
//! `(A(t)u, u) <= -gamma ||u||^2`, which equals the negated top eigenvalue
//! of the symmetric part of `A(t)`; the simulator measures it to validate
//! user-declared dissipation families. Norm kinks at `||u|| = 0` are
//! sidestepped throughout: norms are computed, never differentiated.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::conditions::{ConditionCheck, ConditionId};
use crate::families::{CoefficientFunction, Nonlinearity};
use crate::grid::TimeGrid;
use crate::inequality::{check_majorant_condition, verify_bound, BoundReport, Certificate};
use crate::linalg::{norm, symmetric_eigenvalues, MatrixError, SquareMatrix};
use crate::synthesis::{synthesize, ProblemConstants, Regime, SynthesisError, SynthesisResult};

/// Relative agreement required between successive step-halved sweeps.
const ODE_RTOL: f64 = 1e-8;
/// Values beyond this guard are treated as blow-up.
const OVERFLOW_GUARD: f64 = 1e300;
/// Cap on substeps per grid interval.
const MAX_SUBSTEPS: usize = 1 << 20;
/// Absolute agreement between blow-up times of successive sweeps.
const BLOWUP_TIME_TOL: f64 = 1e-6;
/// Samples drawn by the envelope precheck in the end-to-end pipeline.
const PRECHECK_ENVELOPE_SAMPLES: usize = 256;
/// Deterministic seed for the envelope precheck.
const PRECHECK_SEED: u64 = 0x5ab1e;
/// Absolute tolerance when checking computed norms against the certified
/// bound. Syntheses admit trajectories that ride the bound exactly, so the
/// comparison must absorb the integrator's accumulated error.
pub const BOUND_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SimulatorError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("forcing direction must be a unit vector, norm is {0}")]
    DirectionNotUnit(f64),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("nonlinearity power must exceed 1, got {0}")]
    PowerNotSuperlinear(f64),
    #[error("initial state entries must be finite")]
    NonFiniteState,
    #[error("trajectory blows up at t = {t}")]
    BlowUp { t: f64 },
    #[error("step refinement did not converge near t = {t}")]
    NoConvergence { t: f64 },
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
}

/// Time-dependent linear operator.
#[derive(Debug, Clone)]
pub enum OperatorFamily {
    Constant { matrix: SquareMatrix },
    /// `scale(t) * base`; realizes dissipation margins that decay to zero.
    Scaled {
        base: SquareMatrix,
        scale: CoefficientFunction,
    },
}

impl OperatorFamily {
    pub fn dim(&self) -> usize {
        match self {
            OperatorFamily::Constant { matrix } => matrix.dim(),
            OperatorFamily::Scaled { base, .. } => base.dim(),
        }
    }

    /// Materializes `A(t)`.
    pub fn at(&self, t: f64) -> SquareMatrix {
        match self {
            OperatorFamily::Constant { matrix } => matrix.clone(),
            OperatorFamily::Scaled { base, scale } => {
                let s = scale.eval(t);
                let rows: Vec<Vec<f64>> = (0..base.dim())
                    .map(|i| (0..base.dim()).map(|j| s * base.get(i, j)).collect())
                    .collect();
                SquareMatrix::from_rows(rows).expect("scaled matrix stays square")
            }
        }
    }

    /// `out += A(t) x` without materializing `A(t)`.
    fn apply_add(&self, t: f64, x: &[f64], out: &mut [f64]) {
        match self {
            OperatorFamily::Constant { matrix } => matrix.matvec_scaled_add(x, 1.0, out),
            OperatorFamily::Scaled { base, scale } => {
                base.matvec_scaled_add(x, scale.eval(t), out)
            }
        }
    }
}

/// Nonlinear term of the evolution equation.
#[derive(Debug, Clone)]
pub enum NonlinearTerm {
    Zero,
    /// `F(t, u) = scale * ||u||^(power-1) * D u`; satisfies the envelope
    /// `||F|| <= scale ||u||^power` exactly when the operator norm of `D`
    /// is at most one.
    NormPower {
        scale: f64,
        power: f64,
        direction: SquareMatrix,
    },
}

impl NonlinearTerm {
    fn apply_add(&self, u: &[f64], u_norm: f64, scratch: &mut [f64], out: &mut [f64]) {
        match self {
            NonlinearTerm::Zero => {}
            NonlinearTerm::NormPower {
                scale,
                power,
                direction,
            } => {
                let coeff = scale * u_norm.powf(power - 1.0);
                direction.matvec_scaled(u, coeff, scratch);
                for (o, s) in out.iter_mut().zip(scratch.iter()) {
                    *o += s;
                }
            }
        }
    }
}

/// Forcing term of the evolution equation.
#[derive(Debug, Clone)]
pub enum Forcing {
    Zero,
    /// `b(t) = envelope(t) * e` with `||e|| = 1`, so `||b(t)||` equals the
    /// envelope exactly.
    Envelope {
        envelope: CoefficientFunction,
        direction: Vec<f64>,
    },
}

impl Forcing {
    fn apply_add(&self, t: f64, out: &mut [f64]) {
        match self {
            Forcing::Zero => {}
            Forcing::Envelope {
                envelope,
                direction,
            } => {
                let b = envelope.eval(t);
                for (o, e) in out.iter_mut().zip(direction) {
                    *o += b * e;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Forcing::Zero => true,
            Forcing::Envelope { envelope, .. } => envelope.is_zero(),
        }
    }
}

/// A validated problem instance.
#[derive(Debug, Clone)]
pub struct EvolutionProblem {
    pub operator: OperatorFamily,
    pub nonlinear: NonlinearTerm,
    pub forcing: Forcing,
    pub initial: Vec<f64>,
}

impl EvolutionProblem {
    pub fn new(
        operator: OperatorFamily,
        nonlinear: NonlinearTerm,
        forcing: Forcing,
        initial: Vec<f64>,
    ) -> Result<Self, SimulatorError> {
        let dim = operator.dim();
        if initial.len() != dim {
            return Err(SimulatorError::DimensionMismatch(format!(
                "operator is {dim}-dimensional but the initial state has {} entries",
                initial.len()
            )));
        }
        if initial.iter().any(|v| !v.is_finite()) {
            return Err(SimulatorError::NonFiniteState);
        }
        if let NonlinearTerm::NormPower {
            scale,
            power,
            direction,
        } = &nonlinear
        {
            if direction.dim() != dim {
                return Err(SimulatorError::DimensionMismatch(format!(
                    "nonlinear direction is {}-dimensional, expected {dim}",
                    direction.dim()
                )));
            }
            if !(*scale >= 0.0) {
                return Err(SimulatorError::NonPositive {
                    name: "nonlinearity scale",
                    value: *scale,
                });
            }
            if !(*power > 1.0) {
                return Err(SimulatorError::PowerNotSuperlinear(*power));
            }
        }
        if let Forcing::Envelope { direction, .. } = &forcing {
            if direction.len() != dim {
                return Err(SimulatorError::DimensionMismatch(format!(
                    "forcing direction has {} entries, expected {dim}",
                    direction.len()
                )));
            }
            let n = norm(direction);
            if (n - 1.0).abs() > 1e-12 {
                return Err(SimulatorError::DirectionNotUnit(n));
            }
        }
        Ok(Self {
            operator,
            nonlinear,
            forcing,
            initial,
        })
    }

    pub fn dim(&self) -> usize {
        self.initial.len()
    }

    /// `out = A(t) u + F(t, u) + b(t)`.
    fn rhs(&self, t: f64, u: &[f64], scratch: &mut [f64], out: &mut [f64]) {
        out.fill(0.0);
        self.operator.apply_add(t, u, out);
        self.nonlinear.apply_add(u, norm(u), scratch, out);
        self.forcing.apply_add(t, out);
    }
}

/// The measured dissipativity margin of `A(t)`: the largest `gamma` such
/// that `(A(t)u, u) <= -gamma ||u||^2` holds at time `t`, computed as the
/// negated top eigenvalue of the symmetric part.
pub fn dissipativity_margin(operator: &OperatorFamily, t: f64) -> f64 {
    let a = operator.at(t);
    let sym = a.symmetric_part();
    let eigs = symmetric_eigenvalues(&sym);
    -eigs.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// One sampled violation of the nonlinearity envelope.
#[derive(Debug, Clone)]
pub struct EnvelopeViolation {
    pub t: f64,
    pub state: Vec<f64>,
    pub ratio: f64,
}

/// Outcome of sampling `||F(t, u)|| <= c0 ||u||^p`.
#[derive(Debug, Clone)]
pub struct EnvelopeReport {
    /// Largest observed `||F(t,u)|| / (c0 ||u||^p)`.
    pub max_ratio: f64,
    pub samples: usize,
    pub violations: Vec<EnvelopeViolation>,
}

impl EnvelopeReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples random `(t, u)` with `||u||` log-uniform in `[1e-6, 10]` and
/// checks the declared envelope. Violations carry their witness.
pub fn verify_nonlinearity_envelope(
    term: &NonlinearTerm,
    c0: f64,
    p: f64,
    dim: usize,
    samples: usize,
    seed: u64,
) -> EnvelopeReport {
    assert!(samples >= 1, "need at least one sample");
    let mut rng = StdRng::seed_from_u64(seed);
    let mut max_ratio: f64 = 0.0;
    let mut violations = Vec::new();
    let mut u = vec![0.0; dim];
    let mut f = vec![0.0; dim];
    let mut scratch = vec![0.0; dim];
    for _ in 0..samples {
        let t = rng.gen_range(0.0..=50.0);
        loop {
            for v in u.iter_mut() {
                *v = rng.gen_range(-1.0..=1.0);
            }
            if norm(&u) > 1e-3 {
                break;
            }
        }
        let radius = 10f64.powf(rng.gen_range(-6.0..=1.0));
        let n = norm(&u);
        for v in u.iter_mut() {
            *v *= radius / n;
        }
        f.fill(0.0);
        term.apply_add(&u, radius, &mut scratch, &mut f);
        let ratio = norm(&f) / (c0 * radius.powf(p));
        max_ratio = max_ratio.max(ratio);
        if ratio > 1.0 + 1e-12 {
            violations.push(EnvelopeViolation {
                t,
                state: u.clone(),
                ratio,
            });
        }
    }
    EnvelopeReport {
        max_ratio,
        samples,
        violations,
    }
}

/// Integrator diagnostics.
#[derive(Debug, Clone, Default)]
pub struct IntegrationStats {
    pub rhs_evaluations: u64,
    /// Largest substep count any interval needed.
    pub max_substeps: usize,
    /// Largest accepted disagreement between the last two sweeps, relative.
    pub max_disagreement: f64,
}

/// A computed trajectory sampled on the grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Euclidean norms `||u(t_i)||`.
    pub norms: Vec<f64>,
    pub stats: IntegrationStats,
}

enum Sweep {
    State(Vec<f64>),
    BlowUp(f64),
}

/// Integrates the problem with classical fourth-order Runge-Kutta on each
/// grid interval, halving substeps until two successive sweeps agree to
/// relative `1e-8` in norm. Exceeding the overflow guard reports blow-up
/// with the escape time.
pub fn integrate(problem: &EvolutionProblem, grid: &TimeGrid) -> Result<Trajectory, SimulatorError> {
    let dim = problem.dim();
    let mut stats = IntegrationStats::default();
    let mut states = Vec::with_capacity(grid.len());
    let mut norms = Vec::with_capacity(grid.len());
    states.push(problem.initial.clone());
    norms.push(norm(&problem.initial));

    let mut current = problem.initial.clone();
    let mut work = Workspace::new(dim);
    for pair in grid.points().windows(2) {
        current = integrate_interval(problem, pair[0], pair[1], &current, &mut work, &mut stats)?;
        norms.push(norm(&current));
        states.push(current.clone());
    }
    Ok(Trajectory {
        times: grid.points().to_vec(),
        states,
        norms,
        stats,
    })
}

struct Workspace {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    stage: Vec<f64>,
    scratch: Vec<f64>,
}

impl Workspace {
    fn new(dim: usize) -> Self {
        Self {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            stage: vec![0.0; dim],
            scratch: vec![0.0; dim],
        }
    }
}

fn rk4_sweep(
    problem: &EvolutionProblem,
    t0: f64,
    t1: f64,
    u0: &[f64],
    n: usize,
    work: &mut Workspace,
    stats: &mut IntegrationStats,
) -> Sweep {
    let h = (t1 - t0) / n as f64;
    let mut u = u0.to_vec();
    for i in 0..n {
        let t = t0 + i as f64 * h;
        problem.rhs(t, &u, &mut work.scratch, &mut work.k1);
        stage(&u, &work.k1, 0.5 * h, &mut work.stage);
        problem.rhs(t + 0.5 * h, &work.stage, &mut work.scratch, &mut work.k2);
        stage(&u, &work.k2, 0.5 * h, &mut work.stage);
        problem.rhs(t + 0.5 * h, &work.stage, &mut work.scratch, &mut work.k3);
        stage(&u, &work.k3, h, &mut work.stage);
        problem.rhs(t + h, &work.stage, &mut work.scratch, &mut work.k4);
        stats.rhs_evaluations += 4;
        let sixth = h / 6.0;
        let mut bad = false;
        for (j, uv) in u.iter_mut().enumerate() {
            *uv += sixth * (work.k1[j] + 2.0 * work.k2[j] + 2.0 * work.k3[j] + work.k4[j]);
            if !uv.is_finite() || uv.abs() > OVERFLOW_GUARD {
                bad = true;
            }
        }
        if bad {
            return Sweep::BlowUp(t + h);
        }
    }
    Sweep::State(u)
}

fn stage(u: &[f64], k: &[f64], factor: f64, out: &mut [f64]) {
    for ((o, &uv), &kv) in out.iter_mut().zip(u).zip(k) {
        *o = uv + factor * kv;
    }
}

fn integrate_interval(
    problem: &EvolutionProblem,
    t0: f64,
    t1: f64,
    u0: &[f64],
    work: &mut Workspace,
    stats: &mut IntegrationStats,
) -> Result<Vec<f64>, SimulatorError> {
    let mut n = 1;
    let mut prev = rk4_sweep(problem, t0, t1, u0, n, work, stats);
    while n < MAX_SUBSTEPS {
        n *= 2;
        let cur = rk4_sweep(problem, t0, t1, u0, n, work, stats);
        match (&prev, &cur) {
            (Sweep::State(a), Sweep::State(b)) => {
                let diff: f64 = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt();
                let scale = norm(a).max(norm(b)).max(1e-300);
                if diff <= ODE_RTOL * scale {
                    stats.max_substeps = stats.max_substeps.max(n);
                    stats.max_disagreement = stats.max_disagreement.max(diff / scale);
                    // fourth-order Richardson correction of the finer sweep
                    let corrected = a
                        .iter()
                        .zip(b)
                        .map(|(x, y)| y + (y - x) / 15.0)
                        .collect();
                    return Ok(corrected);
                }
            }
            (Sweep::BlowUp(ta), Sweep::BlowUp(tb)) if (ta - tb).abs() <= BLOWUP_TIME_TOL => {
                return Err(SimulatorError::BlowUp { t: *tb });
            }
            _ => {}
        }
        prev = cur;
    }
    match prev {
        Sweep::BlowUp(t) => Err(SimulatorError::BlowUp { t }),
        Sweep::State(_) => Err(SimulatorError::NoConvergence { t: t1 }),
    }
}

/// Closed-form solution of the scalar flow `g' = -k g + c0 g^p`, `g(0) = u0`,
/// via the substitution `v = g^(1-p)`:
///
/// ```text
/// g(t) = [ (u0^(1-p) - c0/k) e^((p-1) k t) + c0/k ]^(-1/(p-1)).
/// ```
///
/// The solution exists for all `t >= 0` exactly when `c0 u0^(p-1) <= k`;
/// otherwise it escapes to infinity at the finite time where the bracket
/// vanishes. Serves as an independent oracle for the integrator.
#[derive(Debug, Clone, Copy)]
pub struct BernoulliOracle {
    k: f64,
    c0: f64,
    p: f64,
    u0: f64,
    escape: Option<f64>,
}

impl BernoulliOracle {
    pub fn new(k: f64, c0: f64, p: f64, u0: f64) -> Result<Self, SimulatorError> {
        for (name, value) in [("k", k), ("u0", u0)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(SimulatorError::NonPositive { name, value });
            }
        }
        if !(c0 >= 0.0) || !c0.is_finite() {
            return Err(SimulatorError::NonPositive {
                name: "c0",
                value: c0,
            });
        }
        if !(p > 1.0) {
            return Err(SimulatorError::PowerNotSuperlinear(p));
        }
        let drive = c0 * u0.powf(p - 1.0);
        let escape = if drive > k {
            Some((drive / (drive - k)).ln() / ((p - 1.0) * k))
        } else {
            None
        };
        Ok(Self {
            k,
            c0,
            p,
            u0,
            escape,
        })
    }

    /// Finite escape time, when the nonlinearity overpowers the dissipation
    /// (`c0 u0^(p-1) > k`).
    pub fn escape_time(&self) -> Option<f64> {
        self.escape
    }

    /// Evaluates the solution; requires `t` inside the existence interval.
    pub fn value(&self, t: f64) -> f64 {
        assert!(t >= 0.0, "oracle evaluated at negative time {t}");
        if let Some(te) = self.escape {
            assert!(t < te, "oracle evaluated at t = {t} past escape time {te}");
        }
        let pm1 = self.p - 1.0;
        let ratio = self.c0 / self.k;
        let bracket = (self.u0.powf(-pm1) - ratio) * (pm1 * self.k * t).exp() + ratio;
        bracket.powf(-1.0 / pm1)
    }
}

/// Pipeline stages of the end-to-end verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Precheck,
    Synthesis,
    Certification,
    Integration,
    BoundVerification,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Precheck => "precheck",
            Stage::Synthesis => "synthesis",
            Stage::Certification => "certification",
            Stage::Integration => "integration",
            Stage::BoundVerification => "bound verification",
        }
    }
}

/// Outcome of the declared-versus-measured prechecks.
#[derive(Debug, Clone)]
pub struct PrecheckReport {
    /// Worst value of `margin(t) - gamma(t)` over the grid; the declared
    /// dissipation is honest when this is (numerically) nonnegative.
    pub margin_check: ConditionCheck,
    /// Envelope sampling outcome for a norm-power nonlinearity.
    pub envelope: Option<EnvelopeReport>,
    /// Worst value of `beta(t) - ||b(t)||` over the grid, for forced runs.
    pub forcing_check: Option<ConditionCheck>,
    pub ok: bool,
}

/// Full record of the four-stage pipeline. Later stages stay `None` once a
/// stage fails; `failed_stage` names the first failure.
#[derive(Debug, Clone)]
pub struct EndToEndReport {
    pub regime: Regime,
    pub precheck: PrecheckReport,
    pub synthesis: Option<SynthesisResult>,
    pub radius_check: Option<ConditionCheck>,
    pub certificate: Option<Certificate>,
    pub trajectory: Option<Trajectory>,
    pub bound_report: Option<BoundReport>,
    pub blow_up: Option<f64>,
    pub failed_stage: Option<Stage>,
    pub pass: bool,
}

/// Declared dissipation and forcing families for a regime.
fn declared_families(
    regime: Regime,
    constants: &ProblemConstants,
) -> Result<(CoefficientFunction, CoefficientFunction), SynthesisError> {
    let gamma = match regime {
        Regime::Exponential => {
            CoefficientFunction::constant(constants.k.ok_or(SynthesisError::MissingConstant("k"))?)?
        }
        Regime::Power | Regime::Forced => CoefficientFunction::power_decay(
            constants.c1.ok_or(SynthesisError::MissingConstant("c1"))?,
            constants.q1.ok_or(SynthesisError::MissingConstant("q1"))?,
        )?,
    };
    let beta = match regime {
        Regime::Forced => CoefficientFunction::power_decay(
            constants.c2.ok_or(SynthesisError::MissingConstant("c2"))?,
            constants.q2.ok_or(SynthesisError::MissingConstant("q2"))?,
        )?,
        _ => CoefficientFunction::zero(),
    };
    Ok((gamma, beta))
}

/// Runs the full pipeline: precheck the declared families against the
/// problem, synthesize the regime's majorant, certify it, integrate the
/// problem and verify the bound along the computed norms. Any stage
/// failure aborts the later stages; the report names the stage.
pub fn end_to_end_verify(
    problem: &EvolutionProblem,
    regime: Regime,
    constants: &ProblemConstants,
    grid: &TimeGrid,
) -> Result<EndToEndReport, SimulatorError> {
    constants.validate()?;
    let (gamma, beta) = declared_families(regime, constants)?;

    // precheck: measured dissipativity must dominate the declared family,
    // the nonlinear term must respect its envelope, forcing must respect
    // its envelope, and the unforced regimes require zero forcing.
    let mut worst_margin_slack = f64::INFINITY;
    let mut margin_at_worst = (0.0, 0.0);
    let base_margin = match &problem.operator {
        OperatorFamily::Constant { .. } => Some(dissipativity_margin(&problem.operator, 0.0)),
        OperatorFamily::Scaled { base, .. } => {
            let sym = base.symmetric_part();
            Some(-symmetric_eigenvalues(&sym).into_iter().fold(f64::NEG_INFINITY, f64::max))
        }
    };
    for &t in grid.points() {
        let margin = match (&problem.operator, base_margin) {
            (OperatorFamily::Constant { .. }, Some(m)) => m,
            (OperatorFamily::Scaled { scale, .. }, Some(m)) => scale.eval(t) * m,
            _ => dissipativity_margin(&problem.operator, t),
        };
        let slack = margin - gamma.eval(t);
        if slack < worst_margin_slack {
            worst_margin_slack = slack;
            margin_at_worst = (gamma.eval(t), margin);
        }
    }
    let margin_check = ConditionCheck {
        condition: ConditionId::Dissipativity,
        lhs: margin_at_worst.0,
        rhs: margin_at_worst.1,
        holds: worst_margin_slack >= -1e-9,
    };

    let envelope = match &problem.nonlinear {
        NonlinearTerm::Zero => None,
        NonlinearTerm::NormPower { .. } => Some(verify_nonlinearity_envelope(
            &problem.nonlinear,
            constants.c0,
            constants.p,
            problem.dim(),
            PRECHECK_ENVELOPE_SAMPLES,
            PRECHECK_SEED,
        )),
    };
    let envelope_ok = envelope.as_ref().map(|e| e.ok()).unwrap_or(true);

    let forcing_check = match regime {
        Regime::Forced => {
            let mut worst = f64::INFINITY;
            let mut at = (0.0, 0.0);
            for &t in grid.points() {
                let b_norm = match &problem.forcing {
                    Forcing::Zero => 0.0,
                    Forcing::Envelope { envelope, .. } => envelope.eval(t),
                };
                let slack = beta.eval(t) - b_norm;
                if slack < worst {
                    worst = slack;
                    at = (b_norm, beta.eval(t));
                }
            }
            Some(ConditionCheck {
                condition: ConditionId::ForcingEnvelope,
                lhs: at.0,
                rhs: at.1,
                holds: worst >= -1e-12,
            })
        }
        Regime::Exponential | Regime::Power => {
            if problem.forcing.is_zero() {
                None
            } else {
                Some(ConditionCheck {
                    condition: ConditionId::ForcingEnvelope,
                    lhs: 1.0,
                    rhs: 0.0,
                    holds: false,
                })
            }
        }
    };
    let forcing_ok = forcing_check.as_ref().map(|c| c.holds).unwrap_or(true);

    let precheck = PrecheckReport {
        margin_check,
        envelope,
        forcing_check,
        ok: false,
    };
    let precheck_ok = precheck.margin_check.holds && envelope_ok && forcing_ok;
    let precheck = PrecheckReport {
        ok: precheck_ok,
        ..precheck
    };

    let mut report = EndToEndReport {
        regime,
        precheck,
        synthesis: None,
        radius_check: None,
        certificate: None,
        trajectory: None,
        bound_report: None,
        blow_up: None,
        failed_stage: None,
        pass: false,
    };
    if !precheck_ok {
        report.failed_stage = Some(Stage::Precheck);
        return Ok(report);
    }

    // synthesis
    let g0 = norm(&problem.initial);
    let synthesis = synthesize(regime, constants, Some(g0))?;
    let radius_check = ConditionCheck::le(
        match regime {
            Regime::Forced => ConditionId::ForcedRadius,
            _ => ConditionId::InitialRadius,
        },
        g0,
        synthesis.initial_radius,
        1e-12,
    );
    let synthesis_ok = synthesis.feasible && radius_check.holds;
    report.synthesis = Some(synthesis.clone());
    report.radius_check = Some(radius_check);
    if !synthesis_ok {
        report.failed_stage = Some(Stage::Synthesis);
        return Ok(report);
    }

    // certification against the declared families
    let alpha = Nonlinearity::power_law(constants.c0, constants.p)
        .map_err(SynthesisError::Family)?;
    let certificate = check_majorant_condition(
        &alpha,
        &beta,
        &gamma,
        &synthesis.majorant,
        g0,
        grid,
        crate::inequality::DEFAULT_TOL,
    );
    let cert_ok = certificate.feasible;
    report.certificate = Some(certificate);
    if !cert_ok {
        report.failed_stage = Some(Stage::Certification);
        return Ok(report);
    }

    // integration
    let trajectory = match integrate(problem, grid) {
        Ok(t) => t,
        Err(SimulatorError::BlowUp { t }) => {
            report.blow_up = Some(t);
            report.failed_stage = Some(Stage::Integration);
            return Ok(report);
        }
        Err(e) => return Err(e),
    };

    // bound verification along the computed norms
    let bound_report = verify_bound(
        &trajectory.times,
        &trajectory.norms,
        &synthesis.majorant,
        BOUND_TOL,
    );
    let bound_ok = bound_report.ok();
    report.trajectory = Some(trajectory);
    report.bound_report = Some(bound_report);
    if !bound_ok {
        report.failed_stage = Some(Stage::BoundVerification);
        return Ok(report);
    }
    report.pass = true;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_problem(k: f64, c0: f64, p: f64, u0: f64) -> EvolutionProblem {
        EvolutionProblem::new(
            OperatorFamily::Constant {
                matrix: SquareMatrix::from_rows(vec![vec![-k]]).unwrap(),
            },
            if c0 == 0.0 {
                NonlinearTerm::Zero
            } else {
                NonlinearTerm::NormPower {
                    scale: c0,
                    power: p,
                    direction: SquareMatrix::identity(1),
                }
            },
            Forcing::Zero,
            vec![u0],
        )
        .unwrap()
    }

    #[test]
    fn margin_of_negated_identity() {
        let op = OperatorFamily::Constant {
            matrix: SquareMatrix::from_rows(vec![vec![-1.0, 0.0], vec![0.0, -1.0]]).unwrap(),
        };
        assert!((dissipativity_margin(&op, 0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn margin_of_shear() {
        let op = OperatorFamily::Constant {
            matrix: SquareMatrix::from_rows(vec![vec![-1.0, 2.0], vec![0.0, -1.0]]).unwrap(),
        };
        assert!(dissipativity_margin(&op, 0.0).abs() < 1e-12);
    }

    #[test]
    fn margin_of_damped_rotation() {
        let (k, omega) = (0.7, 3.0);
        let op = OperatorFamily::Constant {
            matrix: SquareMatrix::from_rows(vec![vec![-k, omega], vec![-omega, -k]]).unwrap(),
        };
        assert!((dissipativity_margin(&op, 0.0) - k).abs() < 1e-12);
    }

    #[test]
    fn margin_of_scaled_operator_tracks_the_coefficient() {
        let op = OperatorFamily::Scaled {
            base: SquareMatrix::from_rows(vec![vec![-1.0]]).unwrap(),
            scale: CoefficientFunction::power_decay(1.0, 1.0).unwrap(),
        };
        assert!((dissipativity_margin(&op, 0.0) - 1.0).abs() < 1e-12);
        assert!((dissipativity_margin(&op, 3.0) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn envelope_reports() {
        let zero = NonlinearTerm::Zero;
        let r = verify_nonlinearity_envelope(&zero, 1.0, 2.0, 2, 100, 7);
        assert_eq!(r.max_ratio, 0.0);
        assert!(r.ok());

        let tight = NonlinearTerm::NormPower {
            scale: 1.0,
            power: 2.0,
            direction: SquareMatrix::identity(2),
        };
        let r = verify_nonlinearity_envelope(&tight, 1.0, 2.0, 2, 500, 7);
        assert!(r.ok(), "violations: {:?}", r.violations.len());
        assert!((r.max_ratio - 1.0).abs() < 1e-9, "ratio {}", r.max_ratio);

        let half = NonlinearTerm::NormPower {
            scale: 1.0,
            power: 2.0,
            direction: SquareMatrix::from_rows(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap(),
        };
        let r = verify_nonlinearity_envelope(&half, 1.0, 2.0, 2, 500, 7);
        assert!((r.max_ratio - 0.5).abs() < 1e-9);

        // an overdriven direction is caught with its witness
        let over = NonlinearTerm::NormPower {
            scale: 1.0,
            power: 2.0,
            direction: SquareMatrix::from_rows(vec![vec![1.5, 0.0], vec![0.0, 0.1]]).unwrap(),
        };
        let r = verify_nonlinearity_envelope(&over, 1.0, 2.0, 2, 500, 7);
        assert!(!r.ok());
        assert!(r.max_ratio > 1.0);
    }

    #[test]
    fn linear_decay_matches_exponential() {
        let problem = scalar_problem(1.0, 0.0, 2.0, 1.0);
        let grid = TimeGrid::uniform(1.0, 33).unwrap();
        let traj = integrate(&problem, &grid).unwrap();
        let got = traj.norms.last().unwrap();
        let expect = (-1.0f64).exp();
        assert!(
            (got - expect).abs() / expect < 1e-8,
            "g(1) = {got}, expected {expect}"
        );
    }

    #[test]
    fn equilibrium_stays_exactly_zero() {
        let problem = scalar_problem(1.0, 0.5, 2.0, 0.0);
        let grid = TimeGrid::geometric(10.0, 64).unwrap();
        let traj = integrate(&problem, &grid).unwrap();
        assert!(traj.norms.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn integrator_matches_bernoulli_oracle() {
        let problem = scalar_problem(1.0, 0.5, 2.0, 0.5);
        let grid = TimeGrid::geometric(20.0, 512).unwrap();
        let traj = integrate(&problem, &grid).unwrap();
        let oracle = BernoulliOracle::new(1.0, 0.5, 2.0, 0.5).unwrap();
        assert!(oracle.escape_time().is_none());
        for (&t, &g) in traj.times.iter().zip(&traj.norms) {
            let exact = oracle.value(t);
            assert!(
                (g - exact).abs() / exact < 1e-8,
                "t = {t}: {g} vs {exact}"
            );
        }
    }

    #[test]
    fn oracle_closed_forms() {
        // linear case decays exponentially
        let o = BernoulliOracle::new(2.0, 0.0, 2.0, 0.7).unwrap();
        assert!((o.value(1.5) - 0.7 * (-3.0f64).exp()).abs() < 1e-15);

        // the book case: u(t) = 1/(1.5 e^t + 0.5)
        let o = BernoulliOracle::new(1.0, 0.5, 2.0, 0.5).unwrap();
        let t = 1.0f64;
        let expect = 1.0 / (1.5 * t.exp() + 0.5);
        assert!((o.value(t) - expect).abs() < 1e-15);

        // supercritical data escapes at ln 2
        let o = BernoulliOracle::new(1.0, 2.0, 2.0, 1.0).unwrap();
        let te = o.escape_time().unwrap();
        assert!((te - 2.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    #[should_panic(expected = "past escape time")]
    fn oracle_rejects_times_past_escape() {
        let o = BernoulliOracle::new(1.0, 2.0, 2.0, 1.0).unwrap();
        o.value(1.0);
    }

    #[test]
    fn blow_up_detected_near_escape_time() {
        let problem = scalar_problem(1.0, 2.0, 2.0, 1.0);
        let grid = TimeGrid::uniform(1.0, 1025).unwrap();
        match integrate(&problem, &grid) {
            Err(SimulatorError::BlowUp { t }) => {
                assert!(
                    (t - 2.0f64.ln()).abs() < 1e-3,
                    "escape detected at {t}, expected ln 2 = {}",
                    2.0f64.ln()
                );
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn rotation_invariance_of_norm_trajectories() {
        let theta = 0.7f64;
        let q = SquareMatrix::from_rows(vec![
            vec![theta.cos(), -theta.sin()],
            vec![theta.sin(), theta.cos()],
        ])
        .unwrap();
        let a = SquareMatrix::from_rows(vec![vec![-1.0, 0.4], vec![-0.4, -1.5]]).unwrap();
        let u0 = vec![0.3, -0.4];

        let problem = EvolutionProblem::new(
            OperatorFamily::Constant { matrix: a.clone() },
            NonlinearTerm::NormPower {
                scale: 0.2,
                power: 2.0,
                direction: SquareMatrix::identity(2),
            },
            Forcing::Zero,
            u0.clone(),
        )
        .unwrap();

        let rotated_a = a.conjugate(&q);
        // Q^T u0
        let rotated_u0: Vec<f64> = (0..2)
            .map(|i| q.get(0, i) * u0[0] + q.get(1, i) * u0[1])
            .collect();
        let rotated = EvolutionProblem::new(
            OperatorFamily::Constant { matrix: rotated_a },
            NonlinearTerm::NormPower {
                scale: 0.2,
                power: 2.0,
                direction: SquareMatrix::identity(2),
            },
            Forcing::Zero,
            rotated_u0,
        )
        .unwrap();

        let grid = TimeGrid::geometric(10.0, 128).unwrap();
        let t1 = integrate(&problem, &grid).unwrap();
        let t2 = integrate(&rotated, &grid).unwrap();
        for (a, b) in t1.norms.iter().zip(&t2.norms) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn problem_validation() {
        // dimension mismatch
        assert!(EvolutionProblem::new(
            OperatorFamily::Constant {
                matrix: SquareMatrix::identity(2)
            },
            NonlinearTerm::Zero,
            Forcing::Zero,
            vec![1.0],
        )
        .is_err());
        // non-unit forcing direction
        assert!(EvolutionProblem::new(
            OperatorFamily::Constant {
                matrix: SquareMatrix::identity(2)
            },
            NonlinearTerm::Zero,
            Forcing::Envelope {
                envelope: CoefficientFunction::constant(1.0).unwrap(),
                direction: vec![1.0, 1.0],
            },
            vec![1.0, 0.0],
        )
        .is_err());
    }

    #[test]
    fn end_to_end_exponential_regime() {
        let problem = scalar_problem(1.0, 1.0, 2.0, 0.4);
        let constants = ProblemConstants {
            c0: 1.0,
            p: 2.0,
            k: Some(1.0),
            epsilon: Some(0.5),
            ..Default::default()
        };
        let grid = TimeGrid::geometric(50.0, 512).unwrap();
        let report = end_to_end_verify(&problem, Regime::Exponential, &constants, &grid).unwrap();
        assert!(report.pass, "failed stage: {:?}", report.failed_stage);
        let cert = report.certificate.as_ref().unwrap();
        assert!(cert.proven_all_t);
        // the certified bound is e^{-t/2}/2
        let traj = report.trajectory.as_ref().unwrap();
        for (&t, &g) in traj.times.iter().zip(&traj.norms) {
            assert!(g <= 0.5 * (-0.5 * t).exp() + 1e-9);
        }
    }

    #[test]
    fn end_to_end_fails_precheck_when_dissipation_overdeclared() {
        // declared k = 2 but the operator only provides margin 1
        let problem = scalar_problem(1.0, 1.0, 2.0, 0.1);
        let constants = ProblemConstants {
            c0: 1.0,
            p: 2.0,
            k: Some(2.0),
            epsilon: Some(0.5),
            ..Default::default()
        };
        let grid = TimeGrid::geometric(10.0, 64).unwrap();
        let report = end_to_end_verify(&problem, Regime::Exponential, &constants, &grid).unwrap();
        assert!(!report.pass);
        assert_eq!(report.failed_stage, Some(Stage::Precheck));
    }

    #[test]
    fn end_to_end_rejects_forcing_in_unforced_regime() {
        let problem = EvolutionProblem::new(
            OperatorFamily::Constant {
                matrix: SquareMatrix::from_rows(vec![vec![-1.0]]).unwrap(),
            },
            NonlinearTerm::Zero,
            Forcing::Envelope {
                envelope: CoefficientFunction::constant(0.1).unwrap(),
                direction: vec![1.0],
            },
            vec![0.2],
        )
        .unwrap();
        let constants = ProblemConstants {
            c0: 0.0,
            p: 2.0,
            k: Some(1.0),
            epsilon: Some(0.5),
            ..Default::default()
        };
        let grid = TimeGrid::geometric(10.0, 64).unwrap();
        let report = end_to_end_verify(&problem, Regime::Exponential, &constants, &grid).unwrap();
        assert_eq!(report.failed_stage, Some(Stage::Precheck));
    }
}

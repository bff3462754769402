//! Discrete analogue of the majorant certification.
//!
//! Sequences `g_n >= 0` obeying
//!
//! ```text
//! g_{n+1} <= (1 - h_n gamma_n) g_n + h_n alpha(n, g_n) + h_n beta_n,
//! h_n > 0,  0 < h_n gamma_n < 1,
//! ```
//!
//! stay below `1/mu_n` whenever the positive sequence `mu_n` satisfies
//!
//! ```text
//! alpha(n, 1/mu_n) + beta_n <= (1/mu_n) (gamma_n - (mu_{n+1} - mu_n)/(h_n mu_n))
//! ```
//!
//! for every step together with `g_0 <= 1/mu_0`. The bound here is
//! non-strict throughout; there is no strict/borderline distinction as in
//! the continuous case.
//!
//! The worst sequence the inequality admits is its equality version, the
//! extremal recursion: any admissible sequence is dominated by it termwise
//! because the step map is nondecreasing in `g_n` (the side condition
//! `h_n gamma_n < 1` keeps the linear factor positive and `alpha` is
//! nondecreasing). Validating the bound on the extremal recursion therefore
//! validates it for every admissible sequence at once.

use rand::Rng;
use thiserror::Error;

use crate::families::Nonlinearity;

/// Overflow guard for the extremal recursion.
const OVERFLOW_GUARD: f64 = 1e300;

/// Cap applied by the random generator so majorant sequences stay
/// comfortably inside f64 range over long runs.
const MU_CAP: f64 = 1e250;

#[derive(Debug, Error)]
pub enum DiscreteError {
    #[error("step {index}: {message}")]
    InvalidScheme { index: usize, message: String },
    #[error("sequence lengths inconsistent: {0}")]
    LengthMismatch(String),
    #[error("extremal recursion diverges at step {index}")]
    Divergence { index: usize },
    #[error("scheme is infeasible ({reason}); no bound is claimed")]
    Infeasible { reason: String },
    #[error(
        "feasible scheme violated its bound at step {index} (g = {value}, bound = {bound}); \
         this indicates an engine bug"
    )]
    InternalInconsistency { index: usize, value: f64, bound: f64 },
}

/// How the nonlinearity reads its first argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeScale {
    /// `alpha(n, g)` with the bare step index as time.
    #[default]
    Index,
    /// `alpha(t_n, g)` with `t_n` the accumulated step sum; used when the
    /// scheme discretizes a continuous problem.
    Cumulative,
}

/// A validated discrete scheme over `n_max` steps.
///
/// `steps`, `dissipation` and `forcing` have length `n_max`; `majorant` has
/// length `n_max + 1` so the final bound `1/mu_{n_max}` is available.
#[derive(Debug, Clone)]
pub struct DiscreteScheme {
    steps: Vec<f64>,
    dissipation: Vec<f64>,
    forcing: Vec<f64>,
    majorant: Vec<f64>,
    nonlinearity: Nonlinearity,
    time_scale: TimeScale,
    /// Prefix sums of `steps` (length `n_max + 1`), for [`TimeScale::Cumulative`].
    times: Vec<f64>,
}

impl DiscreteScheme {
    pub fn new(
        steps: Vec<f64>,
        dissipation: Vec<f64>,
        forcing: Vec<f64>,
        majorant: Vec<f64>,
        nonlinearity: Nonlinearity,
        time_scale: TimeScale,
    ) -> Result<Self, DiscreteError> {
        let n = steps.len();
        if n == 0 {
            return Err(DiscreteError::LengthMismatch("no steps".into()));
        }
        if dissipation.len() != n || forcing.len() != n {
            return Err(DiscreteError::LengthMismatch(format!(
                "{} steps, {} dissipation entries, {} forcing entries",
                n,
                dissipation.len(),
                forcing.len()
            )));
        }
        if majorant.len() != n + 1 {
            return Err(DiscreteError::LengthMismatch(format!(
                "majorant needs {} entries for {} steps, got {}",
                n + 1,
                n,
                majorant.len()
            )));
        }
        for i in 0..n {
            let h = steps[i];
            let gamma = dissipation[i];
            if !(h > 0.0) || !h.is_finite() {
                return Err(DiscreteError::InvalidScheme {
                    index: i,
                    message: format!("step must be positive, got {h}"),
                });
            }
            let product = h * gamma;
            if !(product > 0.0 && product < 1.0) {
                return Err(DiscreteError::InvalidScheme {
                    index: i,
                    message: format!("h*gamma must lie in (0, 1), got {product}"),
                });
            }
            if !(forcing[i] >= 0.0) {
                return Err(DiscreteError::InvalidScheme {
                    index: i,
                    message: format!("forcing must be nonnegative, got {}", forcing[i]),
                });
            }
        }
        for (i, &mu) in majorant.iter().enumerate() {
            if !(mu > 0.0) || !mu.is_finite() {
                return Err(DiscreteError::InvalidScheme {
                    index: i,
                    message: format!("majorant must be positive and finite, got {mu}"),
                });
            }
        }
        let mut times = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        times.push(0.0);
        for &h in &steps {
            acc += h;
            times.push(acc);
        }
        Ok(Self {
            steps,
            dissipation,
            forcing,
            majorant,
            nonlinearity,
            time_scale,
            times,
        })
    }

    pub fn n_max(&self) -> usize {
        self.steps.len()
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn majorant(&self) -> &[f64] {
        &self.majorant
    }

    /// The time argument handed to the nonlinearity at step `n`.
    fn alpha_time(&self, n: usize) -> f64 {
        match self.time_scale {
            TimeScale::Index => n as f64,
            TimeScale::Cumulative => self.times[n],
        }
    }

    fn alpha(&self, n: usize, g: f64) -> f64 {
        self.nonlinearity.eval(self.alpha_time(n), g)
    }
}

/// Per-step verdict of the discrete feasibility conditions.
#[derive(Debug, Clone)]
pub struct DiscreteCertificate {
    /// Conjunction of the step condition and the initial condition.
    pub feasible: bool,
    /// The step condition holds at every `n < n_max`.
    pub condition_ok: bool,
    /// `g_0 <= 1/mu_0`.
    pub initial_ok: bool,
    /// Slack `rhs - lhs` of the step condition at each `n`.
    pub slack: Vec<f64>,
    pub first_violation: Option<usize>,
    pub tol: f64,
}

/// Checks the step condition at each `n < n_max` and the initial condition,
/// with absolute tolerance `tol` on the slack.
pub fn check_discrete_condition(
    scheme: &DiscreteScheme,
    g0: f64,
    tol: f64,
) -> DiscreteCertificate {
    assert!(g0 >= 0.0, "initial value must be nonnegative, got {g0}");
    assert!(tol >= 0.0);
    let n = scheme.n_max();
    let mut slack = Vec::with_capacity(n);
    let mut first_violation = None;
    for i in 0..n {
        let mu = scheme.majorant[i];
        let mu_next = scheme.majorant[i + 1];
        let growth = (mu_next - mu) / (scheme.steps[i] * mu);
        let rhs = (scheme.dissipation[i] - growth) / mu;
        let lhs = scheme.alpha(i, 1.0 / mu) + scheme.forcing[i];
        let s = rhs - lhs;
        if s < -tol && first_violation.is_none() {
            first_violation = Some(i);
        }
        slack.push(s);
    }
    let condition_ok = first_violation.is_none();
    let initial_ok = g0 <= 1.0 / scheme.majorant[0] + tol;
    DiscreteCertificate {
        feasible: condition_ok && initial_ok,
        condition_ok,
        initial_ok,
        slack,
        first_violation,
        tol,
    }
}

/// Iterates the equality version of the recursion, the worst admissible
/// sequence, and returns `g_0 ..= g_{n_max}`.
pub fn evolve_extremal(scheme: &DiscreteScheme, g0: f64) -> Result<Vec<f64>, DiscreteError> {
    assert!(g0 >= 0.0, "initial value must be nonnegative, got {g0}");
    let n = scheme.n_max();
    let mut out = Vec::with_capacity(n + 1);
    out.push(g0);
    let mut g = g0;
    for i in 0..n {
        let h = scheme.steps[i];
        g = (1.0 - h * scheme.dissipation[i]) * g + h * scheme.alpha(i, g) + h * scheme.forcing[i];
        if !g.is_finite() || g.abs() > OVERFLOW_GUARD {
            return Err(DiscreteError::Divergence { index: i + 1 });
        }
        out.push(g);
    }
    Ok(out)
}

/// Margins of the extremal sequence against its bound.
#[derive(Debug, Clone)]
pub struct DiscreteBoundReport {
    /// Worst absolute margin `min(1/mu_n - g_n)`.
    pub min_margin: f64,
    /// Worst relative use `max(g_n * mu_n)`; at most 1 for feasible schemes.
    pub max_ratio: f64,
    pub n_max: usize,
}

/// Runs the extremal recursion under a feasible scheme and confirms
/// `g_n <= 1/mu_n` for every `n <= n_max`.
///
/// An infeasible scheme is rejected up front (no bound is claimed). A bound
/// violation on a feasible scheme cannot happen mathematically, so it is
/// reported as an internal inconsistency rather than a data error.
pub fn verify_discrete_bound(
    scheme: &DiscreteScheme,
    g0: f64,
    tol: f64,
) -> Result<DiscreteBoundReport, DiscreteError> {
    let cert = check_discrete_condition(scheme, g0, tol);
    if !cert.feasible {
        let reason = if !cert.initial_ok {
            format!("g_0 = {g0} exceeds 1/mu_0 = {}", 1.0 / scheme.majorant[0])
        } else {
            format!(
                "step condition fails first at n = {}",
                cert.first_violation.unwrap()
            )
        };
        return Err(DiscreteError::Infeasible { reason });
    }
    let seq = evolve_extremal(scheme, g0)?;
    let mut min_margin = f64::INFINITY;
    let mut max_ratio = f64::NEG_INFINITY;
    for (i, &g) in seq.iter().enumerate() {
        let bound = 1.0 / scheme.majorant[i];
        min_margin = min_margin.min(bound - g);
        max_ratio = max_ratio.max(g * scheme.majorant[i]);
        if g > bound + tol {
            return Err(DiscreteError::InternalInconsistency {
                index: i,
                value: g,
                bound,
            });
        }
    }
    Ok(DiscreteBoundReport {
        min_margin,
        max_ratio,
        n_max: scheme.n_max(),
    })
}

/// Draws a feasible scheme by construction, together with an admissible
/// initial value.
///
/// Steps and dissipation are drawn with `h_n gamma_n` in `(0.05, 0.95)`.
/// The majorant advances by solving the step condition for the largest
/// admissible `mu_{n+1}` and keeping a random fraction in `[0.5, 1)` of the
/// allowed increment, so every step retains strictly positive slack. The
/// per-step forcing is drawn below the budget the condition leaves after
/// the nonlinearity, which keeps the largest admissible `mu_{n+1}` above
/// `mu_n`; the sequence is nondecreasing and capped so that long runs stay
/// inside f64 range.
pub fn random_feasible_scheme<R: Rng>(
    rng: &mut R,
    n_max: usize,
) -> (DiscreteScheme, f64) {
    let p: f64 = rng.gen_range(1.2..=3.0);
    let mu0: f64 = rng.gen_range(0.5..=2.0);
    // mu_n * alpha(1/mu_n) = c0 mu_n^(1-p) never exceeds 0.025 once
    // mu_n >= mu0, half the smallest dissipation rate drawn below.
    let c0 = rng.gen_range(0.0..=0.025) * mu0.powf(p - 1.0);
    let nonlinearity = Nonlinearity::power_law(c0, p).expect("valid power law");

    let mut steps = Vec::with_capacity(n_max);
    let mut dissipation = Vec::with_capacity(n_max);
    let mut forcing = Vec::with_capacity(n_max);
    let mut majorant = Vec::with_capacity(n_max + 1);
    majorant.push(mu0);

    let mut mu = mu0;
    for _ in 0..n_max {
        let h = rng.gen_range(0.01..=1.0);
        let gamma = rng.gen_range(0.05..=0.95) / h;
        let recip = 1.0 / mu;
        let alpha = nonlinearity.eval(0.0, recip);
        let budget = gamma / mu - alpha;
        debug_assert!(budget > 0.0);
        let beta = rng.gen_range(0.0..=0.9) * budget;
        // largest admissible next value, then keep a strict fraction of the
        // increment above mu_n
        let largest = mu * (1.0 + h * (gamma - mu * (alpha + beta)));
        let shrink = rng.gen_range(0.5..0.999);
        let next = (mu + shrink * (largest - mu)).min(MU_CAP);

        steps.push(h);
        dissipation.push(gamma);
        forcing.push(beta);
        majorant.push(next);
        mu = next;
    }

    let g0 = rng.gen_range(0.0..=1.0) / mu0;
    let scheme = DiscreteScheme::new(
        steps,
        dissipation,
        forcing,
        majorant,
        nonlinearity,
        TimeScale::Index,
    )
    .expect("generated scheme is valid");
    (scheme, g0)
}

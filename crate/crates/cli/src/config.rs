//! Scenario files: TOML schema, loading and validation.
//!
//! A scenario is a TOML document with top-level keys (`name`, `mode`,
//! `regime`, `g0`, `tol`, `output`) and optional sections `[grid]`,
//! `[constants]`, `[families.*]`, `[problem]` and `[discrete]`. Every field
//! is optional at the parse layer; what a mode actually requires is checked
//! during validation so that missing fields surface as validation errors
//! naming their path rather than parse failures.

use std::fmt;
use std::path::{Path, PathBuf};

use majorant::{
    CoefficientFunction, DiscreteScheme, EvolutionProblem, Forcing, Majorant, NonlinearTerm,
    Nonlinearity, OperatorFamily, ProblemConstants, Regime, SquareMatrix, SynthesisError,
    TimeScale, TimeGrid,
};
use serde::Deserialize;

/// Errors keyed to the process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Exit code 2: the file is not readable as the config format.
    Parse(String),
    /// Exit code 3: the config is well-formed but invalid; the message
    /// names the offending field path.
    Validation(String),
    /// Exit code 4: filesystem failures.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Execution mode; must match the subcommand the scenario is run under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Certify,
    Simulate,
    Synthesize,
    Discrete,
    End2end,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Certify => "certify",
            Mode::Simulate => "simulate",
            Mode::Synthesize => "synthesize",
            Mode::Discrete => "discrete",
            Mode::End2end => "end2end",
        }
    }

    fn from_str(s: &str) -> Option<Self> {
        match s {
            "certify" => Some(Mode::Certify),
            "simulate" => Some(Mode::Simulate),
            "synthesize" => Some(Mode::Synthesize),
            "discrete" => Some(Mode::Discrete),
            "end2end" => Some(Mode::End2end),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// raw TOML schema
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: Option<String>,
    mode: Option<String>,
    regime: Option<String>,
    g0: Option<f64>,
    tol: Option<f64>,
    output: Option<String>,
    grid: Option<GridConfig>,
    constants: Option<ConstantsConfig>,
    families: Option<FamiliesConfig>,
    problem: Option<ProblemConfig>,
    discrete: Option<DiscreteConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridConfig {
    t_end: Option<f64>,
    points: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantsConfig {
    c0: Option<f64>,
    p: Option<f64>,
    k: Option<f64>,
    c1: Option<f64>,
    q1: Option<f64>,
    c2: Option<f64>,
    q2: Option<f64>,
    epsilon: Option<f64>,
    nu: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamiliesConfig {
    alpha: Option<NonlinearityConfig>,
    beta: Option<CoeffConfig>,
    gamma: Option<CoeffConfig>,
    mu: Option<MajorantConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum CoeffConfig {
    Constant { c: f64 },
    PowerDecay { c: f64, q: f64 },
    ExponentialDecay { c: f64, r: f64 },
    Tabulated { knots: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum MajorantConfig {
    Exponential { lambda: f64, b: f64 },
    Power { lambda: f64, nu: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum NonlinearityConfig {
    PowerLaw {
        c0: f64,
        p: f64,
    },
    Tabulated {
        t_knots: Vec<f64>,
        g_knots: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemConfig {
    u0: Option<Vec<f64>>,
    operator: Option<OperatorConfig>,
    nonlinear: Option<NonlinearConfig>,
    forcing: Option<ForcingConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum OperatorConfig {
    Constant {
        matrix: Vec<Vec<f64>>,
    },
    Scaled {
        matrix: Vec<Vec<f64>>,
        scale: CoeffConfig,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum NonlinearConfig {
    Zero,
    NormPower {
        c0: f64,
        p: f64,
        direction: Option<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ForcingConfig {
    Zero,
    Envelope {
        envelope: CoeffConfig,
        direction: Vec<f64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscreteConfig {
    n_max: Option<usize>,
    g0: Option<f64>,
    h: Option<SeqConfig>,
    gamma: Option<SeqConfig>,
    beta: Option<SeqConfig>,
    mu: Option<MuSeqConfig>,
    time_scale: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SeqConfig {
    Scalar(f64),
    List(Vec<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum MuSeqConfig {
    Geometric { mu0: f64, ratio: f64 },
    List { values: Vec<f64> },
}

// ---------------------------------------------------------------------------
// validated scenario
// ---------------------------------------------------------------------------

/// Command-line overrides applied while loading.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub grid_points: Option<usize>,
    pub t_end: Option<f64>,
    pub tol: Option<f64>,
}

/// A discrete scheme together with its initial value.
#[derive(Debug, Clone)]
pub struct DiscreteSetup {
    pub scheme: DiscreteScheme,
    pub g0: f64,
}

/// A fully validated scenario: every declared section has been converted
/// into its engine type, and the mode's requirements are resolvable.
#[derive(Debug)]
pub struct Scenario {
    pub name: String,
    pub mode: Mode,
    pub regime: Option<Regime>,
    pub g0: Option<f64>,
    pub tol: f64,
    pub output: Option<PathBuf>,
    pub grid: TimeGrid,
    pub constants: Option<ProblemConstants>,
    pub alpha: Option<Nonlinearity>,
    pub beta: Option<CoefficientFunction>,
    pub gamma: Option<CoefficientFunction>,
    pub mu: Option<Majorant>,
    pub problem: Option<EvolutionProblem>,
    pub discrete: Option<DiscreteSetup>,
}

fn validation(path: &str, message: impl fmt::Display) -> CliError {
    CliError::Validation(format!("{path}: {message}"))
}

fn missing(path: &str, hint: &str) -> CliError {
    CliError::Validation(format!("{path}: missing ({hint})"))
}

fn build_coeff(cfg: &CoeffConfig, path: &str) -> Result<CoefficientFunction, CliError> {
    let built = match cfg {
        CoeffConfig::Constant { c } => CoefficientFunction::constant(*c),
        CoeffConfig::PowerDecay { c, q } => CoefficientFunction::power_decay(*c, *q),
        CoeffConfig::ExponentialDecay { c, r } => CoefficientFunction::exponential_decay(*c, *r),
        CoeffConfig::Tabulated { knots, values } => {
            CoefficientFunction::tabulated(knots.clone(), values.clone())
        }
    };
    built.map_err(|e| validation(path, e))
}

fn build_majorant(cfg: &MajorantConfig, path: &str) -> Result<Majorant, CliError> {
    let built = match cfg {
        MajorantConfig::Exponential { lambda, b } => Majorant::exponential(*lambda, *b),
        MajorantConfig::Power { lambda, nu } => Majorant::power(*lambda, *nu),
    };
    built.map_err(|e| validation(path, e))
}

fn build_nonlinearity(cfg: &NonlinearityConfig, path: &str) -> Result<Nonlinearity, CliError> {
    let built = match cfg {
        NonlinearityConfig::PowerLaw { c0, p } => Nonlinearity::power_law(*c0, *p),
        NonlinearityConfig::Tabulated {
            t_knots,
            g_knots,
            values,
        } => Nonlinearity::tabulated(t_knots.clone(), g_knots.clone(), values.clone()),
    };
    built.map_err(|e| validation(path, e))
}

fn build_matrix(rows: &[Vec<f64>], path: &str) -> Result<SquareMatrix, CliError> {
    SquareMatrix::from_rows(rows.to_vec()).map_err(|e| validation(path, e))
}

fn build_constants(cfg: &ConstantsConfig) -> Result<ProblemConstants, CliError> {
    let p = cfg
        .p
        .ok_or_else(|| missing("constants.p", "the nonlinearity envelope power"))?;
    if !(p > 1.0) {
        return Err(validation("constants.p", format!("p must exceed 1, got {p}")));
    }
    let c0 = cfg
        .c0
        .ok_or_else(|| missing("constants.c0", "the nonlinearity envelope scale"))?;
    let constants = ProblemConstants {
        c0,
        p,
        k: cfg.k,
        c1: cfg.c1,
        q1: cfg.q1,
        c2: cfg.c2,
        q2: cfg.q2,
        epsilon: cfg.epsilon,
        nu: cfg.nu,
    };
    constants.validate().map_err(constants_error)?;
    Ok(constants)
}

/// Maps constant-validation failures back onto their field paths.
fn constants_error(e: SynthesisError) -> CliError {
    match e {
        SynthesisError::PowerNotSuperlinear(v) => {
            validation("constants.p", format!("p must exceed 1, got {v}"))
        }
        SynthesisError::NonPositive { name, value } => validation(
            &format!("constants.{name}"),
            format!("must be positive, got {value}"),
        ),
        SynthesisError::EpsilonOutOfRange { epsilon, limit } => validation(
            "constants.epsilon",
            format!("must lie strictly inside (0, {limit}), got {epsilon}"),
        ),
        SynthesisError::DissipationExponentTooLarge(v) => {
            validation("constants.q1", format!("must not exceed 1, got {v}"))
        }
        SynthesisError::MissingConstant(name) => {
            missing(&format!("constants.{name}"), "required by the regime")
        }
        SynthesisError::Family(e) => validation("constants", e),
    }
}

fn build_problem(cfg: &ProblemConfig) -> Result<EvolutionProblem, CliError> {
    let u0 = cfg
        .u0
        .clone()
        .ok_or_else(|| missing("problem.u0", "the initial state vector"))?;
    let operator = match cfg
        .operator
        .as_ref()
        .ok_or_else(|| missing("problem.operator", "the linear operator"))?
    {
        OperatorConfig::Constant { matrix } => OperatorFamily::Constant {
            matrix: build_matrix(matrix, "problem.operator.matrix")?,
        },
        OperatorConfig::Scaled { matrix, scale } => OperatorFamily::Scaled {
            base: build_matrix(matrix, "problem.operator.matrix")?,
            scale: build_coeff(scale, "problem.operator.scale")?,
        },
    };
    let nonlinear = match &cfg.nonlinear {
        None | Some(NonlinearConfig::Zero) => NonlinearTerm::Zero,
        Some(NonlinearConfig::NormPower { c0, p, direction }) => NonlinearTerm::NormPower {
            scale: *c0,
            power: *p,
            direction: match direction {
                Some(rows) => build_matrix(rows, "problem.nonlinear.direction")?,
                None => SquareMatrix::identity(u0.len()),
            },
        },
    };
    let forcing = match &cfg.forcing {
        None | Some(ForcingConfig::Zero) => Forcing::Zero,
        Some(ForcingConfig::Envelope {
            envelope,
            direction,
        }) => Forcing::Envelope {
            envelope: build_coeff(envelope, "problem.forcing.envelope")?,
            direction: direction.clone(),
        },
    };
    EvolutionProblem::new(operator, nonlinear, forcing, u0).map_err(|e| validation("problem", e))
}

fn broadcast(seq: &Option<SeqConfig>, n: usize, default: Option<f64>, path: &str) -> Result<Vec<f64>, CliError> {
    match seq {
        None => match default {
            Some(v) => Ok(vec![v; n]),
            None => Err(missing(path, "a scalar or a list")),
        },
        Some(SeqConfig::Scalar(v)) => Ok(vec![*v; n]),
        Some(SeqConfig::List(values)) => {
            if values.len() != n {
                Err(validation(
                    path,
                    format!("expected {n} entries, got {}", values.len()),
                ))
            } else {
                Ok(values.clone())
            }
        }
    }
}

fn build_discrete(
    cfg: &DiscreteConfig,
    alpha: Option<&Nonlinearity>,
) -> Result<DiscreteSetup, CliError> {
    let n_max = cfg
        .n_max
        .ok_or_else(|| missing("discrete.n_max", "the number of steps"))?;
    if n_max == 0 {
        return Err(validation("discrete.n_max", "must be at least 1"));
    }
    let g0 = cfg
        .g0
        .ok_or_else(|| missing("discrete.g0", "the initial value"))?;
    if !(g0 >= 0.0) {
        return Err(validation("discrete.g0", "must be nonnegative"));
    }
    let steps = broadcast(&cfg.h, n_max, None, "discrete.h")?;
    let dissipation = broadcast(&cfg.gamma, n_max, None, "discrete.gamma")?;
    let forcing = broadcast(&cfg.beta, n_max, Some(0.0), "discrete.beta")?;
    let majorant = match cfg
        .mu
        .as_ref()
        .ok_or_else(|| missing("discrete.mu", "a geometric spec or a list"))?
    {
        MuSeqConfig::Geometric { mu0, ratio } => {
            let mut out = Vec::with_capacity(n_max + 1);
            let mut value = *mu0;
            for _ in 0..=n_max {
                out.push(value);
                value *= ratio;
            }
            out
        }
        MuSeqConfig::List { values } => {
            if values.len() != n_max + 1 {
                return Err(validation(
                    "discrete.mu.values",
                    format!("expected {} entries, got {}", n_max + 1, values.len()),
                ));
            }
            values.clone()
        }
    };
    let time_scale = match cfg.time_scale.as_deref() {
        None | Some("index") => TimeScale::Index,
        Some("cumulative") => TimeScale::Cumulative,
        Some(other) => {
            return Err(validation(
                "discrete.time_scale",
                format!("expected \"index\" or \"cumulative\", got \"{other}\""),
            ))
        }
    };
    let nonlinearity = match alpha {
        Some(a) => a.clone(),
        // a zero power law encodes the linear recursion
        None => Nonlinearity::power_law(0.0, 2.0).expect("zero power law is valid"),
    };
    let scheme = DiscreteScheme::new(
        steps,
        dissipation,
        forcing,
        majorant,
        nonlinearity,
        time_scale,
    )
    .map_err(|e| validation("discrete", e))?;
    Ok(DiscreteSetup { scheme, g0 })
}

impl Scenario {
    /// The nonlinearity: declared in `families.alpha` or derived from the
    /// constants' envelope `c0 ||u||^p`.
    pub fn resolve_alpha(&self) -> Result<Nonlinearity, CliError> {
        if let Some(a) = &self.alpha {
            return Ok(a.clone());
        }
        if let Some(c) = &self.constants {
            return Nonlinearity::power_law(c.c0, c.p)
                .map_err(|e| validation("constants", e));
        }
        Err(missing(
            "families.alpha",
            "declare it or provide constants.c0 and constants.p",
        ))
    }

    /// The forcing envelope: declared, derived from `c2/(1+t)^q2`, or zero.
    pub fn resolve_beta(&self) -> Result<CoefficientFunction, CliError> {
        if let Some(b) = &self.beta {
            return Ok(b.clone());
        }
        if let Some(c) = &self.constants {
            if let (Some(c2), Some(q2)) = (c.c2, c.q2) {
                return CoefficientFunction::power_decay(c2, q2)
                    .map_err(|e| validation("constants", e));
            }
        }
        Ok(CoefficientFunction::zero())
    }

    /// The dissipation rate: declared, or derived from `k` or `c1/(1+t)^q1`.
    pub fn resolve_gamma(&self) -> Result<CoefficientFunction, CliError> {
        if let Some(g) = &self.gamma {
            return Ok(g.clone());
        }
        if let Some(c) = &self.constants {
            if let Some(k) = c.k {
                return CoefficientFunction::constant(k).map_err(|e| validation("constants.k", e));
            }
            if let (Some(c1), Some(q1)) = (c.c1, c.q1) {
                return CoefficientFunction::power_decay(c1, q1)
                    .map_err(|e| validation("constants", e));
            }
        }
        Err(missing(
            "families.gamma",
            "declare it or provide constants.k or constants.c1/constants.q1",
        ))
    }

    /// The majorant, when declared explicitly. Synthesis from the regime
    /// happens in the pipeline so the result can be reported.
    pub fn declared_mu(&self) -> Option<Majorant> {
        self.mu.clone()
    }

    /// A majorant must be declared or synthesizable for this scenario.
    fn require_mu_source(&self) -> Result<(), CliError> {
        if self.mu.is_some() {
            return Ok(());
        }
        if self.regime.is_some() && self.constants.is_some() {
            return Ok(());
        }
        Err(missing(
            "families.mu",
            "declare it or provide `regime` plus [constants] to synthesize one",
        ))
    }

    /// Initial scalar value: explicit `g0` or the norm of the initial state.
    pub fn resolve_g0(&self) -> Result<f64, CliError> {
        if let Some(g0) = self.g0 {
            if !(g0 >= 0.0) {
                return Err(validation("g0", "must be nonnegative"));
            }
            return Ok(g0);
        }
        if let Some(p) = &self.problem {
            return Ok(p.initial.iter().map(|v| v * v).sum::<f64>().sqrt());
        }
        Err(missing("g0", "set g0 or provide [problem] with u0"))
    }

    pub fn require_regime(&self) -> Result<Regime, CliError> {
        self.regime
            .ok_or_else(|| missing("regime", "one of exponential, power, forced"))
    }

    pub fn require_constants(&self) -> Result<&ProblemConstants, CliError> {
        self.constants
            .as_ref()
            .ok_or_else(|| missing("constants", "the [constants] section"))
    }

    pub fn require_problem(&self) -> Result<&EvolutionProblem, CliError> {
        self.problem
            .as_ref()
            .ok_or_else(|| missing("problem", "the [problem] section"))
    }

    pub fn require_discrete(&self) -> Result<&DiscreteSetup, CliError> {
        self.discrete
            .as_ref()
            .ok_or_else(|| missing("discrete", "the [discrete] section"))
    }

    /// Checks that everything the mode needs is present and resolvable.
    fn validate_for_mode(&self) -> Result<(), CliError> {
        match self.mode {
            Mode::Certify => {
                self.resolve_alpha()?;
                self.resolve_beta()?;
                self.resolve_gamma()?;
                self.require_mu_source()?;
                self.resolve_g0()?;
            }
            Mode::Simulate => {
                self.require_problem()?;
                self.require_mu_source()?;
            }
            Mode::Synthesize => {
                self.require_regime()?;
                self.require_constants()?;
            }
            Mode::Discrete => {
                self.require_discrete()?;
            }
            Mode::End2end => {
                self.require_problem()?;
                self.require_regime()?;
                self.require_constants()?;
            }
        }
        Ok(())
    }
}

/// Loads, converts and validates a scenario file.
pub fn load_scenario(
    path: &Path,
    expected_mode: Mode,
    overrides: &Overrides,
) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let raw: ScenarioFile =
        toml::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;

    let mode_str = raw
        .mode
        .as_deref()
        .ok_or_else(|| missing("mode", "one of certify, simulate, synthesize, discrete, end2end"))?;
    let mode = Mode::from_str(mode_str).ok_or_else(|| {
        validation(
            "mode",
            format!("unknown mode \"{mode_str}\" (expected certify, simulate, synthesize, discrete or end2end)"),
        )
    })?;
    if mode != expected_mode {
        return Err(validation(
            "mode",
            format!(
                "scenario declares \"{}\" but was invoked as \"{}\"",
                mode.name(),
                expected_mode.name()
            ),
        ));
    }

    let regime = match raw.regime.as_deref() {
        None => None,
        Some("exponential") => Some(Regime::Exponential),
        Some("power") => Some(Regime::Power),
        Some("forced") => Some(Regime::Forced),
        Some(other) => {
            return Err(validation(
                "regime",
                format!("unknown regime \"{other}\" (expected exponential, power or forced)"),
            ))
        }
    };

    let tol = overrides.tol.or(raw.tol).unwrap_or(majorant::DEFAULT_TOL);
    if !(tol >= 0.0) {
        return Err(validation("tol", "must be nonnegative"));
    }

    let t_end = overrides
        .t_end
        .or(raw.grid.as_ref().and_then(|g| g.t_end))
        .unwrap_or(majorant::grid::DEFAULT_T_END);
    let points = overrides
        .grid_points
        .or(raw.grid.as_ref().and_then(|g| g.points))
        .unwrap_or(majorant::grid::DEFAULT_POINTS);
    let grid = TimeGrid::geometric(t_end, points).map_err(|e| validation("grid", e))?;

    let constants = raw.constants.as_ref().map(build_constants).transpose()?;

    let (alpha, beta, gamma, mu) = match &raw.families {
        None => (None, None, None, None),
        Some(f) => (
            f.alpha
                .as_ref()
                .map(|a| build_nonlinearity(a, "families.alpha"))
                .transpose()?,
            f.beta
                .as_ref()
                .map(|b| build_coeff(b, "families.beta"))
                .transpose()?,
            f.gamma
                .as_ref()
                .map(|g| build_coeff(g, "families.gamma"))
                .transpose()?,
            f.mu
                .as_ref()
                .map(|m| build_majorant(m, "families.mu"))
                .transpose()?,
        ),
    };

    let problem = raw.problem.as_ref().map(build_problem).transpose()?;
    let discrete = raw
        .discrete
        .as_ref()
        .map(|d| build_discrete(d, alpha.as_ref()))
        .transpose()?;

    let name = raw.name.unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scenario".into())
    });

    let scenario = Scenario {
        name,
        mode,
        regime,
        g0: raw.g0,
        tol,
        output: raw.output.map(PathBuf::from),
        grid,
        constants,
        alpha,
        beta,
        gamma,
        mu,
        problem,
        discrete,
    };
    scenario.validate_for_mode()?;
    Ok(scenario)
}

//! Mode pipelines: each consumes a validated [`Scenario`], writes
//! `report.txt` plus the mode's CSV artifacts into the output directory,
//! and returns the pass/fail verdict.

use std::path::Path;

use majorant::simulator::BOUND_TOL;
use majorant::{
    bound_at, check_discrete_condition, check_majorant_condition, end_to_end_verify,
    evolve_extremal, integrate, integrating_factor, solve_comparison_ode, verify_bound,
    verify_discrete_bound, Certificate, ConditionCheck, ConditionId, DiscreteError, EngineError,
    Majorant, SimulatorError, Stage, SynthesisResult, TimeGrid,
};

use crate::config::{CliError, Mode, Scenario};
use crate::report::{csv, csv_num, fnum, Report};

/// Allowed relative excess of the comparison solution over `a(t)/mu(t)`.
const DOMINATION_RTOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
        }
    }

    fn of(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Runs the scenario's mode and writes its artifacts.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<Verdict, CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    match scenario.mode {
        Mode::Certify => run_certify(scenario, out_dir),
        Mode::Simulate => run_simulate(scenario, out_dir),
        Mode::Synthesize => run_synthesize(scenario, out_dir),
        Mode::Discrete => run_discrete(scenario, out_dir),
        Mode::End2end => run_end2end(scenario, out_dir),
    }
}

/// The majorant for certify/simulate runs: declared in the scenario, or
/// synthesized from the regime constants (reported either way).
fn obtain_majorant(
    scenario: &Scenario,
    u0_norm: Option<f64>,
) -> Result<(Majorant, Option<SynthesisResult>), CliError> {
    if let Some(mu) = scenario.declared_mu() {
        return Ok((mu, None));
    }
    let regime = scenario.require_regime()?;
    let constants = scenario.require_constants()?;
    let result = majorant::synthesize(regime, constants, u0_norm)
        .map_err(|e| CliError::Validation(format!("constants: {e}")))?;
    Ok((result.majorant.clone(), Some(result)))
}

fn synthesis_section(report: &mut Report, result: &SynthesisResult) {
    let c = &result.constants;
    let mut line = format!("lambda = {}", fnum(c.lambda));
    if let Some(b) = c.growth_rate {
        line.push_str(&format!(", b = {}", fnum(b)));
    }
    if let Some(nu) = c.exponent {
        line.push_str(&format!(", nu = {}", fnum(nu)));
    }
    if let Some(h) = c.h_min {
        line.push_str(&format!(", h_min = {}", fnum(h)));
    }
    report.line(line);
    report.line(format!(
        "initial radius 1/lambda = {}",
        fnum(result.initial_radius)
    ));
    report.line(format!("certified decay: {}", result.decay));
    for check in &result.checks {
        report.check(check);
    }
}

fn certificate_section(report: &mut Report, cert: &Certificate, grid: &TimeGrid) {
    let majorant_check = ConditionCheck {
        condition: ConditionId::MajorantCondition,
        lhs: -cert.min_slack(),
        rhs: 0.0,
        holds: cert.first_violation.is_none(),
    };
    report.line(format!(
        "{} {} on {} grid points: min slack {}{}  {}",
        ConditionId::MajorantCondition.id(),
        ConditionId::MajorantCondition.statement(),
        grid.len(),
        fnum(cert.min_slack()),
        match cert.first_violation {
            Some(t) => format!(", first violation at t = {}", fnum(t)),
            None => String::new(),
        },
        if majorant_check.holds { "PASS" } else { "FAIL" },
    ));
    report.line(format!(
        "{} mu(0) g(0) = {} <= 1{}  {}",
        ConditionId::InitialSmallness.id(),
        fnum(cert.initial_product),
        if cert.initial_ok && !cert.strict {
            " (borderline: non-strict bound)"
        } else {
            ""
        },
        if cert.initial_ok { "PASS" } else { "FAIL" },
    ));
    match &cert.reduction {
        Some(r) if cert.proven_all_t => {
            report.line(format!(
                "status: proven for all t >= 0 (reduction to t = 0 via {}: {} <= {})",
                r.condition.id(),
                fnum(r.lhs),
                fnum(r.rhs)
            ));
        }
        _ => {
            report.line("status: grid-verified, not proven for all t");
        }
    }
}

fn run_certify(scenario: &Scenario, out_dir: &Path) -> Result<Verdict, CliError> {
    let alpha = scenario.resolve_alpha()?;
    let beta = scenario.resolve_beta()?;
    let gamma = scenario.resolve_gamma()?;
    let g0 = scenario.resolve_g0()?;
    let (mu, synthesis) = obtain_majorant(scenario, Some(g0))?;

    let mut report = Report::new(&scenario.name, "certify");
    if let Some(result) = &synthesis {
        report.section("synthesis");
        synthesis_section(&mut report, result);
    }

    let cert = check_majorant_condition(&alpha, &beta, &gamma, &mu, g0, &scenario.grid, scenario.tol);
    report.section("certification");
    certificate_section(&mut report, &cert, &scenario.grid);

    // cross-check: integrate the comparison equation and confirm it stays
    // below a(t)/mu(t)
    report.section("comparison equation");
    let mut rows = Vec::new();
    let domination_ok;
    match solve_comparison_ode(&alpha, &beta, &gamma, g0, &scenario.grid) {
        Ok(solution) => {
            let mut worst_ratio = 0.0f64;
            for (&t, &w) in solution.times.iter().zip(&solution.values) {
                match integrating_factor(&gamma, t) {
                    Ok(a) => {
                        let eta = a / mu.eval(t);
                        worst_ratio = worst_ratio.max(w / eta);
                        rows.push(format!("{},{},{}", csv_num(t), csv_num(w), csv_num(eta)));
                    }
                    Err(e) => {
                        report.line(format!("integrating factor stopped at t = {}: {e}", fnum(t)));
                        break;
                    }
                }
            }
            domination_ok = worst_ratio <= 1.0 + DOMINATION_RTOL;
            report.line(format!(
                "{} {}: max w(t) mu(t)/a(t) = {}  {}",
                ConditionId::ComparisonDomination.id(),
                ConditionId::ComparisonDomination.statement(),
                fnum(worst_ratio),
                if domination_ok { "PASS" } else { "FAIL" },
            ));
            if cert.feasible && !domination_ok {
                report.line(
                    "warning: a feasible certificate cannot be escaped by the comparison \
                     solution; this indicates an engine bug",
                );
            }
        }
        Err(EngineError::BlowUp { t }) => {
            domination_ok = false;
            report.line(format!("comparison solution blows up at t = {}", fnum(t)));
            if cert.feasible {
                report.line(
                    "warning: blow-up under a feasible certificate indicates an engine bug",
                );
            }
        }
        Err(e) => {
            domination_ok = false;
            report.line(format!("comparison solve failed: {e}"));
        }
    }
    write_file(out_dir, "comparison.csv", &csv("t,w,a_over_mu", rows))?;

    if mu.grows_unbounded() {
        report.line("note: mu grows without bound, so the certified trajectory decays to zero");
    }

    let pass = cert.feasible && domination_ok;
    write_file(out_dir, "report.txt", &report.finish(pass))?;
    Ok(Verdict::of(pass))
}

fn run_simulate(scenario: &Scenario, out_dir: &Path) -> Result<Verdict, CliError> {
    let problem = scenario.require_problem()?;
    let g0 = scenario.resolve_g0()?;
    let (mu, synthesis) = obtain_majorant(scenario, Some(g0))?;

    let mut report = Report::new(&scenario.name, "simulate");
    if let Some(result) = &synthesis {
        report.section("synthesis");
        synthesis_section(&mut report, result);
    }

    report.section("integration");
    report.line(format!(
        "grid: {} points on [0, {}]",
        scenario.grid.len(),
        fnum(scenario.grid.t_end())
    ));
    let trajectory = match integrate(problem, &scenario.grid) {
        Ok(t) => t,
        Err(SimulatorError::BlowUp { t }) => {
            report.line(format!("trajectory blows up at t = {}", fnum(t)));
            write_file(out_dir, "report.txt", &report.finish(false))?;
            return Ok(Verdict::Fail);
        }
        Err(e) => {
            report.line(format!("integration failed: {e}"));
            write_file(out_dir, "report.txt", &report.finish(false))?;
            return Ok(Verdict::Fail);
        }
    };
    report.line(format!("rhs evaluations: {}", trajectory.stats.rhs_evaluations));

    let bound_report = verify_bound(&trajectory.times, &trajectory.norms, &mu, BOUND_TOL);
    report.section("bound verification");
    report.line(format!(
        "{} {}: max ratio g(t) mu(t) = {}, min margin = {}, violations = {}  {}",
        ConditionId::NormBound.id(),
        ConditionId::NormBound.statement(),
        fnum(bound_report.max_ratio),
        fnum(bound_report.min_margin),
        bound_report.violations.len(),
        if bound_report.ok() { "PASS" } else { "FAIL" },
    ));
    if let Some(v) = bound_report.violations.first() {
        report.line(format!(
            "first violation at t = {}: g = {}, bound = {}",
            fnum(v.t),
            fnum(v.value),
            fnum(v.bound)
        ));
    }
    if bound_report.decays_to_zero {
        report.line("note: mu grows without bound, so the certified trajectory decays to zero");
    }

    let rows = trajectory
        .times
        .iter()
        .zip(&trajectory.norms)
        .map(|(&t, &g)| {
            let b = bound_at(&mu, t);
            format!(
                "{},{},{},{}",
                csv_num(t),
                csv_num(g),
                csv_num(b),
                csv_num(b - g)
            )
        })
        .collect::<Vec<_>>();
    write_file(out_dir, "trajectory.csv", &csv("t,g,bound,slack", rows))?;

    let pass = bound_report.ok();
    write_file(out_dir, "report.txt", &report.finish(pass))?;
    Ok(Verdict::of(pass))
}

fn run_synthesize(scenario: &Scenario, out_dir: &Path) -> Result<Verdict, CliError> {
    let regime = scenario.require_regime()?;
    let constants = scenario.require_constants()?;
    let u0_norm = scenario.resolve_g0().ok();
    let result = majorant::synthesize(regime, constants, u0_norm)
        .map_err(|e| CliError::Validation(format!("constants: {e}")))?;

    let mut report = Report::new(
        &scenario.name,
        &format!("synthesize ({} regime)", regime.name()),
    );
    report.section("synthesis");
    synthesis_section(&mut report, &result);
    if !result.feasible {
        for check in result.violated() {
            report.line(format!(
                "infeasible: {} {} is violated",
                check.condition.id(),
                check.condition.statement()
            ));
        }
    }

    let rows = scenario
        .grid
        .points()
        .iter()
        .map(|&t| format!("{},{}", csv_num(t), csv_num(bound_at(&result.majorant, t))))
        .collect::<Vec<_>>();
    write_file(out_dir, "bound.csv", &csv("t,bound", rows))?;
    let pass = result.feasible;
    write_file(out_dir, "report.txt", &report.finish(pass))?;
    Ok(Verdict::of(pass))
}

fn run_discrete(scenario: &Scenario, out_dir: &Path) -> Result<Verdict, CliError> {
    let setup = scenario.require_discrete()?;
    let scheme = &setup.scheme;
    let cert = check_discrete_condition(scheme, setup.g0, scenario.tol);

    let mut report = Report::new(&scenario.name, "discrete");
    report.section("feasibility");
    let worst = cert.slack.iter().copied().fold(f64::INFINITY, f64::min);
    report.line(format!(
        "{} {} over {} steps: min slack {}{}  {}",
        ConditionId::DiscreteCondition.id(),
        ConditionId::DiscreteCondition.statement(),
        scheme.n_max(),
        fnum(worst),
        match cert.first_violation {
            Some(n) => format!(", first violation at n = {n}"),
            None => String::new(),
        },
        if cert.condition_ok { "PASS" } else { "FAIL" },
    ));
    report.line(format!(
        "{} g_0 = {} <= 1/mu_0 = {}  {}",
        ConditionId::DiscreteInitial.id(),
        fnum(setup.g0),
        fnum(1.0 / scheme.majorant()[0]),
        if cert.initial_ok { "PASS" } else { "FAIL" },
    ));

    report.section("extremal recursion");
    let mut rows = Vec::new();
    let mut bound_ok = cert.feasible;
    match evolve_extremal(scheme, setup.g0) {
        Ok(seq) => {
            for (n, &g) in seq.iter().enumerate() {
                rows.push(format!(
                    "{n},{},{}",
                    csv_num(g),
                    csv_num(1.0 / scheme.majorant()[n])
                ));
            }
            if cert.feasible {
                match verify_discrete_bound(scheme, setup.g0, scenario.tol) {
                    Ok(bounds) => {
                        report.line(format!(
                            "{} {}: max ratio g_n mu_n = {}, min margin = {}  PASS",
                            ConditionId::DiscreteBound.id(),
                            ConditionId::DiscreteBound.statement(),
                            fnum(bounds.max_ratio),
                            fnum(bounds.min_margin),
                        ));
                    }
                    Err(e @ DiscreteError::InternalInconsistency { .. }) => {
                        bound_ok = false;
                        report.line(format!(
                            "{} FAIL: {e}",
                            ConditionId::DiscreteBound.id()
                        ));
                    }
                    Err(e) => {
                        bound_ok = false;
                        report.line(format!("bound verification failed: {e}"));
                    }
                }
            } else {
                report.line("scheme is infeasible; no bound is claimed");
            }
        }
        Err(e) => {
            bound_ok = false;
            report.line(format!("extremal recursion stopped: {e}"));
        }
    }
    write_file(out_dir, "discrete.csv", &csv("n,g,bound", rows))?;

    let pass = cert.feasible && bound_ok;
    write_file(out_dir, "report.txt", &report.finish(pass))?;
    Ok(Verdict::of(pass))
}

fn run_end2end(scenario: &Scenario, out_dir: &Path) -> Result<Verdict, CliError> {
    let problem = scenario.require_problem()?;
    let regime = scenario.require_regime()?;
    let constants = scenario.require_constants()?;

    let outcome = end_to_end_verify(problem, regime, constants, &scenario.grid)
        .map_err(|e| CliError::Validation(format!("problem/constants: {e}")))?;

    let mut report = Report::new(
        &scenario.name,
        &format!("end2end ({} regime)", regime.name()),
    );

    report.section("precheck");
    report.check(&outcome.precheck.margin_check);
    if let Some(env) = &outcome.precheck.envelope {
        report.line(format!(
            "{} {}: max ratio {} over {} samples  {}",
            ConditionId::NonlinearEnvelope.id(),
            ConditionId::NonlinearEnvelope.statement(),
            fnum(env.max_ratio),
            env.samples,
            if env.ok() { "PASS" } else { "FAIL" },
        ));
    }
    if let Some(check) = &outcome.precheck.forcing_check {
        report.check(check);
    }

    if let Some(synthesis) = &outcome.synthesis {
        report.section("synthesis");
        synthesis_section(&mut report, synthesis);
        if let Some(radius) = &outcome.radius_check {
            report.check(radius);
        }
    }

    if let Some(cert) = &outcome.certificate {
        report.section("certification");
        certificate_section(&mut report, cert, &scenario.grid);
    }

    if let Some(t) = outcome.blow_up {
        report.section("integration");
        report.line(format!("trajectory blows up at t = {}", fnum(t)));
    }
    if let Some(trajectory) = &outcome.trajectory {
        report.section("integration");
        report.line(format!(
            "grid: {} points on [0, {}]",
            scenario.grid.len(),
            fnum(scenario.grid.t_end())
        ));
        report.line(format!(
            "rhs evaluations: {}",
            trajectory.stats.rhs_evaluations
        ));
    }

    if let Some(bounds) = &outcome.bound_report {
        report.section("bound verification");
        report.line(format!(
            "{} {}: max ratio g(t) mu(t) = {}, min margin = {}, violations = {}  {}",
            ConditionId::NormBound.id(),
            ConditionId::NormBound.statement(),
            fnum(bounds.max_ratio),
            fnum(bounds.min_margin),
            bounds.violations.len(),
            if bounds.ok() { "PASS" } else { "FAIL" },
        ));
        if bounds.decays_to_zero {
            report.line("note: mu grows without bound, so the certified trajectory decays to zero");
        }
    }

    if let (Some(trajectory), Some(synthesis)) = (&outcome.trajectory, &outcome.synthesis) {
        let rows = trajectory
            .times
            .iter()
            .zip(&trajectory.norms)
            .map(|(&t, &g)| {
                let b = bound_at(&synthesis.majorant, t);
                format!(
                    "{},{},{},{}",
                    csv_num(t),
                    csv_num(g),
                    csv_num(b),
                    csv_num(b - g)
                )
            })
            .collect::<Vec<_>>();
        write_file(out_dir, "trajectory.csv", &csv("t,g,bound,slack", rows))?;
    }

    if let Some(stage) = outcome.failed_stage {
        report.section("outcome");
        report.line(format!("failed stage: {}", stage.name()));
        if stage == Stage::Synthesis {
            if let Some(synthesis) = &outcome.synthesis {
                for check in synthesis.violated() {
                    report.line(format!(
                        "infeasible: {} {} is violated",
                        check.condition.id(),
                        check.condition.statement()
                    ));
                }
            }
        }
    }

    write_file(out_dir, "report.txt", &report.finish(outcome.pass))?;
    Ok(Verdict::of(outcome.pass))
}

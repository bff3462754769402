//! Catalog of the numbered inequalities the engines check.
//!
//! Every verdict a report emits points back at one of these conditions, so
//! a failed run names exactly which inequality broke. The identifiers form
//! the project's stable condition-numbering scheme; the full statements are
//! reproduced in the README catalog.

use std::fmt;

/// Identifier of a checked inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConditionId {
    /// Re(A(t)u, u) <= -gamma(t) ||u||^2
    Dissipativity,
    /// ||F(t, u)|| <= c0 ||u||^p
    NonlinearEnvelope,
    /// ||b(t)|| <= beta(t)
    ForcingEnvelope,
    /// alpha(t, 1/mu) + beta <= (1/mu)(gamma - mu'/mu) for all t >= 0
    MajorantCondition,
    /// mu(0) g(0) < 1 (or <= 1 for the non-strict variant)
    InitialSmallness,
    /// 0 <= g(t) <= 1/mu(t)
    NormBound,
    /// 0 <= w(t) <= a(t)/mu(t) for the comparison solution
    ComparisonDomination,
    /// alpha(n, 1/mu_n) + beta_n <= (1/mu_n)(gamma_n - (mu_{n+1}-mu_n)/(h_n mu_n))
    DiscreteCondition,
    /// g_0 <= 1/mu_0
    DiscreteInitial,
    /// 0 <= g_n <= 1/mu_n
    DiscreteBound,
    /// c0/lambda^(p-1) + b <= k (constant-dissipation rate budget)
    ExponentialRate,
    /// lambda >= (c0/epsilon)^(1/(p-1))
    LambdaFloor,
    /// ||u0|| <= 1/lambda
    InitialRadius,
    /// q1 <= 1 and (p-1) nu >= q1 (power-rate exponent split)
    PowerRateSplit,
    /// c0/lambda^(p-1) + nu <= c1 (power-dissipation rate budget)
    PowerRate,
    /// q1 <= min(1, q2 - nu, nu (p-1)) (forced exponent ordering)
    ForcedExponents,
    /// c0/lambda^(p-1) + lambda c2 + nu <= c1 at the chosen lambda
    ForcedRate,
    /// lambda0 = ((p-1) c0 / c2)^(1/p) minimizes c0/lambda^(p-1) + lambda c2
    OptimalLambda,
    /// h_min + nu <= c1 (forced rate budget at the optimal lambda)
    ForcedBudget,
    /// ||u0|| <= 1/lambda0
    ForcedRadius,
}

impl ConditionId {
    /// Catalog identifier, e.g. `Eq. (9)`. Reports cite these.
    pub fn id(self) -> &'static str {
        match self {
            ConditionId::Dissipativity => "Eq. (3)",
            ConditionId::NonlinearEnvelope => "Eq. (4)",
            ConditionId::ForcingEnvelope => "Eq. (5)",
            ConditionId::MajorantCondition => "Eq. (9)",
            ConditionId::InitialSmallness => "Eq. (10)",
            ConditionId::NormBound => "Eq. (11)",
            ConditionId::ComparisonDomination => "Eq. (20)",
            ConditionId::DiscreteCondition => "Eq. (22)",
            ConditionId::DiscreteInitial => "Eq. (23)",
            ConditionId::DiscreteBound => "Eq. (24)",
            ConditionId::ExponentialRate => "Eq. (29)",
            ConditionId::LambdaFloor => "Eq. (30)",
            ConditionId::InitialRadius => "Eq. (31)",
            ConditionId::PowerRateSplit => "Eq. (37)",
            ConditionId::PowerRate => "Eq. (38)",
            ConditionId::ForcedExponents => "Eq. (42)",
            ConditionId::ForcedRate => "Eq. (47)",
            ConditionId::OptimalLambda => "Eq. (49)",
            ConditionId::ForcedBudget => "Eq. (50)",
            ConditionId::ForcedRadius => "Eq. (51)",
        }
    }

    /// Human-readable statement of the condition.
    pub fn statement(self) -> &'static str {
        match self {
            ConditionId::Dissipativity => "Re(A(t)u, u) <= -gamma(t) ||u||^2",
            ConditionId::NonlinearEnvelope => "||F(t, u)|| <= c0 ||u||^p",
            ConditionId::ForcingEnvelope => "||b(t)|| <= beta(t)",
            ConditionId::MajorantCondition => {
                "alpha(t, 1/mu) + beta <= (1/mu)(gamma - mu'/mu), all t >= 0"
            }
            ConditionId::InitialSmallness => "mu(0) g(0) <= 1",
            ConditionId::NormBound => "g(t) <= 1/mu(t)",
            ConditionId::ComparisonDomination => "w(t) <= a(t)/mu(t)",
            ConditionId::DiscreteCondition => {
                "alpha(n, 1/mu_n) + beta_n <= (1/mu_n)(gamma_n - (mu_{n+1}-mu_n)/(h_n mu_n))"
            }
            ConditionId::DiscreteInitial => "g_0 <= 1/mu_0",
            ConditionId::DiscreteBound => "g_n <= 1/mu_n",
            ConditionId::ExponentialRate => "c0/lambda^(p-1) + b <= k",
            ConditionId::LambdaFloor => "lambda >= (c0/epsilon)^(1/(p-1))",
            ConditionId::InitialRadius => "||u0|| <= 1/lambda",
            ConditionId::PowerRateSplit => "q1 <= 1 and (p-1) nu >= q1",
            ConditionId::PowerRate => "c0/lambda^(p-1) + nu <= c1",
            ConditionId::ForcedExponents => "q1 <= min(1, q2 - nu, nu (p-1))",
            ConditionId::ForcedRate => "c0/lambda^(p-1) + lambda c2 + nu <= c1",
            ConditionId::OptimalLambda => "lambda0 = ((p-1) c0 / c2)^(1/p)",
            ConditionId::ForcedBudget => "h_min + nu <= c1",
            ConditionId::ForcedRadius => "||u0|| <= 1/lambda0",
        }
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// One checked instance of a cataloged inequality: `lhs <= rhs`.
#[derive(Debug, Clone)]
pub struct ConditionCheck {
    pub condition: ConditionId,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl ConditionCheck {
    /// Checks `lhs <= rhs + tol` and records the outcome.
    pub fn le(condition: ConditionId, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self {
            condition,
            lhs,
            rhs,
            holds: lhs <= rhs + tol,
        }
    }

    /// `rhs - lhs`; nonnegative when the condition holds exactly.
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

impl fmt::Display for ConditionCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {:e} <= {:e} ({})",
            self.condition.id(),
            self.condition.statement(),
            self.lhs,
            self.rhs,
            if self.holds { "holds" } else { "VIOLATED" }
        )
    }
}

#pragma once

#include "divdraw/errors.hpp"

namespace divdraw {

/// Which solution branch a parameter set routes to. The two endpoint
/// values of alpha are accepted but handled by closed forms, since the
/// free-boundary system degenerates there.
enum class AlphaBranch {
    Interior,   ///< 0 < alpha < 1, main solver
    Merton,     ///< alpha == 0, unconstrained limit
    Ratcheting, ///< alpha == 1, never-decrease limit
};

/// Raw market/preference primitives.
///
/// mu and sigma describe the excess-return diffusion, delta is the
/// subjective discount rate, alpha the drawdown fraction, and p the
/// shareholders' relative risk aversion.
struct ModelParams {
    double mu = 0.08;
    double sigma = 0.2;
    double delta = 0.2;
    double alpha = 0.5;
    double p = 0.8;
};

/// ModelParams plus the derived constants every module needs.
/// kappa = 2 sigma^2 / mu^2; feasibility requires 1/(1+kappa*delta) < p < 1.
struct ValidatedParams {
    ModelParams base;
    double kappa = 0.0;   ///< 2 sigma^2 / mu^2
    double kd = 0.0;      ///< kappa * delta
    double p_lower = 0.0; ///< 1 / (1 + kappa * delta)
    AlphaBranch branch = AlphaBranch::Interior;

    double mu() const { return base.mu; }
    double sigma() const { return base.sigma; }
    double sigma2() const { return base.sigma * base.sigma; }
    double delta() const { return base.delta; }
    double alpha() const { return base.alpha; }
    double p() const { return base.p; }
    /// p*(1 + kappa*delta) - 1, positive on the feasible set. Shows up in
    /// nearly every closed form, so it gets a name.
    double q() const { return base.p * (1.0 + kd) - 1.0; }
};

/// Checks feasibility and fills in the derived constants.
///
/// Strict inequalities, no tolerance slack: the feasible set is an open
/// interval and its boundary is genuinely ill-posed. alpha == 0 and
/// alpha == 1 are accepted but tagged for the limit branches.
///
/// Throws NonPositiveParam, AlphaOutOfRange, or RiskAversionInfeasible.
ValidatedParams validate(const ModelParams& params);

} // namespace divdraw

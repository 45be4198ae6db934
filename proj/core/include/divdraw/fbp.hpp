#pragma once

#include "divdraw/model.hpp"

namespace divdraw {

/// Solution of the free-boundary system for one parameter set.
///
/// (eta_star, y_star) solve the two-equation nonlinear system; y0, the six
/// integration constants and the three critical surplus-to-peak ratios
/// follow from closed forms. resid1/resid2 are the raw residuals of the
/// two equations at the accepted root.
struct FreeBoundarySolution {
    double eta_star = 0.0; ///< > 1/(1-p)
    double y_star = 0.0;   ///< in (0,1)
    double y0 = 0.0;       ///< eta_star * alpha^{-p}
    double c1 = 0.0;
    double c2 = 0.0; ///< > 0
    double c3 = 0.0;
    double c4 = 0.0; ///< < 0
    double c5 = 0.0;
    double c6 = 0.0;       ///< > 0
    double w_alpha = 0.0;  ///< pay the floor rate alpha*z below this ratio
    double w_one = 0.0;    ///< pay the peak rate z above this ratio
    double w_star = 0.0;   ///< reflecting boundary; x <= w_star * z
    double resid1 = 0.0;
    double resid2 = 0.0;
};

/// Bracket/tolerance knobs; the defaults satisfy the documented contracts.
/// Exposed mainly so tests can perturb the starting brackets and confirm
/// the root is unique.
struct SolveOptions {
    double outer_lo = 1e-12;     ///< lower end of the y search interval
    double outer_hi = 1.0 - 1e-12;
    double bracket_tol = 1e-13;  ///< bisection width for both loops
    double residual_tol = 1e-10; ///< acceptance threshold on the system residuals
    double inner_log_eta_hi = 0.0; ///< initial upper bracket for ln(eta); 0 = auto
};

/// First equation of the system as a residual in (eta, y):
///   ln(eta^alpha / y) + alpha/(eta(1-p)) - 1/y - (alpha(1+p) - 1).
/// Strictly increasing in eta on (1/(1-p), inf).
double eta_equation(double eta, double y, const ValidatedParams& vp);

/// Second equation of the system as a raw residual in (eta, y).
double system_equation2(double eta, double y, const ValidatedParams& vp);

/// Solves the first equation for ln(eta) given y in (0,1).
///
/// Bisection runs in log space: for small y the root eta grows like
/// exp((1/y + ln y + alpha(1+p) - 1)/alpha) and overflows double long
/// before the equation itself degenerates. Throws BracketNotFound when no
/// sign change exists above ln(1/(1-p)) (that happens for y past the point
/// y_p where the curve dips below 1/(1-p)).
double solve_log_eta_given_y(double y, const ValidatedParams& vp,
                             const SolveOptions& opt = {});

/// exp(solve_log_eta_given_y(y)); +inf when the root is not representable.
double solve_eta_given_y(double y, const ValidatedParams& vp,
                         const SolveOptions& opt = {});

/// Solves the full system; returns (eta_star, y_star).
///
/// Outer bisection in y on the second-equation residual with eta = eta(y)
/// substituted. Both curves are strictly monotone on the relevant branch,
/// so a bracketed bisection is globally convergent. Past y_p the inner
/// solve has no root (counted as negative sign); where eta(y) is too large
/// to evaluate the second equation the sign is positive. Throws NoRoot
/// with a residual profile when the interval carries no sign change.
struct SystemRoot {
    double eta_star;
    double y_star;
    double resid1;
    double resid2;
};
SystemRoot solve_system(const ValidatedParams& vp, const SolveOptions& opt = {});

/// Integration constants C1..C6 from the primary closed forms,
/// cross-checked against the y_star forms of C3..C6 (<= 1e-8 relative).
/// Throws ConstantMismatch when a pair disagrees.
struct Constants {
    double c1, c2, c3, c4, c5, c6;
};
Constants compute_constants(const ValidatedParams& vp, double eta_star, double y_star);

/// The three critical ratios (w_alpha, w_one, w_star); enforces the
/// ordering 0 < w_alpha < w_one < w_star (OrderingViolation otherwise).
struct Boundaries {
    double w_alpha, w_one, w_star;
};
Boundaries compute_boundaries(const ValidatedParams& vp, double eta_star, double y_star);

/// One-shot: system root + constants + boundaries, sign checks included.
/// For alpha == 1 this is exactly the ratcheting branch (the system is
/// regular there); alpha == 0 has no free boundary and is rejected.
FreeBoundarySolution solve_free_boundary(const ValidatedParams& vp,
                                         const SolveOptions& opt = {});

/// Diagnostic: the point y_p at which the first-equation curve reaches
/// eta = 1/(1-p). Not part of the solution surface.
double find_y_p(const ValidatedParams& vp);

} // namespace divdraw

#pragma once

#include "divdraw/dual.hpp"
#include "divdraw/fbp.hpp"
#include "divdraw/model.hpp"

namespace divdraw {

/// A point of the (surplus, historical peak dividend rate) state space.
/// z = 0 is rejected: the model requires a strictly positive financial past.
struct StatePoint {
    double x = 0.0; ///< surplus, >= 0
    double z = 1.0; ///< historical peak excess dividend rate, > 0
};

/// State regions by optimal behavior. A: pay the floor alpha*z. B: interior
/// rate in (alpha*z, z). C: pay the peak z. EBoundary: the reflecting line
/// x = w_star*z. DAbove: x > w_star*z, the rate jumps to x/w_star.
enum class StateRegion { A, B, C, EBoundary, DAbove };

const char* to_string(StateRegion r);

/// Value and feedback controls at one state.
struct PolicyEval {
    StateRegion region = StateRegion::A;
    double y = 0.0; ///< dual point; NaN above the domain
    double value = 0.0;
    double pi = 0.0;
    double c = 0.0;
};

/// Merton (alpha -> 0) closed-form solution: V0(x) = value_coeff *
/// x^{1-p}/(1-p), investment pi = pi_slope * x, dividend c = c_slope * x.
struct MertonSolution {
    double value_coeff = 0.0;
    double pi_slope = 0.0;
    double c_slope = 0.0;
};

void require_valid_state(const StatePoint& s);

/// Region label from the thresholds w_alpha*z, w_one*z, w_star*z.
/// Points within 4 ulp of the reflecting line are labelled EBoundary.
StateRegion classify(const StatePoint& s, const FreeBoundarySolution& fb);

/// V(x, z). Inside the domain this is z^{1-p} * (Uhat(y) - y*Uhat_y(y))
/// with y = invert_dual(x/z); above it the power closed form applies.
double value(const StatePoint& s, const FreeBoundarySolution& fb, const ValidatedParams& vp);

/// Optimal investment pi*(x, z) = (mu/sigma^2) z y Uhat_yy(y) inside the
/// domain; linear in x with the Merton slope mu/(sigma^2 p) above it.
double pi_star(const StatePoint& s, const FreeBoundarySolution& fb, const ValidatedParams& vp);

/// Optimal excess dividend rate c*(x, z).
double c_star(const StatePoint& s, const FreeBoundarySolution& fb, const ValidatedParams& vp);

/// All of the above in one dual inversion.
PolicyEval evaluate(const StatePoint& s, const FreeBoundarySolution& fb,
                    const ValidatedParams& vp);

/// Closed forms of the unconstrained limit.
MertonSolution merton_limit(const ValidatedParams& vp);

/// The alpha = 1 branch: the free-boundary system solved at alpha = 1,
/// where the intermediate band is empty (w_alpha = w_one) and c* = z on
/// the whole domain. Usable with every evaluation function above.
FreeBoundarySolution ratcheting_limit(const ValidatedParams& vp);

/// Piecewise closed form of V on the domain, written directly in (y, z).
/// Cross-check for value(), not the primary path.
double value_explicit(const StatePoint& s, const FreeBoundarySolution& fb,
                      const ValidatedParams& vp);

/// Per-region explicit formulas for pi*. Cross-check for pi_star().
double pi_star_explicit(const StatePoint& s, const FreeBoundarySolution& fb,
                        const ValidatedParams& vp);

} // namespace divdraw

#pragma once

#include "divdraw/fbp.hpp"
#include "divdraw/model.hpp"

namespace divdraw {

/// The three pieces of the dual function's domain [y_star, y0].
enum class DualRegion {
    Low,  ///< alpha^{-p} <= y <= y0   (primal: floor dividend rate)
    Mid,  ///< 1 < y < alpha^{-p}      (primal: interior rate)
    High, ///< y_star <= y <= 1        (primal: peak rate)
};

const char* to_string(DualRegion r);

/// Value and first two derivatives of the dual function at one point.
/// uhat_y < 0 and uhat_yy > 0 on the open interval (strictly decreasing,
/// strictly convex).
struct DualEval {
    double y = 0.0;
    double uhat = 0.0;
    double uhat_y = 0.0;
    double uhat_yy = 0.0;
    DualRegion region = DualRegion::High;
};

/// Piecewise-analytic evaluation of (Uhat, Uhat_y, Uhat_yy), term by term
/// from the closed form. Accepts y in [y_star, y0] with 1e-12 slack at the
/// endpoints; boundary points y = 1 and y = alpha^{-p} evaluate under the
/// region whose closed interval contains them (Low / High); the C1
/// matching that fixed C3..C6 makes the choice immaterial.
DualEval eval_dual(double y, const FreeBoundarySolution& fb, const ValidatedParams& vp);

/// Third derivative; used by the policy shape checks and the simulator's
/// table construction.
double eval_dual_yyy(double y, const FreeBoundarySolution& fb, const ValidatedParams& vp);

/// Inverts the Legendre slope map: returns the y in [y_star, y0] with
/// -Uhat_y(y) = w. Bisection on the strictly monotone slope; 200-iteration
/// cap. w = 0 maps to y0, w = w_star maps to y_star. Throws
/// OutOfPrimalRange for w < 0 or w > w_star*(1+1e-9).
double invert_dual(double w, const FreeBoundarySolution& fb, const ValidatedParams& vp);

/// U(w) = Uhat(y) - y*Uhat_y(y) at y = invert_dual(w): the concave
/// Legendre transform back to the primal ratio variable.
double legendre_value(double w, const FreeBoundarySolution& fb, const ValidatedParams& vp);

/// Closed-form w = -Uhat_y(y) per dual region (the explicit inversion
/// identities). Cross-check for invert_dual, not the primary path.
double primal_ratio_explicit(double y, const FreeBoundarySolution& fb, const ValidatedParams& vp);

} // namespace divdraw

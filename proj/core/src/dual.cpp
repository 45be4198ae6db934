#include "divdraw/dual.hpp"

#include <cmath>
#include <sstream>

namespace divdraw {

namespace {

// Coefficient of the y^{-(1-p)/p} particular term in the mid region.
double mid_coeff(const ValidatedParams& vp) {
    const double p = vp.p();
    return vp.kappa / (1.0 - p) * p * p * p / vp.q();
}

DualRegion region_of(double y, double alpha_mp) {
    if (y >= alpha_mp) return DualRegion::Low;
    if (y > 1.0) return DualRegion::Mid;
    return DualRegion::High;
}

} // namespace

const char* to_string(DualRegion r) {
    switch (r) {
        case DualRegion::Low: return "LOW";
        case DualRegion::Mid: return "MID";
        case DualRegion::High: return "HIGH";
    }
    return "?";
}

DualEval eval_dual(double y, const FreeBoundarySolution& fb, const ValidatedParams& vp) {
    const double slack = 1e-12;
    if (!(y >= fb.y_star * (1.0 - slack)) || !(y <= fb.y0 * (1.0 + slack))) {
        std::ostringstream os;
        os << "dual point y=" << y << " outside [y*, y0] = [" << fb.y_star << ", " << fb.y0
           << "]";
        throw OutOfDualRange(os.str());
    }
    y = std::min(std::max(y, fb.y_star), fb.y0);

    const double al = vp.alpha();
    const double p = vp.p();
    const double del = vp.delta();
    const double kap = vp.kappa;
    const double kd = vp.kd;
    const double B = 1.0 + kd;
    const double alpha_mp = std::pow(al, -p);
    const double log_y = std::log(y);
    const double y_mkd = std::pow(y, -kd);

    DualEval e;
    e.y = y;
    e.region = region_of(y, alpha_mp);
    switch (e.region) {
        case DualRegion::Low: {
            const double slope = kap * al / B;
            e.uhat = fb.c1 * y + fb.c2 * y_mkd + slope * y * log_y +
                     std::pow(al, 1.0 - p) / (del * (1.0 - p));
            e.uhat_y = fb.c1 - kd * fb.c2 * y_mkd / y + slope * (log_y + 1.0);
            e.uhat_yy = kd * B * fb.c2 * y_mkd / (y * y) + slope / y;
            break;
        }
        case DualRegion::Mid: {
            const double a = mid_coeff(vp);
            const double y_m1p = std::pow(y, -1.0 / p); // y^{-1/p}
            e.uhat = fb.c3 * y + fb.c4 * y_mkd + a * y_m1p * y;
            e.uhat_y = fb.c3 - kd * fb.c4 * y_mkd / y - (1.0 - p) / p * a * y_m1p;
            e.uhat_yy = kd * B * fb.c4 * y_mkd / (y * y) +
                        (1.0 - p) / (p * p) * a * y_m1p / y;
            break;
        }
        case DualRegion::High: {
            const double slope = kap / B;
            e.uhat = fb.c5 * y + fb.c6 * y_mkd + slope * y * log_y + 1.0 / (del * (1.0 - p));
            e.uhat_y = fb.c5 - kd * fb.c6 * y_mkd / y + slope * (log_y + 1.0);
            e.uhat_yy = kd * B * fb.c6 * y_mkd / (y * y) + slope / y;
            break;
        }
    }
    return e;
}

double eval_dual_yyy(double y, const FreeBoundarySolution& fb, const ValidatedParams& vp) {
    const double al = vp.alpha();
    const double p = vp.p();
    const double kap = vp.kappa;
    const double kd = vp.kd;
    const double B = 1.0 + kd;
    const double y_mkd3 = std::pow(y, -kd - 3.0);
    switch (region_of(y, std::pow(al, -p))) {
        case DualRegion::Low:
            return -kd * B * (kd + 2.0) * fb.c2 * y_mkd3 - kap * al / B / (y * y);
        case DualRegion::Mid:
            return -kd * B * (kd + 2.0) * fb.c4 * y_mkd3 -
                   (1.0 - p) / (p * p) * (1.0 / p + 1.0) * mid_coeff(vp) *
                       std::pow(y, -1.0 / p - 2.0);
        case DualRegion::High:
            return -kd * B * (kd + 2.0) * fb.c6 * y_mkd3 - kap / B / (y * y);
    }
    return 0.0;
}

double invert_dual(double w, const FreeBoundarySolution& fb, const ValidatedParams& vp) {
    if (!(w >= 0.0) || !(w <= fb.w_star * (1.0 + 1e-9))) {
        std::ostringstream os;
        os << "ratio w=" << w << " outside [0, w_star=" << fb.w_star << "]";
        throw OutOfPrimalRange(os.str());
    }
    if (w == 0.0) return fb.y0;
    if (w >= fb.w_star) return fb.y_star;
    // -Uhat_y is strictly decreasing in y (convexity), from w_star at y*
    // down to 0 at y0.
    double lo = fb.y_star, hi = fb.y0;
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (-eval_dual(mid, fb, vp).uhat_y > w)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double legendre_value(double w, const FreeBoundarySolution& fb, const ValidatedParams& vp) {
    const DualEval e = eval_dual(invert_dual(w, fb, vp), fb, vp);
    return e.uhat - e.y * e.uhat_y;
}

double primal_ratio_explicit(double y, const FreeBoundarySolution& fb,
                             const ValidatedParams& vp) {
    const double al = vp.alpha();
    const double p = vp.p();
    const double kap = vp.kappa;
    const double kd = vp.kd;
    const double B = 1.0 + kd;
    const double q = vp.q();
    const double ys = fb.y_star;
    switch (region_of(y, std::pow(al, -p))) {
        case DualRegion::Low:
            return kap * al / B *
                   (std::log(fb.y0 / y) +
                    (kd / B - 1.0 / (fb.eta_star * (1.0 - p))) *
                        (std::pow(fb.y0 / y, B) - 1.0));
        case DualRegion::Mid:
            return kap / B * (std::log(ys) + 1.0 / ys - 1.0) +
                   kap * p * p / q * std::pow(y, -1.0 / p) -
                   kap * std::pow(y, -B) / (B * q) *
                       (kd / B * std::pow(ys, B) - std::pow(ys, kd) + 1.0 / B);
        case DualRegion::High:
            return kap / B *
                   (std::log(ys / y) + p +
                    (1.0 / ys - kd / B) * (1.0 + std::pow(ys / y, B) / q));
    }
    return 0.0;
}

} // namespace divdraw

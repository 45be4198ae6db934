#include "divdraw/policy.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace divdraw {

namespace {

// Value coefficient of V(x,z) = coeff * x^{1-p}/(1-p) above the domain.
double above_coeff(const FreeBoundarySolution& fb, const ValidatedParams& vp) {
    const double p = vp.p();
    const double ws = fb.w_star;
    return vp.kappa * p * std::pow(ws, p) / (vp.q() * ws + vp.kappa * p * (1.0 - p));
}

} // namespace

const char* to_string(StateRegion r) {
    switch (r) {
        case StateRegion::A: return "A";
        case StateRegion::B: return "B";
        case StateRegion::C: return "C";
        case StateRegion::EBoundary: return "E_boundary";
        case StateRegion::DAbove: return "D_above";
    }
    return "?";
}

void require_valid_state(const StatePoint& s) {
    if (!(s.x >= 0.0) || !std::isfinite(s.x)) {
        std::ostringstream os;
        os << "state precondition x >= 0 violated: x=" << s.x;
        throw DomainError(os.str());
    }
    if (!(s.z > 0.0) || !std::isfinite(s.z)) {
        std::ostringstream os;
        os << "state precondition z > 0 violated: z=" << s.z;
        throw DomainError(os.str());
    }
}

StateRegion classify(const StatePoint& s, const FreeBoundarySolution& fb) {
    require_valid_state(s);
    const double boundary = fb.w_star * s.z;
    const double band = 4.0 * std::numeric_limits<double>::epsilon() * boundary;
    if (s.x > boundary + band) return StateRegion::DAbove;
    if (s.x >= boundary - band) return StateRegion::EBoundary;
    if (s.x <= fb.w_alpha * s.z) return StateRegion::A;
    if (s.x < fb.w_one * s.z) return StateRegion::B;
    return StateRegion::C;
}

double value(const StatePoint& s, const FreeBoundarySolution& fb, const ValidatedParams& vp) {
    require_valid_state(s);
    const double p = vp.p();
    const double w = s.x / s.z;
    if (w > fb.w_star * (1.0 + 1e-12)) {
        return above_coeff(fb, vp) * std::pow(s.x, 1.0 - p) / (1.0 - p);
    }
    return std::pow(s.z, 1.0 - p) * legendre_value(std::min(w, fb.w_star), fb, vp);
}

double pi_star(const StatePoint& s, const FreeBoundarySolution& fb, const ValidatedParams& vp) {
    require_valid_state(s);
    const double w = s.x / s.z;
    if (w > fb.w_star * (1.0 + 1e-12)) {
        // Super-contact makes the off-domain slope the Merton fraction.
        return vp.mu() / (vp.sigma2() * vp.p()) * s.x;
    }
    const DualEval e = eval_dual(invert_dual(std::min(w, fb.w_star), fb, vp), fb, vp);
    return vp.mu() / vp.sigma2() * s.z * e.y * e.uhat_yy;
}

double c_star(const StatePoint& s, const FreeBoundarySolution& fb, const ValidatedParams& vp) {
    require_valid_state(s);
    const double w = s.x / s.z;
    if (w > fb.w_star * (1.0 + 1e-12)) return s.x / fb.w_star;
    const double y = invert_dual(std::min(w, fb.w_star), fb, vp);
    const double alpha_mp = std::pow(vp.alpha(), -vp.p());
    if (y >= alpha_mp) return vp.alpha() * s.z;
    if (y > 1.0) return std::pow(y, -1.0 / vp.p()) * s.z;
    return s.z;
}

PolicyEval evaluate(const StatePoint& s, const FreeBoundarySolution& fb,
                    const ValidatedParams& vp) {
    PolicyEval pe;
    pe.region = classify(s, fb);
    const double w = s.x / s.z;
    if (pe.region == StateRegion::DAbove) {
        pe.y = std::numeric_limits<double>::quiet_NaN();
        pe.value = value(s, fb, vp);
        pe.pi = pi_star(s, fb, vp);
        pe.c = s.x / fb.w_star;
        return pe;
    }
    const DualEval e = eval_dual(invert_dual(std::min(w, fb.w_star), fb, vp), fb, vp);
    pe.y = e.y;
    pe.value = std::pow(s.z, 1.0 - vp.p()) * (e.uhat - e.y * e.uhat_y);
    pe.pi = vp.mu() / vp.sigma2() * s.z * e.y * e.uhat_yy;
    const double alpha_mp = std::pow(vp.alpha(), -vp.p());
    if (e.y >= alpha_mp)
        pe.c = vp.alpha() * s.z;
    else if (e.y > 1.0)
        pe.c = std::pow(e.y, -1.0 / vp.p()) * s.z;
    else
        pe.c = s.z;
    return pe;
}

MertonSolution merton_limit(const ValidatedParams& vp) {
    const double p = vp.p();
    const double q = vp.q();
    MertonSolution m;
    m.value_coeff = std::pow(vp.kappa * p * p / q, p);
    m.pi_slope = vp.mu() / (vp.sigma2() * p);
    m.c_slope = q / (vp.kappa * p * p);
    return m;
}

FreeBoundarySolution ratcheting_limit(const ValidatedParams& vp) {
    ModelParams base = vp.base;
    base.alpha = 1.0;
    return solve_free_boundary(validate(base));
}

double value_explicit(const StatePoint& s, const FreeBoundarySolution& fb,
                      const ValidatedParams& vp) {
    require_valid_state(s);
    const double al = vp.alpha();
    const double p = vp.p();
    const double del = vp.delta();
    const double kap = vp.kappa;
    const double kd = vp.kd;
    const double B = 1.0 + kd;
    const double q = vp.q();
    const double z1p = std::pow(s.z, 1.0 - p);
    const double w = s.x / s.z;
    if (w > fb.w_star * (1.0 + 1e-12)) {
        return above_coeff(fb, vp) * std::pow(s.x, 1.0 - p) / (1.0 - p);
    }
    const double y = invert_dual(std::min(w, fb.w_star), fb, vp);
    const double ys = fb.y_star;
    switch (eval_dual(y, fb, vp).region) {
        case DualRegion::Low:
            return kap * al * z1p * y / B * (std::pow(fb.y0 / y, B) - 1.0) -
                   std::pow(al * s.z, 1.0 - p) / (del * (1.0 - p)) *
                       (std::pow(fb.y0 / y, kd) - 1.0);
        case DualRegion::Mid:
            return (kd * p * p / (1.0 - p) * std::pow(y, -(1.0 - p) / p) -
                    (kd / B * std::pow(ys, B) - std::pow(ys, kd) + 1.0 / B) *
                        std::pow(y, -kd)) *
                   z1p / (del * q);
        case DualRegion::High:
            return z1p / q * (1.0 / del - kap * ys / B) * std::pow(ys / y, kd) +
                   z1p / (del * (1.0 - p)) - kap * z1p * y / B;
    }
    return 0.0;
}

double pi_star_explicit(const StatePoint& s, const FreeBoundarySolution& fb,
                        const ValidatedParams& vp) {
    require_valid_state(s);
    const double al = vp.alpha();
    const double p = vp.p();
    const double mu = vp.mu();
    const double kd = vp.kd;
    const double B = 1.0 + kd;
    const double q = vp.q();
    const double w = s.x / s.z;
    if (w > fb.w_star * (1.0 + 1e-12)) {
        return vp.mu() / (vp.sigma2() * p) * s.x;
    }
    const double y = invert_dual(std::min(w, fb.w_star), fb, vp);
    const double ys = fb.y_star;
    switch (eval_dual(y, fb, vp).region) {
        case DualRegion::Low:
            return 2.0 * al * s.z / mu *
                   ((kd / B - 1.0 / (fb.eta_star * (1.0 - p))) * std::pow(fb.y0 / y, B) +
                    1.0 / B);
        case DualRegion::Mid:
            return 2.0 * s.z / (mu * q) *
                   (p * std::pow(y, -1.0 / p) - std::pow(y, -B) / B +
                    (1.0 / ys - kd / B) * std::pow(ys / y, B));
        case DualRegion::High:
            return 2.0 * s.z / mu *
                   (1.0 / B + (1.0 / ys - kd / B) * std::pow(ys / y, B) / q);
    }
    return 0.0;
}

} // namespace divdraw

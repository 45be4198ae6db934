#include "divdraw/fbp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace divdraw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// First equation as a function of L = ln(eta). Well conditioned for any L,
// unlike the eta form which overflows for small y.
double eta_equation_log(double log_eta, double y, const ValidatedParams& vp) {
    const double al = vp.alpha();
    const double p = vp.p();
    return al * log_eta - std::log(y) + al * std::exp(-log_eta) / (1.0 - p) - 1.0 / y -
           (al * (1.0 + p) - 1.0);
}

// Largest ln(eta) for which eta^{1+kd} stays inside double range.
double log_eta_overflow_cap(const ValidatedParams& vp) {
    return 700.0 / (1.0 + vp.kd);
}

} // namespace

double eta_equation(double eta, double y, const ValidatedParams& vp) {
    return eta_equation_log(std::log(eta), y, vp);
}

double system_equation2(double eta, double y, const ValidatedParams& vp) {
    const double al = vp.alpha();
    const double p = vp.p();
    const double del = vp.delta();
    const double kap = vp.kappa;
    const double kd = vp.kd;
    const double B = 1.0 + kd;
    const double q = vp.q();
    if (!(std::log(eta) <= log_eta_overflow_cap(vp))) return kInf;
    const double A = std::pow(al, 1.0 - p * B);
    const double t1 = A * q *
                      (kap / B * std::pow(eta, B) - std::pow(eta, kd) / (del * (1.0 - p)));
    const double t2 = kap / B * std::pow(y, B) - std::pow(y, kd) / del;
    return t1 + t2 - (A - 1.0) / (del * B);
}

double solve_log_eta_given_y(double y, const ValidatedParams& vp, const SolveOptions& opt) {
    if (!(y > 0.0) || !(y < 1.0)) {
        std::ostringstream os;
        os << "dual point y must lie in (0,1), got " << y;
        throw OutOfDualRange(os.str());
    }
    const double p = vp.p();
    // G is strictly increasing in eta on (1/(1-p), inf); bracket in log space.
    const double lo0 = std::log(1.0 / (1.0 - p)) + 1e-12;
    if (eta_equation_log(lo0, y, vp) > 0.0) {
        std::ostringstream os;
        os << "no root with eta > 1/(1-p) for y=" << y
           << " (the curve lies below 1/(1-p) past y_p); searched ln(eta) >= " << lo0;
        throw BracketNotFound(os.str());
    }
    double lo = lo0;
    double hi = opt.inner_log_eta_hi > lo0 ? opt.inner_log_eta_hi : lo0 + 1.0;
    double step = hi - lo0;
    // G grows like alpha * ln(eta), so the expansion terminates whenever a
    // root exists; the cap only guards against pathological inputs.
    while (eta_equation_log(hi, y, vp) < 0.0) {
        step *= 2.0;
        hi = lo0 + step;
        if (step > 1e306) {
            std::ostringstream os;
            os << "no sign change for ln(eta) in [" << lo0 << ", " << hi << "] at y=" << y;
            throw BracketNotFound(os.str());
        }
    }
    // Width test is relative so the loop also terminates for the huge
    // log-eta roots that arise at tiny y.
    while (hi - lo > opt.bracket_tol * std::max(1.0, lo)) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (eta_equation_log(mid, y, vp) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    double L = 0.5 * (lo + hi);
    // Two guarded Newton steps polish the root to machine precision; the
    // second equation is sensitive enough to eta that the bracket width
    // alone would dominate the system residual.
    const double al = vp.alpha();
    for (int i = 0; i < 2; ++i) {
        const double g = eta_equation_log(L, y, vp);
        const double gp = al * (1.0 - std::exp(-L) / (1.0 - vp.p()));
        if (!(gp > 0.0)) break;
        const double next = L - g / gp;
        if (!(next > lo0)) break;
        L = next;
    }
    return L;
}

double solve_eta_given_y(double y, const ValidatedParams& vp, const SolveOptions& opt) {
    return std::exp(solve_log_eta_given_y(y, vp, opt));
}

SystemRoot solve_system(const ValidatedParams& vp, const SolveOptions& opt) {
    const double al = vp.alpha();
    const double p = vp.p();
    const double del = vp.delta();
    const double kap = vp.kappa;
    const double kd = vp.kd;
    const double B = 1.0 + kd;
    const double q = vp.q();
    const double cap = log_eta_overflow_cap(vp);
    const double A = std::pow(al, 1.0 - p * B);

    // Residual of the second equation normalized by alpha^{1-p(1+kd)} (a
    // positive constant), with eta = eta(y) substituted. The raw form's
    // rounding floor scales with A, which ruins small-alpha runs.
    // Sign extension keeps the function total on (0,1): past y_p the first
    // curve has no branch above 1/(1-p) (side of y > y*); where eta(y)
    // overflows the power terms the residual is +inf (side of y < y*).
    auto outer = [&](double y) -> double {
        double log_eta;
        try {
            log_eta = solve_log_eta_given_y(y, vp, opt);
        } catch (const BracketNotFound&) {
            return -kInf;
        }
        if (log_eta > cap) return kInf;
        const double eta_B = std::exp(B * log_eta);
        const double eta_kd = std::exp(kd * log_eta);
        const double t1n = q * (kap / B * eta_B - eta_kd / (del * (1.0 - p)));
        const double t2 = kap / B * std::pow(y, B) - std::pow(y, kd) / del;
        return t1n + (t2 - (A - 1.0) / (del * B)) / A;
    };

    double lo = opt.outer_lo;
    double hi = opt.outer_hi;
    const double f_lo = outer(lo);
    const double f_hi = outer(hi);
    if (!(f_lo > 0.0) || !(f_hi < 0.0)) {
        std::ostringstream os;
        os << "outer bisection found no sign change in y in (" << lo << ", " << hi
           << "); residual profile:";
        for (int i = 0; i <= 16; ++i) {
            const double y = lo + (hi - lo) * i / 16.0;
            os << " (" << y << ", " << outer(y) << ")";
        }
        throw NoRoot(os.str());
    }
    // The raw second equation is steep in y (the eta(y) substitution
    // amplifies it by ~1e5 at typical parameters), so run the bisection all
    // the way down to floating-point resolution; 200 halvings more than
    // exhaust a unit interval.
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (outer(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    SystemRoot root;
    root.y_star = 0.5 * (lo + hi);
    root.eta_star = std::exp(solve_log_eta_given_y(root.y_star, vp, opt));
    root.resid1 = eta_equation(root.eta_star, root.y_star, vp);
    root.resid2 = system_equation2(root.eta_star, root.y_star, vp);
    const double resid2_norm = root.resid2 / A;
    if (!(std::abs(root.resid1) <= opt.residual_tol) ||
        !(std::min(std::abs(root.resid2), std::abs(resid2_norm)) <= opt.residual_tol)) {
        std::ostringstream os;
        os << "system residuals exceed tolerance at (eta*, y*) = (" << root.eta_star << ", "
           << root.y_star << "): r1=" << root.resid1 << " r2=" << root.resid2;
        throw NoRoot(os.str());
    }
    return root;
}

Constants compute_constants(const ValidatedParams& vp, double eta_star, double y_star) {
    const double al = vp.alpha();
    const double p = vp.p();
    const double del = vp.delta();
    const double kap = vp.kappa;
    const double kd = vp.kd;
    const double B = 1.0 + kd;
    const double q = vp.q();
    const double A = std::pow(al, 1.0 - p * B);
    const double eta_B = std::pow(eta_star, B);
    const double eta_kd = std::pow(eta_star, kd);
    const double log_eta = std::log(eta_star);
    const double inv_e1p = 1.0 / (eta_star * (1.0 - p));

    Constants c;
    c.c1 = -kap * al / B * (log_eta - p * std::log(al) + inv_e1p + 1.0 / B);
    c.c2 = A / B * (kap / B * eta_B - eta_kd / (del * (1.0 - p)));
    c.c3 = -kap * al / B * (log_eta + inv_e1p - (1.0 + p));
    c.c4 = A / B * (kap / B * eta_B - eta_kd / (del * (1.0 - p)) - 1.0 / (del * B * q));
    c.c5 = -kap / B * (al * log_eta + al * inv_e1p + (1.0 - al) * (1.0 + p) + 1.0 / B);
    c.c6 = A / B * (kap / B * eta_B - eta_kd / (del * (1.0 - p))) -
           (A - 1.0) / (del * B * B * q);

    // Alternative forms in terms of y*; equality encodes the system
    // equations, so disagreement flags a bad upstream root.
    const double ys_kd = std::pow(y_star, kd);
    const double ys_B = std::pow(y_star, B);
    const double log_ys = std::log(y_star);
    const double alt3 = -kap / B * (1.0 / y_star + log_ys - 1.0);
    const double alt4 = (ys_kd - kd / B * ys_B - 1.0 / B) / (del * B * q);
    const double alt5 = -kap / B * (log_ys + 1.0 / y_star + p + 1.0 / B);
    const double alt6 = (ys_kd - kd / B * ys_B) / (del * B * q);

    auto check = [](double primary, double alt, const char* name) {
        const double scale = std::max({std::abs(primary), std::abs(alt), 1e-300});
        if (!(std::abs(primary - alt) <= 1e-8 * scale)) {
            std::ostringstream os;
            os << "constant " << name << " disagrees with its y*-form: " << primary << " vs "
               << alt << " (indicates an upstream root-finding failure)";
            throw ConstantMismatch(os.str());
        }
    };
    check(c.c3, alt3, "C3");
    check(c.c4, alt4, "C4");
    check(c.c5, alt5, "C5");
    check(c.c6, alt6, "C6");
    return c;
}

Boundaries compute_boundaries(const ValidatedParams& vp, double eta_star, double y_star) {
    const double al = vp.alpha();
    const double p = vp.p();
    const double kap = vp.kappa;
    const double kd = vp.kd;
    const double B = 1.0 + kd;
    const double q = vp.q();

    Boundaries b;
    b.w_alpha = kap * al / B *
                (std::log(eta_star) +
                 (kd / B - 1.0 / (eta_star * (1.0 - p))) * (std::pow(eta_star, B) - 1.0));
    b.w_one = kap / B *
              (std::log(y_star) + p +
               (1.0 / y_star - kd / B) * (1.0 + std::pow(y_star, B) / q));
    b.w_star = kap * p / q * (1.0 / y_star - (1.0 - p));
    // At alpha == 1 the intermediate band is empty and w_alpha == w_one.
    const bool ordered = vp.alpha() == 1.0
                             ? (0.0 < b.w_alpha && std::abs(b.w_alpha - b.w_one) <= 1e-9 * b.w_one &&
                                b.w_one < b.w_star)
                             : (0.0 < b.w_alpha && b.w_alpha < b.w_one && b.w_one < b.w_star);
    if (!ordered) {
        std::ostringstream os;
        os << "boundary ordering 0 < w_alpha < w_one < w_star failed: " << b.w_alpha << ", "
           << b.w_one << ", " << b.w_star << " (infeasible root)";
        throw OrderingViolation(os.str());
    }
    return b;
}

FreeBoundarySolution solve_free_boundary(const ValidatedParams& vp, const SolveOptions& opt) {
    if (vp.branch == AlphaBranch::Merton) {
        throw DomainError("alpha = 0 has no free boundary; use the Merton closed forms");
    }
    const SystemRoot root = solve_system(vp, opt);
    const Constants c = compute_constants(vp, root.eta_star, root.y_star);
    if (!(c.c2 > 0.0) || !(c.c4 < 0.0) || !(c.c6 > 0.0)) {
        std::ostringstream os;
        os << "constant sign pattern C2>0, C4<0, C6>0 violated: " << c.c2 << ", " << c.c4
           << ", " << c.c6;
        throw ConstantMismatch(os.str());
    }
    const Boundaries b = compute_boundaries(vp, root.eta_star, root.y_star);

    FreeBoundarySolution fb;
    fb.eta_star = root.eta_star;
    fb.y_star = root.y_star;
    fb.y0 = root.eta_star * std::pow(vp.alpha(), -vp.p());
    fb.c1 = c.c1;
    fb.c2 = c.c2;
    fb.c3 = c.c3;
    fb.c4 = c.c4;
    fb.c5 = c.c5;
    fb.c6 = c.c6;
    fb.w_alpha = b.w_alpha;
    fb.w_one = b.w_one;
    fb.w_star = b.w_star;
    fb.resid1 = root.resid1;
    fb.resid2 = root.resid2;
    return fb;
}

double find_y_p(const ValidatedParams& vp) {
    const double lo_eta = std::log(1.0 / (1.0 - vp.p())) + 1e-12;
    auto g = [&](double y) { return eta_equation_log(lo_eta, y, vp); };
    double lo = 1e-12, hi = 1.0 - 1e-12;
    // g < 0 while an eta-root exists above 1/(1-p); the flip point is y_p.
    if (!(g(lo) < 0.0) || !(g(hi) > 0.0)) {
        throw NoRoot("y_p bracket failed; parameters outside the covered regime");
    }
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace divdraw

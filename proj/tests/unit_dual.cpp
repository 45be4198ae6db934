#include "divdraw/dual.hpp"

#include <doctest.h>

#include <cmath>

using namespace divdraw;

namespace {
const ValidatedParams kFig3 = validate({0.08, 0.2, 0.2, 0.5, 0.8});
const FreeBoundarySolution kFb = solve_free_boundary(kFig3);

double ode_rhs(double y, const ValidatedParams& vp) {
    const double al = vp.alpha(), p = vp.p(), kap = vp.kappa;
    if (y >= std::pow(al, -p)) return kap * (al * y - std::pow(al, 1.0 - p) / (1.0 - p));
    if (y > 1.0) return -kap * p / (1.0 - p) * std::pow(y, -(1.0 - p) / p);
    return kap * (y - 1.0 / (1.0 - p));
}
} // namespace

TEST_CASE("free-boundary conditions at y0 and y*") {
    const DualEval at0 = eval_dual(kFb.y0, kFb, kFig3);
    CHECK(std::abs(at0.uhat) <= 1e-10 * (1.0 + std::abs(kFb.c2 * std::pow(kFb.y0, -kFig3.kd))));
    CHECK(std::abs(at0.uhat_y) <= 1e-12 * (1.0 + kFb.w_star));

    const double p = kFig3.p();
    const DualEval ats = eval_dual(kFb.y_star, kFb, kFig3);
    CHECK(std::abs((1.0 - p) * ats.uhat + p * kFb.y_star * ats.uhat_y) <=
          1e-10 * (1.0 + std::abs(ats.uhat)));
    CHECK(std::abs(ats.uhat_y + p * kFb.y_star * ats.uhat_yy) <= 1e-10 * (1.0 + kFb.w_star));

    // Uhat(y*) closed form, frozen from the independent oracle as well.
    CHECK(ats.uhat == doctest::Approx(20.23263697275092).epsilon(1e-10));
}

TEST_CASE("ODE residual vanishes at region midpoints") {
    const double alpha_mp = std::pow(kFig3.alpha(), -kFig3.p());
    const double mids[3] = {0.5 * (kFb.y_star + 1.0), 0.5 * (1.0 + alpha_mp),
                            0.5 * (alpha_mp + kFb.y0)};
    for (double y : mids) {
        const DualEval e = eval_dual(y, kFb, kFig3);
        const double resid = y * y * e.uhat_yy + kFig3.kd * y * e.uhat_y -
                             kFig3.kd * e.uhat - ode_rhs(y, kFig3);
        CHECK(std::abs(resid) <= 1e-9 * (1.0 + std::abs(e.uhat)));
    }
}

TEST_CASE("hand-derived derivatives agree with finite differences") {
    for (double y : {0.6, 0.9, 1.4, 2.5, 5.0, 10.0}) {
        const double h = 1e-6 * y;
        const DualEval up = eval_dual(y + h, kFb, kFig3);
        const DualEval dn = eval_dual(y - h, kFb, kFig3);
        const DualEval e = eval_dual(y, kFb, kFig3);
        CHECK((up.uhat - dn.uhat) / (2 * h) ==
              doctest::Approx(e.uhat_y).epsilon(1e-7));
        CHECK((up.uhat_y - dn.uhat_y) / (2 * h) ==
              doctest::Approx(e.uhat_yy).epsilon(1e-7));
        CHECK((up.uhat_yy - dn.uhat_yy) / (2 * h) ==
              doctest::Approx(eval_dual_yyy(y, kFb, kFig3)).epsilon(1e-6));
    }
}

TEST_CASE("monotone decreasing, convex, and continuous across the seams") {
    double prev_uhat_y = -1e300;
    for (int i = 0; i <= 400; ++i) {
        const double y = kFb.y_star + (kFb.y0 - kFb.y_star) * i / 400.0;
        const DualEval e = eval_dual(y, kFb, kFig3);
        if (i > 0 && i < 400) {
            CHECK(e.uhat_y < 0.0);
            CHECK(e.uhat_yy > 0.0);
        }
        CHECK(e.uhat_y >= prev_uhat_y); // Uhat_y increasing <=> -Uhat_y decreasing
        prev_uhat_y = e.uhat_y;
    }
    const double alpha_mp = std::pow(kFig3.alpha(), -kFig3.p());
    for (double seam : {1.0, alpha_mp}) {
        const DualEval l = eval_dual(seam * (1 - 1e-11), kFb, kFig3);
        const DualEval r = eval_dual(seam * (1 + 1e-11), kFb, kFig3);
        CHECK(l.region != r.region);
        CHECK(std::abs(l.uhat - r.uhat) <= 1e-9 * (1.0 + std::abs(l.uhat)));
        CHECK(std::abs(l.uhat_y - r.uhat_y) <= 1e-9 * (1.0 + std::abs(l.uhat_y)));
    }
}

TEST_CASE("region tags follow the printed intervals") {
    const double alpha_mp = std::pow(kFig3.alpha(), -kFig3.p());
    CHECK(eval_dual(kFb.y_star, kFb, kFig3).region == DualRegion::High);
    CHECK(eval_dual(1.0, kFb, kFig3).region == DualRegion::High);
    CHECK(eval_dual(1.0 + 1e-12, kFb, kFig3).region == DualRegion::Mid);
    CHECK(eval_dual(alpha_mp, kFb, kFig3).region == DualRegion::Low);
    CHECK(eval_dual(kFb.y0, kFb, kFig3).region == DualRegion::Low);
    CHECK_THROWS_AS(eval_dual(kFb.y_star * 0.99, kFb, kFig3), OutOfDualRange);
    CHECK_THROWS_AS(eval_dual(kFb.y0 * 1.01, kFb, kFig3), OutOfDualRange);
}

TEST_CASE("invert_dual endpoints and round trip") {
    CHECK(invert_dual(0.0, kFb, kFig3) == kFb.y0);
    CHECK(invert_dual(kFb.w_star, kFb, kFig3) == kFb.y_star);
    CHECK_THROWS_AS(invert_dual(-1e-6, kFb, kFig3), OutOfPrimalRange);
    CHECK_THROWS_AS(invert_dual(kFb.w_star * 1.001, kFb, kFig3), OutOfPrimalRange);
    for (int i = 0; i <= 100; ++i) {
        const double w = kFb.w_star * i / 100.0;
        const double y = invert_dual(w, kFb, kFig3);
        const double back = -eval_dual(y, kFb, kFig3).uhat_y;
        CHECK(std::abs(back - w) <= 1e-11 * (1.0 + w));
    }
}

TEST_CASE("boundary ratios recovered from the slope map") {
    const double alpha_mp = std::pow(kFig3.alpha(), -kFig3.p());
    CHECK(-eval_dual(alpha_mp, kFb, kFig3).uhat_y ==
          doctest::Approx(kFb.w_alpha).epsilon(1e-8));
    CHECK(-eval_dual(1.0, kFb, kFig3).uhat_y == doctest::Approx(kFb.w_one).epsilon(1e-8));
}

TEST_CASE("explicit inversion formulas match the slope map per region") {
    for (int i = 1; i < 60; ++i) {
        const double y = kFb.y_star + (kFb.y0 - kFb.y_star) * i / 60.0;
        const double w = -eval_dual(y, kFb, kFig3).uhat_y;
        CHECK(primal_ratio_explicit(y, kFb, kFig3) ==
              doctest::Approx(w).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("Legendre reconstruction is increasing and concave") {
    const int n = 200;
    double prev = -1.0, prev_slope = 1e300;
    for (int i = 0; i <= n; ++i) {
        const double w = kFb.w_star * i / n;
        const double u = legendre_value(w, kFb, kFig3);
        if (i > 0) {
            const double slope = (u - prev) * n / kFb.w_star;
            CHECK(slope > 0.0);
            if (i > 1) CHECK(slope < prev_slope);
            prev_slope = slope;
        }
        prev = u;
    }
}

TEST_CASE("Uhat is non-increasing in alpha on the common dual domain") {
    const ValidatedParams vp1 = validate({0.08, 0.2, 0.2, 0.25, 0.8});
    const ValidatedParams vp2 = validate({0.08, 0.2, 0.2, 0.75, 0.8});
    const FreeBoundarySolution f1 = solve_free_boundary(vp1);
    const FreeBoundarySolution f2 = solve_free_boundary(vp2);
    const double lo = std::max(f1.y_star, f2.y_star);
    const double hi = std::min(f1.y0, f2.y0);
    for (int i = 0; i <= 50; ++i) {
        const double y = lo + (hi - lo) * (i + 0.5) / 51.0;
        CHECK(eval_dual(y, f1, vp1).uhat >= eval_dual(y, f2, vp2).uhat - 1e-12);
    }
}

#include "divdraw/fbp.hpp"

#include <doctest.h>

#include <cmath>

using namespace divdraw;

namespace {
const ValidatedParams kFig3 = validate({0.08, 0.2, 0.2, 0.5, 0.8});

// Reference solution for the Fig-3 parameter set, frozen from an
// independent high-precision root finder.
constexpr double kYStar = 0.4476566811254712;
constexpr double kEtaStar = 7.001378332197859;
constexpr double kY0 = 12.19010770188825;
constexpr double kWAlpha = 3.702972504908772;
constexpr double kWOne = 5.594681812071721;
constexpr double kWStar = 11.2991930121025;
} // namespace

TEST_CASE("eta equation is strictly increasing in eta past 1/(1-p)") {
    const double y = 0.3;
    const double eta = solve_eta_given_y(y, kFig3);
    CHECK(eta > 1.0 / (1.0 - kFig3.p()));
    CHECK(std::abs(eta_equation(eta, y, kFig3)) <= 1e-12);
    CHECK(eta_equation(eta + 1.0, y, kFig3) > 0.0);
    CHECK(eta_equation(eta - 1e-3, y, kFig3) < 0.0);
}

TEST_CASE("eta diverges as y -> 0+") {
    // The roots at these y are far beyond double range; compare in logs.
    CHECK(solve_log_eta_given_y(1e-6, kFig3) > solve_log_eta_given_y(1e-3, kFig3));
    CHECK(solve_eta_given_y(1e-6, kFig3) == std::numeric_limits<double>::infinity());
}

TEST_CASE("eta at the solved y_star matches the caption-derived value") {
    // eta* = y0 * alpha^p = 12.1901 * 0.5^0.8 from the printed y0.
    const double eta = solve_eta_given_y(kYStar, kFig3);
    CHECK(eta == doctest::Approx(7.00).epsilon(0.01 / 7.00));
    CHECK(std::abs(eta_equation(eta, kYStar, kFig3)) <= 1e-12);
}

TEST_CASE("solve_eta_given_y rejects y outside (0,1) and past y_p") {
    CHECK_THROWS_AS(solve_eta_given_y(0.0, kFig3), OutOfDualRange);
    CHECK_THROWS_AS(solve_eta_given_y(1.0, kFig3), OutOfDualRange);
    const double yp = find_y_p(kFig3);
    CHECK(yp < 1.0);
    CHECK(yp > kYStar); // y* < y_p
    CHECK_THROWS_AS(solve_eta_given_y(yp * 1.01, kFig3), BracketNotFound);
    CHECK_NOTHROW(solve_eta_given_y(yp * 0.99, kFig3));
}

TEST_CASE("system solution at the Fig-3 parameter set") {
    const SystemRoot root = solve_system(kFig3);
    CHECK(root.y_star == doctest::Approx(kYStar).epsilon(1e-11));
    CHECK(root.eta_star == doctest::Approx(kEtaStar).epsilon(1e-11));
    CHECK(std::abs(root.resid1) <= 1e-10);
    CHECK(std::abs(root.resid2) <= 1e-10);
    CHECK(root.y_star > 0.0);
    CHECK(root.y_star < 1.0);
    CHECK(root.eta_star > 1.0 / (1.0 - kFig3.p()));
    // Below the root of the first equation at y*, the curve is under 1/(1-p).
    CHECK(eta_equation(1.0 / (1.0 - kFig3.p()), root.y_star, kFig3) < 0.0);
}

TEST_CASE("perturbed brackets land on the same root") {
    const SystemRoot base = solve_system(kFig3);
    SolveOptions opt;
    opt.outer_lo = 0.05;
    opt.outer_hi = 0.93;
    opt.inner_log_eta_hi = 3.7;
    const SystemRoot again = solve_system(kFig3, opt);
    CHECK(again.y_star == doctest::Approx(base.y_star).epsilon(1e-9));
    CHECK(again.eta_star == doctest::Approx(base.eta_star).epsilon(1e-9));
}

TEST_CASE("a root-free outer interval reports NoRoot") {
    SolveOptions opt;
    opt.outer_lo = 0.9;
    opt.outer_hi = 0.99;
    CHECK_THROWS_AS(solve_system(kFig3, opt), NoRoot);
}

TEST_CASE("constants: signs and the y*-form cross-checks") {
    const FreeBoundarySolution fb = solve_free_boundary(kFig3);
    CHECK(fb.c2 > 0.0);
    CHECK(fb.c4 < 0.0);
    CHECK(fb.c6 > 0.0);

    // Independent re-derivation of the alternative forms.
    const double kd = kFig3.kd, B = 1.0 + kd, q = kFig3.q(), del = kFig3.delta();
    const double ys = fb.y_star;
    const double c5_alt = -kFig3.kappa / B * (std::log(ys) + 1.0 / ys + kFig3.p() + 1.0 / B);
    const double c6_alt = (std::pow(ys, kd) - kd / B * std::pow(ys, B)) / (del * B * q);
    const double c3_alt = -kFig3.kappa / B * (1.0 / ys + std::log(ys) - 1.0);
    const double c4_alt =
        (std::pow(ys, kd) - kd / B * std::pow(ys, B) - 1.0 / B) / (del * B * q);
    CHECK(std::abs(fb.c5 - c5_alt) <= 1e-8 * std::abs(fb.c5));
    CHECK(std::abs(fb.c6 - c6_alt) <= 1e-8 * std::abs(fb.c6));
    CHECK(std::abs(fb.c3 - c3_alt) <= 1e-8 * std::abs(fb.c3));
    CHECK(std::abs(fb.c4 - c4_alt) <= 1e-8 * std::abs(fb.c4));

    // An off-solution point must trip the cross-check.
    CHECK_THROWS_AS(compute_constants(kFig3, fb.eta_star * 1.01, fb.y_star), ConstantMismatch);
}

TEST_CASE("boundaries at the Fig-3 parameter set") {
    const FreeBoundarySolution fb = solve_free_boundary(kFig3);
    CHECK(fb.w_alpha == doctest::Approx(kWAlpha).epsilon(1e-11));
    CHECK(fb.w_one == doctest::Approx(kWOne).epsilon(1e-11));
    CHECK(fb.w_star == doctest::Approx(kWStar).epsilon(1e-11));
    CHECK(fb.y0 == doctest::Approx(kY0).epsilon(1e-11));
    // Figure-caption regression at the printed precision.
    CHECK(fb.w_alpha == doctest::Approx(3.703).epsilon(1e-3));
    CHECK(fb.w_one == doctest::Approx(5.5947).epsilon(1e-3));
    CHECK(fb.w_star == doctest::Approx(11.2992).epsilon(1e-3));
    CHECK(fb.y0 == doctest::Approx(12.1901).epsilon(1e-3));
    CHECK(0.0 < fb.w_alpha);
    CHECK(fb.w_alpha < fb.w_one);
    CHECK(fb.w_one < fb.w_star);
}

TEST_CASE("w_star approaches the unconstrained limit as alpha -> 0+") {
    const double limit = kFig3.kappa * 0.8 * 0.8 / kFig3.q(); // 8/1.8
    CHECK(limit == doctest::Approx(4.444444444444445).epsilon(1e-12));
    const double ws4 = solve_free_boundary(validate({0.08, 0.2, 0.2, 1e-4, 0.8})).w_star;
    const double ws6 = solve_free_boundary(validate({0.08, 0.2, 0.2, 1e-6, 0.8})).w_star;
    CHECK(std::abs(ws6 - limit) < std::abs(ws4 - limit));
    CHECK(ws4 == doctest::Approx(limit).epsilon(0.02));
}

TEST_CASE("alpha sweep: y* strictly down, w* strictly up") {
    double prev_ys = 1.0, prev_ws = 0.0;
    for (int i = 1; i <= 9; ++i) {
        ModelParams mp = kFig3.base;
        mp.alpha = 0.1 * i;
        const FreeBoundarySolution fb = solve_free_boundary(validate(mp));
        CHECK(fb.y_star < prev_ys);
        CHECK(fb.w_star > prev_ws);
        prev_ys = fb.y_star;
        prev_ws = fb.w_star;
    }
}

TEST_CASE("system residuals stay small across a parameter grid") {
    for (double mu : {0.05, 0.08, 0.12}) {
        for (double alpha : {0.2, 0.5, 0.8}) {
            for (double p : {0.5, 0.8, 0.95}) {
                const ValidatedParams vp = validate({mu, 0.2, 0.2, alpha, p});
                const SystemRoot root = solve_system(vp);
                CHECK(std::abs(root.resid1) <= 1e-10);
                CHECK(std::abs(root.resid2) <= 1e-10);
            }
        }
    }
}

TEST_CASE("alpha = 0 has no free boundary") {
    CHECK_THROWS_AS(solve_free_boundary(validate({0.08, 0.2, 0.2, 0.0, 0.8})), DomainError);
}

#include "divdraw/model.hpp"

#include <doctest.h>

using namespace divdraw;

TEST_CASE("validate fills the derived constants") {
    const ValidatedParams vp = validate({0.08, 0.2, 0.2, 0.5, 0.8});
    CHECK(vp.kappa == doctest::Approx(12.5).epsilon(1e-15));
    CHECK(vp.kd == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(vp.p_lower == doctest::Approx(1.0 / 3.5).epsilon(1e-15));
    CHECK(vp.q() == doctest::Approx(1.8).epsilon(1e-14));
    CHECK(vp.branch == AlphaBranch::Interior);
}

TEST_CASE("infeasible inputs are rejected with the right error") {
    CHECK_THROWS_AS(validate({0.08, 0.2, 0.2, 0.5, 0.25}), RiskAversionInfeasible);
    CHECK_THROWS_AS(validate({0.08, 0.2, 0.2, 0.5, 1.0}), RiskAversionInfeasible);
    CHECK_THROWS_AS(validate({0.08, 0.2, 0.2, 1.3, 0.8}), AlphaOutOfRange);
    CHECK_THROWS_AS(validate({0.08, 0.2, 0.2, -0.1, 0.8}), AlphaOutOfRange);
    CHECK_THROWS_AS(validate({-0.08, 0.2, 0.2, 0.5, 0.8}), NonPositiveParam);
    CHECK_THROWS_AS(validate({0.08, 0.0, 0.2, 0.5, 0.8}), NonPositiveParam);
    CHECK_THROWS_AS(validate({0.08, 0.2, -1.0, 0.5, 0.8}), NonPositiveParam);
}

TEST_CASE("feasibility boundary is strict") {
    // p exactly at 1/(1+kd) is ill-posed, just above is fine.
    const double p_lower = 1.0 / 3.5;
    CHECK_THROWS_AS(validate({0.08, 0.2, 0.2, 0.5, p_lower}), RiskAversionInfeasible);
    CHECK_NOTHROW(validate({0.08, 0.2, 0.2, 0.5, p_lower + 1e-12}));
}

TEST_CASE("validate is deterministic and idempotent") {
    const ValidatedParams a = validate({0.11, 0.3, 0.15, 0.4, 0.7});
    const ValidatedParams b = validate(a.base);
    CHECK(a.kappa == b.kappa);
    CHECK(a.kd == b.kd);
    CHECK(a.p_lower == b.p_lower);
    CHECK(a.branch == b.branch);
}

TEST_CASE("p_lower strictly decreases as sigma increases") {
    double prev = 2.0;
    for (double sigma = 0.1; sigma < 0.6; sigma += 0.05) {
        ModelParams mp{0.08, sigma, 0.2, 0.5, 0.999};
        // p chosen close to 1 so every sigma in the sweep is feasible
        const ValidatedParams vp = validate(mp);
        CHECK(vp.p_lower < prev);
        prev = vp.p_lower;
    }
}

TEST_CASE("alpha endpoints route to the limit branches") {
    CHECK(validate({0.08, 0.2, 0.2, 0.0, 0.8}).branch == AlphaBranch::Merton);
    CHECK(validate({0.08, 0.2, 0.2, 1.0, 0.8}).branch == AlphaBranch::Ratcheting);
}

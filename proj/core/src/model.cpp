#include "divdraw/model.hpp"

#include <cmath>
#include <sstream>

namespace divdraw {

ValidatedParams validate(const ModelParams& params) {
    auto require_positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            std::ostringstream os;
            os << "parameter " << name << " must be positive and finite, got " << v;
            throw NonPositiveParam(os.str());
        }
    };
    require_positive(params.mu, "mu");
    require_positive(params.sigma, "sigma");
    require_positive(params.delta, "delta");

    if (!(params.alpha >= 0.0) || !(params.alpha <= 1.0)) {
        std::ostringstream os;
        os << "alpha must lie in [0,1], got " << params.alpha;
        throw AlphaOutOfRange(os.str());
    }

    ValidatedParams vp;
    vp.base = params;
    vp.kappa = 2.0 * params.sigma * params.sigma / (params.mu * params.mu);
    vp.kd = vp.kappa * params.delta;
    vp.p_lower = 1.0 / (1.0 + vp.kd);

    if (!(params.p > vp.p_lower) || !(params.p < 1.0)) {
        std::ostringstream os;
        os << "risk aversion p must satisfy 1/(1+kappa*delta) < p < 1; got p=" << params.p
           << " with 1/(1+kappa*delta)=" << vp.p_lower
           << " (the control problem is ill-posed outside this band)";
        throw RiskAversionInfeasible(os.str());
    }

    if (params.alpha == 0.0) {
        vp.branch = AlphaBranch::Merton;
    } else if (params.alpha == 1.0) {
        vp.branch = AlphaBranch::Ratcheting;
    } else {
        vp.branch = AlphaBranch::Interior;
    }
    return vp;
}

} // namespace divdraw

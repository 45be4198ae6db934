#pragma once

#include "divdraw/fbp.hpp"
#include "divdraw/model.hpp"

#include <cstdint>
#include <vector>

namespace divdraw {

/// Euler-Maruyama configuration for the optimally controlled surplus.
struct SimConfig {
    double x0 = 5.0;      ///< initial surplus, > 0
    double z0 = 1.0;      ///< initial historical peak, > 0
    double dt = 1e-3;     ///< time step
    double horizon = 200; ///< truncation time T
    long n_paths = 20000;
    std::uint64_t seed = 1;
    int n_threads = 0;      ///< 0 = all hardware threads; any count gives identical output
    double vol_scale = 1.0; ///< test hook: 0 keeps the drift and feedback, kills the noise
};

void require_valid(const SimConfig& cfg);

/// One recorded step of a traced path.
struct TracePoint {
    double t, x, z, c, pi;
};

struct PathResult {
    double ruin_time = 0.0;          ///< +inf when censored at the horizon
    double discounted_utility = 0.0; ///< sum of e^{-delta t} c^{1-p}/(1-p) dt
    double peak_final = 0.0;         ///< z at the end of the path
    long n_peak_increases = 0;       ///< steps (including t=0) where z rose
    double max_overshoot = 0.0;      ///< max of (X - w* z)/z before re-projection
    double terminal_x = 0.0;         ///< surplus at censoring; 0 on ruin
    bool aborted = false;            ///< non-finite state; excluded from estimates
};

struct MCEstimate {
    double mean = 0.0;
    double stderr_ = 0.0; ///< sample std / sqrt(n)
    double analytic_value = 0.0;
    long n_paths = 0; ///< paths included in the estimate
    long n_ruined = 0;
    long n_censored = 0;
    long n_aborted = 0;
    double mean_ruin_time = 0.0;   ///< over ruined paths; NaN when none ruined
    double truncation_bound = 0.0; ///< mean over censored paths of e^{-dT} V(X_T, z_T)
    double max_overshoot = 0.0;
};

/// Precomputed feedback controls on [0, w_star] in the scale-free ratio
/// variable w = x/z: pi*(x,z) = z*pi_rel(w), c*(x,z) = z*c_rel(w), and
/// u_rel = c_rel^{1-p} so the hot loop never calls pow. Piecewise cubic
/// Hermite per region with analytic knot derivatives; region edges are the
/// policy kinks, so each interpolated piece is smooth.
class PolicyTable {
public:
    PolicyTable(const FreeBoundarySolution& fb, const ValidatedParams& vp,
                int knots_per_region = 2048);

    struct Controls {
        double pi_rel, c_rel, u_rel;
    };
    Controls eval(double w) const;

    double w_star() const { return w_star_; }

private:
    struct Segment {
        double lo = 0.0, hi = 0.0, inv_h = 0.0;
        int n = 0;
        std::vector<double> pi, dpi; // knot values and derivatives (in w)
        std::vector<double> c, dc;   // empty when c is constant on the segment
        std::vector<double> u, du;
        double c_const = 0.0, u_const = 0.0;
    };
    Segment segments_[3];
    bool has_mid_ = true;
    double w_alpha_ = 0.0, w_one_ = 0.0, w_star_ = 0.0;

    static Controls eval_segment(const Segment& s, double w);
};

/// Simulates one path of the controlled SDE: Euler step with the feedback
/// controls, then the singular-control projection z <- max(z, X/w_star),
/// which realizes both the possible t=0 jump and the reflection at the
/// boundary. Utility uses the left-endpoint dividend rate; the ruin time is
/// linearly interpolated within the crossing step. A shared PolicyTable can
/// be passed in; trace, when non-null, receives one row per recorded step.
PathResult simulate_path(const SimConfig& cfg, const FreeBoundarySolution& fb,
                         const ValidatedParams& vp, std::uint64_t path_seed,
                         const PolicyTable* table = nullptr,
                         std::vector<TracePoint>* trace = nullptr);

/// Monte Carlo estimate over cfg.n_paths independent paths; path k's noise
/// stream is a pure function of (cfg.seed, k), and per-path results are
/// reduced in path order, so the estimate is bit-identical for any thread
/// count. Throws NonFiniteState when more than 0.1% of paths abort.
MCEstimate monte_carlo(const SimConfig& cfg, const FreeBoundarySolution& fb,
                       const ValidatedParams& vp);

} // namespace divdraw

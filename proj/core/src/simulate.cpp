#include "divdraw/simulate.hpp"

#include "divdraw/dual.hpp"
#include "divdraw/policy.hpp"
#include "divdraw/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

namespace divdraw {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void require_valid(const SimConfig& cfg) {
    auto fail = [](const std::string& msg) { throw DomainError("simulation config: " + msg); };
    if (!(cfg.x0 > 0.0)) fail("x0 must be > 0");
    if (!(cfg.z0 > 0.0)) fail("z0 must be > 0");
    if (!(cfg.dt > 0.0)) fail("dt must be > 0");
    if (!(cfg.horizon > 0.0) || !(cfg.dt <= cfg.horizon)) fail("need 0 < dt <= horizon");
    if (cfg.n_paths < 1) fail("n_paths must be >= 1");
    if (!(cfg.vol_scale >= 0.0)) fail("vol_scale must be >= 0");
}

PolicyTable::PolicyTable(const FreeBoundarySolution& fb, const ValidatedParams& vp,
                         int knots_per_region) {
    const double p = vp.p();
    const double mu_over_sig2 = vp.mu() / vp.sigma2();
    w_alpha_ = fb.w_alpha;
    w_one_ = fb.w_one;
    w_star_ = fb.w_star;
    has_mid_ = (fb.w_one - fb.w_alpha) > 1e-12 * fb.w_star;

    const double los[3] = {0.0, fb.w_alpha, fb.w_one};
    const double his[3] = {fb.w_alpha, fb.w_one, fb.w_star};
    for (int r = 0; r < 3; ++r) {
        Segment& seg = segments_[r];
        seg.lo = los[r];
        seg.hi = his[r];
        if (r == 1 && !has_mid_) continue;
        seg.n = knots_per_region;
        seg.inv_h = (seg.n - 1) / (seg.hi - seg.lo);
        seg.pi.resize(seg.n);
        seg.dpi.resize(seg.n);
        if (r == 0) {
            seg.c_const = vp.alpha();
            seg.u_const = std::pow(vp.alpha(), 1.0 - p);
        } else if (r == 2) {
            seg.c_const = 1.0;
            seg.u_const = 1.0;
        } else {
            seg.c.resize(seg.n);
            seg.dc.resize(seg.n);
            seg.u.resize(seg.n);
            seg.du.resize(seg.n);
        }
        for (int i = 0; i < seg.n; ++i) {
            const double w = seg.lo + (seg.hi - seg.lo) * i / (seg.n - 1);
            const double y = invert_dual(w, fb, vp);
            const DualEval e = eval_dual(y, fb, vp);
            const double uyyy = eval_dual_yyy(y, fb, vp);
            seg.pi[i] = mu_over_sig2 * y * e.uhat_yy;
            // dy/dw = -1/Uhat_yy along w = -Uhat_y(y).
            seg.dpi[i] = -mu_over_sig2 * (e.uhat_yy + y * uyyy) / e.uhat_yy;
            if (r == 1) {
                const double c = std::pow(y, -1.0 / p);
                seg.c[i] = c;
                seg.dc[i] = (1.0 / p) * c / (y * e.uhat_yy);
                const double u = std::pow(y, -(1.0 - p) / p);
                seg.u[i] = u;
                seg.du[i] = ((1.0 - p) / p) * u / (y * e.uhat_yy);
            }
        }
    }
}

PolicyTable::Controls PolicyTable::eval_segment(const Segment& s, double w) {
    double pos = (w - s.lo) * s.inv_h;
    int i = static_cast<int>(pos);
    if (i < 0) i = 0;
    if (i > s.n - 2) i = s.n - 2;
    const double t = pos - i;
    // Cubic Hermite basis on the knot interval.
    const double t2 = t * t;
    const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    const double h10 = t * (1.0 - t) * (1.0 - t);
    const double h01 = t2 * (3.0 - 2.0 * t);
    const double h11 = t2 * (t - 1.0);
    const double h = 1.0 / s.inv_h;
    Controls out;
    out.pi_rel = h00 * s.pi[i] + h * h10 * s.dpi[i] + h01 * s.pi[i + 1] + h * h11 * s.dpi[i + 1];
    if (s.c.empty()) {
        out.c_rel = s.c_const;
        out.u_rel = s.u_const;
    } else {
        out.c_rel = h00 * s.c[i] + h * h10 * s.dc[i] + h01 * s.c[i + 1] + h * h11 * s.dc[i + 1];
        out.u_rel = h00 * s.u[i] + h * h10 * s.du[i] + h01 * s.u[i + 1] + h * h11 * s.du[i + 1];
    }
    return out;
}

PolicyTable::Controls PolicyTable::eval(double w) const {
    if (w < 0.0) w = 0.0;
    if (w > w_star_) w = w_star_;
    if (w <= w_alpha_) return eval_segment(segments_[0], w);
    if (has_mid_ && w < w_one_) return eval_segment(segments_[1], w);
    return eval_segment(segments_[2], w);
}

PathResult simulate_path(const SimConfig& cfg, const FreeBoundarySolution& fb,
                         const ValidatedParams& vp, std::uint64_t path_seed,
                         const PolicyTable* table, std::vector<TracePoint>* trace) {
    require_valid(cfg);
    std::optional<PolicyTable> local_table;
    if (!table) local_table.emplace(fb, vp);
    const PolicyTable& tab = table ? *table : *local_table;

    const double p = vp.p();
    const double mu = vp.mu();
    const double sig = vp.sigma() * cfg.vol_scale;
    const double del = vp.delta();
    const double ws = fb.w_star;
    const double dt = cfg.dt;
    const double sqrt_dt = std::sqrt(dt);
    const double disc_step = std::exp(-del * dt);
    const long n_steps = static_cast<long>(std::ceil(cfg.horizon / dt - 1e-9));

    NormalSampler normal{path_stream(cfg.seed, path_seed)};

    PathResult res;
    double x = cfg.x0;
    double z = cfg.z0;
    // The peak can jump only at t = 0, and only when the state starts above
    // the reflecting line.
    if (x > ws * z) {
        z = x / ws;
        ++res.n_peak_increases;
    }
    double z_pow = std::pow(z, 1.0 - p);
    double disc = 1.0;
    double util = 0.0; // sum of disc * c_rel^{1-p} * z^{1-p}
    double t = 0.0;
    res.ruin_time = kInf;

    for (long i = 0; i < n_steps; ++i) {
        const double w = x / z;
        const PolicyTable::Controls ctl = tab.eval(w);
        const double pi = z * ctl.pi_rel;
        const double c = z * ctl.c_rel;
        if (trace) trace->push_back({t, x, z, c, pi});
        const double u_step = disc * z_pow * ctl.u_rel;
        util += u_step;

        const double x_prev = x;
        x += (mu * pi - c) * dt + sig * pi * sqrt_dt * normal.next();
        if (!std::isfinite(x)) {
            res.aborted = true;
            break;
        }
        if (x <= 0.0) {
            // Linear interpolation of the crossing inside the step; the
            // utility of the partial step scales the same way.
            const double theta = x_prev / (x_prev - x);
            util -= u_step * (1.0 - theta);
            res.ruin_time = t + theta * dt;
            x = 0.0;
            break;
        }
        if (x > ws * z) {
            const double overshoot = (x - ws * z) / z;
            if (overshoot > res.max_overshoot) res.max_overshoot = overshoot;
            z = x / ws;
            z_pow = std::pow(z, 1.0 - p);
            ++res.n_peak_increases;
        }
        t += dt;
        disc *= disc_step;
    }

    res.discounted_utility = util * dt / (1.0 - p);
    res.peak_final = z;
    res.terminal_x = x;
    return res;
}

MCEstimate monte_carlo(const SimConfig& cfg, const FreeBoundarySolution& fb,
                       const ValidatedParams& vp) {
    require_valid(cfg);
    const PolicyTable table(fb, vp);

    std::vector<PathResult> results(static_cast<size_t>(cfg.n_paths));
    int n_threads = cfg.n_threads > 0 ? cfg.n_threads
                                      : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    n_threads = static_cast<int>(std::min<long>(n_threads, cfg.n_paths));

    auto worker = [&](long begin, long end) {
        for (long k = begin; k < end; ++k)
            results[static_cast<size_t>(k)] =
                simulate_path(cfg, fb, vp, static_cast<std::uint64_t>(k), &table);
    };
    if (n_threads == 1) {
        worker(0, cfg.n_paths);
    } else {
        std::vector<std::thread> pool;
        const long chunk = (cfg.n_paths + n_threads - 1) / n_threads;
        for (int tix = 0; tix < n_threads; ++tix) {
            const long begin = tix * chunk;
            const long end = std::min<long>(begin + chunk, cfg.n_paths);
            if (begin >= end) break;
            pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    MCEstimate est;
    est.analytic_value = value({cfg.x0, cfg.z0}, fb, vp);

    // Reduce in path-index order: the estimate must not depend on the
    // thread count.
    double sum = 0.0;
    double ruin_sum = 0.0;
    double trunc_sum = 0.0;
    const double disc_T = std::exp(-vp.delta() * cfg.horizon);
    for (const auto& r : results) {
        if (r.aborted) {
            ++est.n_aborted;
            continue;
        }
        ++est.n_paths;
        sum += r.discounted_utility;
        if (r.max_overshoot > est.max_overshoot) est.max_overshoot = r.max_overshoot;
        if (std::isfinite(r.ruin_time)) {
            ++est.n_ruined;
            ruin_sum += r.ruin_time;
        } else {
            ++est.n_censored;
            trunc_sum += disc_T * std::abs(value({std::max(r.terminal_x, 0.0), r.peak_final},
                                                 fb, vp));
        }
    }
    if (est.n_aborted * 1000 > cfg.n_paths) {
        std::ostringstream os;
        os << est.n_aborted << " of " << cfg.n_paths
           << " paths hit a non-finite state (> 0.1%); estimate rejected";
        throw NonFiniteState(os.str());
    }
    est.mean = est.n_paths > 0 ? sum / est.n_paths : 0.0;
    double ss = 0.0;
    for (const auto& r : results) {
        if (r.aborted) continue;
        const double d = r.discounted_utility - est.mean;
        ss += d * d;
    }
    est.stderr_ = est.n_paths > 1 ? std::sqrt(ss / (est.n_paths - 1)) /
                                        std::sqrt(static_cast<double>(est.n_paths))
                                  : 0.0;
    est.mean_ruin_time = est.n_ruined > 0
                             ? ruin_sum / est.n_ruined
                             : std::numeric_limits<double>::quiet_NaN();
    est.truncation_bound = est.n_censored > 0 ? trunc_sum / est.n_censored : 0.0;
    return est;
}

} // namespace divdraw

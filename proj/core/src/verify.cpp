#include "divdraw/verify.hpp"

#include "divdraw/dual.hpp"
#include "divdraw/policy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace divdraw {

namespace {

double dual_ode_rhs(double y, const ValidatedParams& vp) {
    const double al = vp.alpha();
    const double p = vp.p();
    const double kap = vp.kappa;
    if (y >= std::pow(al, -p)) return kap * (al * y - std::pow(al, 1.0 - p) / (1.0 - p));
    if (y > 1.0) return -kap * p / (1.0 - p) * std::pow(y, -(1.0 - p) / p);
    return kap * (y - 1.0 / (1.0 - p));
}

std::string point_str(double a, const char* name) {
    std::ostringstream os;
    os << name << "=" << a;
    return os.str();
}

std::string state_str(double x, double z) {
    std::ostringstream os;
    os << "(x=" << x << "; z=" << z << ")";
    return os.str();
}

struct Running {
    double worst = -1.0;
    std::string where;
    void update(double v, std::string w) {
        if (v > worst) {
            worst = v;
            where = std::move(w);
        }
    }
};

} // namespace

VerificationReport check_dual_ode(const FreeBoundarySolution& fb, const ValidatedParams& vp,
                                  int n) {
    const double kd = vp.kd;
    const double alpha_mp = std::pow(vp.alpha(), -vp.p());
    Running run;
    long count = 0;

    const double edges[4] = {fb.y_star, std::min(1.0, fb.y0), std::min(alpha_mp, fb.y0), fb.y0};
    const int per_region = std::max(1, n / 3);
    for (int r = 0; r < 3; ++r) {
        const double lo = edges[r], hi = edges[r + 1];
        if (!(hi - lo > 1e-12 * fb.y0)) continue; // empty band (alpha == 1)
        for (int i = 0; i < per_region; ++i) {
            const double y = lo + (hi - lo) * (i + 0.5) / per_region;
            const DualEval e = eval_dual(y, fb, vp);
            const double resid = y * y * e.uhat_yy + kd * y * e.uhat_y - kd * e.uhat -
                                 dual_ode_rhs(y, vp);
            run.update(std::abs(resid) / (1.0 + std::abs(e.uhat)), point_str(y, "y"));
            ++count;
        }
    }

    // Seam C1 matching: the homogeneous modes are invisible to the interior
    // residual, so a corrupted constant only shows up as a jump here.
    for (double seam : {1.0, alpha_mp}) {
        if (!(seam > fb.y_star && seam < fb.y0)) continue;
        const DualEval left = eval_dual(seam * (1.0 - 1e-13), fb, vp);
        const DualEval right = eval_dual(seam * (1.0 + 1e-13), fb, vp);
        if (left.region == right.region) continue;
        const double dv = std::abs(right.uhat - left.uhat) / (1.0 + std::abs(left.uhat));
        const double ds = std::abs(right.uhat_y - left.uhat_y) / (1.0 + std::abs(left.uhat_y));
        run.update(dv, point_str(seam, "seam_y"));
        run.update(ds, point_str(seam, "seam_y"));
        count += 2;
    }

    VerificationReport rep;
    rep.check_name = "dual_ode_residual";
    rep.grid_size = count;
    rep.max_violation = run.worst;
    rep.tolerance = 1e-9;
    rep.passed = run.worst <= rep.tolerance;
    rep.worst_point = run.where;
    return rep;
}

VerificationReport check_free_boundaries(const FreeBoundarySolution& fb,
                                         const ValidatedParams& vp) {
    const double p = vp.p();
    const DualEval at_y0 = eval_dual(fb.y0, fb, vp);
    const DualEval at_ys = eval_dual(fb.y_star, fb, vp);
    Running run;

    const double scale0 = 1.0 + std::abs(at_ys.uhat);
    run.update(std::abs(at_y0.uhat) / scale0, "Uhat(y0)");
    run.update(std::abs(at_y0.uhat_y) / (1.0 + fb.w_star), "Uhat_y(y0)");
    run.update(std::abs((1.0 - p) * at_ys.uhat + p * fb.y_star * at_ys.uhat_y) / scale0,
               "smooth_pasting(y*)");
    run.update(std::abs(at_ys.uhat_y + p * fb.y_star * at_ys.uhat_yy) / (1.0 + fb.w_star),
               "super_contact(y*)");
    // Consequence of the free-boundary conditions and the ODE: a closed form
    // for Uhat(y*).
    const double identity = vp.kappa * p * p / vp.q() * (1.0 / (1.0 - p) - fb.y_star);
    run.update(std::abs(at_ys.uhat - identity) / std::abs(identity), "Uhat(y*)_identity");

    VerificationReport rep;
    rep.check_name = "free_boundary_conditions";
    rep.grid_size = 5;
    rep.max_violation = run.worst;
    rep.tolerance = 1e-8;
    rep.passed = run.worst <= rep.tolerance;
    rep.worst_point = run.where;
    return rep;
}

std::vector<VerificationReport> check_comparison_conditions(const FreeBoundarySolution& fb,
                                                            const ValidatedParams& vp,
                                                            int n, int lattice_n) {
    const double p = vp.p();
    const double mu = vp.mu();
    const double sig2 = vp.sigma2();
    const double del = vp.delta();
    const double al = vp.alpha();
    const double ws = fb.w_star;

    Running vz_run, gen_run, opt_run;
    long n_states = 0, n_gen = 0, n_opt = 0;

    for (int iz = 0; iz < n; ++iz) {
        const double z = 0.5 + 1.5 * iz / std::max(1, n - 1);
        for (int ix = 0; ix < n; ++ix) {
            // w sweeps the domain interior and the band above it.
            const double w = 1.35 * ws * (ix + 0.5) / n;
            const double x = w * z;
            const StatePoint s{x, z};
            ++n_states;

            // Condition (i): central-difference V_z, scaled by z^p.
            const double hz = 1e-5 * z;
            const double vz = (value({x, z + hz}, fb, vp) - value({x, z - hz}, fb, vp)) /
                              (2.0 * hz);
            vz_run.update(vz * std::pow(z, p), state_str(x, z));

            // Analytic derivatives for the generator.
            double V, Vx, Vxx, pi_opt, c_opt, z_eff;
            if (w <= ws) {
                const DualEval e = eval_dual(invert_dual(w, fb, vp), fb, vp);
                V = std::pow(z, 1.0 - p) * (e.uhat - e.y * e.uhat_y);
                Vx = std::pow(z, -p) * e.y;
                Vxx = -std::pow(z, -1.0 - p) / e.uhat_yy;
                pi_opt = mu / sig2 * z * e.y * e.uhat_yy;
                c_opt = c_star(s, fb, vp);
                z_eff = z;
            } else {
                V = value(s, fb, vp);
                Vx = (1.0 - p) * V / x;
                Vxx = -p * Vx / x;
                pi_opt = mu / (sig2 * p) * x;
                c_opt = x / ws;
                z_eff = x / ws;
            }

            auto generator = [&](double pi, double c) {
                return 0.5 * sig2 * pi * pi * Vxx + (mu * pi - c) * Vx - del * V +
                       std::pow(c, 1.0 - p) / (1.0 - p);
            };

            // Condition (ii) over the lattice plus the analytic maximizers.
            // The dividend band is the admissible one, [alpha*z_eff, z_eff]:
            // rates above z_eff act only on a null time set (the peak
            // ratchets up immediately) and are handled by the singular
            // terms of the verification identity, not the dt-generator.
            const double pi_hi = 2.0 * mu / (sig2 * p) * ws * z_eff;
            const double c_lo = al * z_eff, c_hi = z_eff;
            const double pi_fo = -mu * Vx / (sig2 * Vxx);
            const double c_fo = std::clamp(std::pow(Vx, -1.0 / p), c_lo, c_hi);
            for (int ip = 0; ip <= lattice_n; ++ip) {
                const double pi = ip < lattice_n ? pi_hi * ip / (lattice_n - 1) : pi_fo;
                for (int ic = 0; ic <= lattice_n; ++ic) {
                    const double c =
                        ic < lattice_n ? c_lo + (c_hi - c_lo) * ic / (lattice_n - 1) : c_fo;
                    gen_run.update(generator(pi, c), state_str(x, z));
                    ++n_gen;
                }
            }

            // Equality at the optimal pair, interior of the domain only.
            if (w < ws * (1.0 - 1e-9)) {
                opt_run.update(std::abs(generator(pi_opt, c_opt)), state_str(x, z));
                ++n_opt;
            }
        }
    }

    std::vector<VerificationReport> out(3);
    out[0].check_name = "comparison_Vz";
    out[0].grid_size = n_states;
    out[0].max_violation = vz_run.worst;
    out[0].tolerance = 1e-6;
    out[0].passed = vz_run.worst <= out[0].tolerance;
    out[0].worst_point = vz_run.where;

    out[1].check_name = "comparison_generator";
    out[1].grid_size = n_gen;
    out[1].max_violation = gen_run.worst;
    out[1].tolerance = 1e-6;
    out[1].passed = gen_run.worst <= out[1].tolerance;
    out[1].worst_point = gen_run.where;

    out[2].check_name = "generator_at_optimum";
    out[2].grid_size = n_opt;
    out[2].max_violation = opt_run.worst;
    out[2].tolerance = 1e-7;
    out[2].passed = opt_run.worst <= out[2].tolerance;
    out[2].worst_point = opt_run.where;
    return out;
}

std::vector<VerificationReport> check_comparative_statics(const ValidatedParams& vp_base,
                                                          const std::vector<double>& alphas) {
    if (alphas.size() < 3) throw DomainError("comparative statics needs >= 3 alpha values");
    struct Solved {
        double alpha;
        ValidatedParams vp;
        FreeBoundarySolution fb;
    };
    std::vector<Solved> sols;
    for (double a : alphas) {
        ModelParams mp = vp_base.base;
        mp.alpha = a;
        ValidatedParams vp = validate(mp);
        sols.push_back({a, vp, solve_free_boundary(vp)});
    }

    Running ws_run, lower_run, value_run, uhat_run;
    long n_value = 0, n_uhat = 0;
    for (size_t i = 0; i + 1 < sols.size(); ++i) {
        const auto& a = sols[i];
        const auto& b = sols[i + 1];
        ws_run.update(a.fb.w_star - b.fb.w_star, point_str(b.alpha, "alpha"));
        lower_run.update(std::max(a.fb.w_alpha - b.fb.w_alpha, a.fb.w_one - b.fb.w_one),
                         point_str(b.alpha, "alpha"));

        // Value monotone in alpha at fixed states spanning both domains.
        const double wmax = std::min(a.fb.w_star, b.fb.w_star);
        for (int k = 0; k < 10; ++k) {
            const double x = 1.3 * wmax * (k + 0.5) / 10.0;
            const StatePoint s{x, 1.0};
            const double diff = value(s, b.fb, b.vp) - value(s, a.fb, a.vp);
            value_run.update(diff / (1.0 + std::abs(value(s, a.fb, a.vp))),
                             state_str(x, 1.0));
            ++n_value;
        }

        // Uhat monotone in alpha on the common dual interval.
        const double lo = std::max(a.fb.y_star, b.fb.y_star);
        const double hi = std::min(a.fb.y0, b.fb.y0);
        for (int k = 0; k < 20; ++k) {
            const double y = lo + (hi - lo) * (k + 0.5) / 20.0;
            const double diff = eval_dual(y, b.fb, b.vp).uhat - eval_dual(y, a.fb, a.vp).uhat;
            uhat_run.update(diff / (1.0 + std::abs(eval_dual(y, a.fb, a.vp).uhat)),
                            point_str(y, "y"));
            ++n_uhat;
        }
    }

    std::vector<VerificationReport> out(4);
    out[0].check_name = "w_star_increasing_in_alpha";
    out[0].grid_size = static_cast<long>(alphas.size());
    out[0].max_violation = ws_run.worst;
    out[0].tolerance = 0.0;
    out[0].passed = ws_run.worst < 0.0;
    out[0].worst_point = ws_run.where;

    out[1].check_name = "value_nonincreasing_in_alpha";
    out[1].grid_size = n_value;
    out[1].max_violation = value_run.worst;
    out[1].tolerance = 1e-9;
    out[1].passed = value_run.worst <= out[1].tolerance;
    out[1].worst_point = value_run.where;

    out[2].check_name = "uhat_nonincreasing_in_alpha";
    out[2].grid_size = n_uhat;
    out[2].max_violation = uhat_run.worst;
    out[2].tolerance = 1e-9;
    out[2].passed = uhat_run.worst <= out[2].tolerance;
    out[2].worst_point = uhat_run.where;

    // Proven only for w_star; the figures indicate the same for the other
    // two boundaries, so keep it soft.
    out[3].check_name = "soft_lower_boundaries_increasing_in_alpha";
    out[3].grid_size = static_cast<long>(alphas.size());
    out[3].max_violation = lower_run.worst;
    out[3].tolerance = 0.0;
    out[3].passed = lower_run.worst < 0.0;
    out[3].worst_point = lower_run.where;
    out[3].hard = false;
    return out;
}

VerificationReport soft_check_policy_slopes(const FreeBoundarySolution& fb,
                                            const ValidatedParams& vp, int n) {
    Running run;
    const double h = fb.w_star / (4.0 * n);
    for (int i = 0; i < n; ++i) {
        const double w = fb.w_star * (i + 0.5) / n;
        const double x_lo = std::max(0.0, w - h), x_hi = std::min(fb.w_star, w + h);
        const double dpi = (pi_star({x_hi, 1.0}, fb, vp) - pi_star({x_lo, 1.0}, fb, vp)) /
                           (x_hi - x_lo);
        const double dc = (c_star({x_hi, 1.0}, fb, vp) - c_star({x_lo, 1.0}, fb, vp)) /
                          (x_hi - x_lo);
        run.update(std::abs(dpi), state_str(w, 1.0));
        run.update(std::abs(dc), state_str(w, 1.0));
    }
    VerificationReport rep;
    rep.check_name = "soft_policy_slope_bound";
    rep.grid_size = 2L * n;
    rep.max_violation = run.worst;
    rep.tolerance = 1e6; // diagnostic only: report the Lipschitz-scale bound
    rep.passed = std::isfinite(run.worst) && run.worst <= rep.tolerance;
    rep.worst_point = run.where;
    rep.hard = false;
    return rep;
}

std::vector<VerificationReport> run_verification(const ValidatedParams& vp,
                                                 const FreeBoundarySolution& fb,
                                                 const VerifySuiteOptions& opt) {
    std::vector<VerificationReport> out;
    out.push_back(check_dual_ode(fb, vp, opt.ode_grid));
    out.push_back(check_free_boundaries(fb, vp));
    for (auto& r : check_comparison_conditions(fb, vp, opt.state_grid, opt.control_lattice))
        out.push_back(std::move(r));
    for (auto& r : check_comparative_statics(vp, opt.alphas)) out.push_back(std::move(r));
    out.push_back(soft_check_policy_slopes(fb, vp, 200));
    return out;
}

bool all_hard_passed(const std::vector<VerificationReport>& reports) {
    for (const auto& r : reports)
        if (r.hard && !r.passed) return false;
    return true;
}

} // namespace divdraw

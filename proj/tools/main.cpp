// divdraw — free boundaries, value function, optimal feedback policies and
// Monte Carlo verification for the dividend problem with a drawdown
// constraint on the dividend rate.
//
// Subcommands: solve, eval, sweep, simulate, verify. Output is CSV with
// '#'-comment manifest headers; see README.

#include "divdraw/dual.hpp"
#include "divdraw/errors.hpp"
#include "divdraw/fbp.hpp"
#include "divdraw/format.hpp"
#include "divdraw/model.hpp"
#include "divdraw/policy.hpp"
#include "divdraw/simulate.hpp"
#include "divdraw/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr const char* kVersion = "0.1.0";

using divdraw::fmt_double;

std::string iso8601_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Output {
    std::ofstream file;
    std::ostream* os = &std::cout;
    void open(const std::string& path) {
        if (path.empty()) return;
        file.open(path);
        if (!file) throw divdraw::DomainError("cannot open output file: " + path);
        os = &file;
    }
    std::ostream& stream() { return *os; }
};

void write_manifest(std::ostream& os, const std::string& subcommand,
                    const divdraw::ValidatedParams& vp, const std::uint64_t* seed) {
    os << "# tool: divdraw " << kVersion << "\n";
    os << "# subcommand: " << subcommand << "\n";
    os << "# params: mu=" << fmt_double(vp.mu()) << " sigma=" << fmt_double(vp.sigma())
       << " delta=" << fmt_double(vp.delta()) << " alpha=" << fmt_double(vp.alpha())
       << " p=" << fmt_double(vp.p()) << " kappa=" << fmt_double(vp.kappa)
       << " kd=" << fmt_double(vp.kd) << " p_lower=" << fmt_double(vp.p_lower) << "\n";
    if (seed) os << "# seed: " << *seed << "\n";
    os << "# timestamp: " << iso8601_now() << "\n";
}

void run_solve(std::ostream& os, const divdraw::ValidatedParams& vp) {
    write_manifest(os, "solve", vp, nullptr);
    if (vp.branch == divdraw::AlphaBranch::Merton) {
        const divdraw::MertonSolution m = divdraw::merton_limit(vp);
        const double ws_limit = vp.kappa * vp.p() * vp.p() / vp.q();
        os << "value_coeff,pi_slope,c_slope,w_star_limit\n";
        os << fmt_double(m.value_coeff) << ',' << fmt_double(m.pi_slope) << ','
           << fmt_double(m.c_slope) << ',' << fmt_double(ws_limit) << "\n";
        os << "# alpha = 0: unconstrained limit, no free boundary;"
              " V(x) = value_coeff * x^(1-p)/(1-p)\n";
        return;
    }
    const divdraw::FreeBoundarySolution fb = divdraw::solve_free_boundary(vp);
    os << "eta_star,y_star,y0,c1,c2,c3,c4,c5,c6,w_alpha,w_one,w_star,resid1,resid2\n";
    os << fmt_double(fb.eta_star) << ',' << fmt_double(fb.y_star) << ',' << fmt_double(fb.y0)
       << ',' << fmt_double(fb.c1) << ',' << fmt_double(fb.c2) << ',' << fmt_double(fb.c3)
       << ',' << fmt_double(fb.c4) << ',' << fmt_double(fb.c5) << ',' << fmt_double(fb.c6)
       << ',' << fmt_double(fb.w_alpha) << ',' << fmt_double(fb.w_one) << ','
       << fmt_double(fb.w_star) << ',' << fmt_double(fb.resid1) << ','
       << fmt_double(fb.resid2) << "\n";
    char line[160];
    os << "#\n";
    std::snprintf(line, sizeof line, "# %-28s %-24s %-24s\n", "free boundary", "dual", "primal ratio");
    os << line;
    std::snprintf(line, sizeof line, "# %-28s y* = %-19.10g w* = %-19.10g\n",
                  "reflecting (singular)", fb.y_star, fb.w_star);
    os << line;
    std::snprintf(line, sizeof line, "# %-28s y  = 1%-18s w1 = %-19.10g\n",
                  "peak-rate onset", "", fb.w_one);
    os << line;
    std::snprintf(line, sizeof line, "# %-28s y  = alpha^-p%-11s wa = %-19.10g\n",
                  "floor-rate exit", "", fb.w_alpha);
    os << line;
    std::snprintf(line, sizeof line, "# %-28s y0 = %-19.10g (x = 0)\n",
                  "zero-surplus endpoint", fb.y0);
    os << line;
    std::snprintf(line, sizeof line, "# eta_star = %.10g, y_p = %.10g, residuals = (%.3g, %.3g)\n",
                  fb.eta_star, divdraw::find_y_p(vp), fb.resid1, fb.resid2);
    os << line;
}

void run_eval(std::ostream& os, const divdraw::ValidatedParams& vp, bool have_dual,
              double dual_y, bool have_state, double x, double z) {
    write_manifest(os, "eval", vp, nullptr);
    if (have_dual) {
        const divdraw::FreeBoundarySolution fb = divdraw::solve_free_boundary(vp);
        const divdraw::DualEval e = divdraw::eval_dual(dual_y, fb, vp);
        os << "y,region,uhat,uhat_y,uhat_yy\n";
        os << fmt_double(e.y) << ',' << divdraw::to_string(e.region) << ','
           << fmt_double(e.uhat) << ',' << fmt_double(e.uhat_y) << ','
           << fmt_double(e.uhat_yy) << "\n";
        return;
    }
    if (!have_state) throw divdraw::DomainError("eval needs --x and --z, or --dual");
    os << "x,z,region,y,value,pi,c\n";
    if (vp.branch == divdraw::AlphaBranch::Merton) {
        if (!(x >= 0.0)) throw divdraw::DomainError("state precondition x >= 0 violated");
        const divdraw::MertonSolution m = divdraw::merton_limit(vp);
        os << fmt_double(x) << ',' << fmt_double(z) << ",merton,nan,"
           << fmt_double(m.value_coeff * std::pow(x, 1.0 - vp.p()) / (1.0 - vp.p())) << ','
           << fmt_double(m.pi_slope * x) << ',' << fmt_double(m.c_slope * x) << "\n";
        return;
    }
    const divdraw::FreeBoundarySolution fb = divdraw::solve_free_boundary(vp);
    const divdraw::PolicyEval pe = divdraw::evaluate({x, z}, fb, vp);
    os << fmt_double(x) << ',' << fmt_double(z) << ',' << divdraw::to_string(pe.region) << ','
       << fmt_double(pe.y) << ',' << fmt_double(pe.value) << ',' << fmt_double(pe.pi) << ','
       << fmt_double(pe.c) << "\n";
}

void run_sweep(std::ostream& os, const divdraw::ValidatedParams& vp, const std::string& param,
               double from, double to, int steps, int x_grid) {
    write_manifest(os, "sweep", vp, nullptr);
    os << "param,param_value,w_alpha,w_one,w_star,x,value,pi,c\n";
    const int n = std::max(steps, 1);
    auto emit_state_rows = [&](const std::string& pvalue, const divdraw::FreeBoundarySolution& fb,
                               const divdraw::ValidatedParams& vpi, double wa, double wo,
                               double ws, int grid) {
        if (grid <= 0) {
            os << param << ',' << pvalue << ',' << fmt_double(wa) << ',' << fmt_double(wo)
               << ',' << fmt_double(ws) << ",,,,\n";
            return;
        }
        for (int k = 0; k < grid; ++k) {
            const double x = 1.3 * ws * (k + 0.5) / grid;
            const divdraw::PolicyEval pe = divdraw::evaluate({x, 1.0}, fb, vpi);
            os << param << ',' << pvalue << ',' << fmt_double(wa) << ',' << fmt_double(wo)
               << ',' << fmt_double(ws) << ',' << fmt_double(x) << ',' << fmt_double(pe.value)
               << ',' << fmt_double(pe.pi) << ',' << fmt_double(pe.c) << "\n";
        }
    };

    if (param == "x") {
        const divdraw::FreeBoundarySolution fb = divdraw::solve_free_boundary(vp);
        for (int i = 0; i < n; ++i) {
            const double x = n == 1 ? from : from + (to - from) * i / (n - 1);
            const divdraw::PolicyEval pe = divdraw::evaluate({x, 1.0}, fb, vp);
            os << "x," << fmt_double(x) << ',' << fmt_double(fb.w_alpha) << ','
               << fmt_double(fb.w_one) << ',' << fmt_double(fb.w_star) << ',' << fmt_double(x)
               << ',' << fmt_double(pe.value) << ',' << fmt_double(pe.pi) << ','
               << fmt_double(pe.c) << "\n";
        }
        return;
    }
    for (int i = 0; i < n; ++i) {
        const double v = n == 1 ? from : from + (to - from) * i / (n - 1);
        divdraw::ModelParams mp = vp.base;
        if (param == "alpha")
            mp.alpha = v;
        else if (param == "p")
            mp.p = v;
        else
            throw divdraw::DomainError("sweep --param must be alpha, p, or x");
        const divdraw::ValidatedParams vpi = divdraw::validate(mp);
        if (vpi.branch == divdraw::AlphaBranch::Merton) {
            // Known limits of the boundaries; no free-boundary system here.
            const double ws = vpi.kappa * vpi.p() * vpi.p() / vpi.q();
            os << param << ',' << fmt_double(v) << ",0," << fmt_double(ws) << ','
               << fmt_double(ws) << ",,,,\n";
            continue;
        }
        const divdraw::FreeBoundarySolution fb = divdraw::solve_free_boundary(vpi);
        emit_state_rows(fmt_double(v), fb, vpi, fb.w_alpha, fb.w_one, fb.w_star, x_grid);
    }
}

void run_simulate(std::ostream& os, const divdraw::ValidatedParams& vp,
                  const divdraw::SimConfig& cfg, int trace_paths) {
    write_manifest(os, "simulate", vp, &cfg.seed);
    if (vp.branch == divdraw::AlphaBranch::Merton)
        throw divdraw::DomainError(
            "simulate needs alpha in (0,1]; the unconstrained limit has no peak process"
            " (use a small alpha such as 1e-4 to approximate it)");
    const divdraw::FreeBoundarySolution fb = divdraw::solve_free_boundary(vp);
    const divdraw::MCEstimate est = divdraw::monte_carlo(cfg, fb, vp);
    os << "x0,z0,dt,horizon,paths,seed,mean,stderr,analytic_value,abs_error,n_ruined,"
          "n_censored,n_aborted,mean_ruin_time,truncation_bound,max_overshoot\n";
    os << fmt_double(cfg.x0) << ',' << fmt_double(cfg.z0) << ',' << fmt_double(cfg.dt) << ','
       << fmt_double(cfg.horizon) << ',' << cfg.n_paths << ',' << cfg.seed << ','
       << fmt_double(est.mean) << ',' << fmt_double(est.stderr_) << ','
       << fmt_double(est.analytic_value) << ','
       << fmt_double(std::abs(est.mean - est.analytic_value)) << ',' << est.n_ruined << ','
       << est.n_censored << ',' << est.n_aborted << ',' << fmt_double(est.mean_ruin_time)
       << ',' << fmt_double(est.truncation_bound) << ',' << fmt_double(est.max_overshoot)
       << "\n";
    if (trace_paths > 0) {
        os << "# trace: first " << trace_paths << " paths\n";
        os << "path,t,x,z,c,pi\n";
        const divdraw::PolicyTable table(fb, vp);
        for (int k = 0; k < trace_paths; ++k) {
            std::vector<divdraw::TracePoint> trace;
            divdraw::simulate_path(cfg, fb, vp, static_cast<std::uint64_t>(k), &table, &trace);
            for (const auto& pt : trace) {
                os << k << ',' << fmt_double(pt.t) << ',' << fmt_double(pt.x) << ','
                   << fmt_double(pt.z) << ',' << fmt_double(pt.c) << ',' << fmt_double(pt.pi)
                   << "\n";
            }
        }
    }
}

int run_verify(std::ostream& os, const divdraw::ValidatedParams& vp,
               const divdraw::VerifySuiteOptions& opt) {
    write_manifest(os, "verify", vp, nullptr);
    const divdraw::FreeBoundarySolution fb = divdraw::solve_free_boundary(vp);
    const auto reports = divdraw::run_verification(vp, fb, opt);
    os << "check_name,grid_size,max_violation,tolerance,passed,hard,worst_point\n";
    for (const auto& r : reports) {
        os << r.check_name << ',' << r.grid_size << ',' << fmt_double(r.max_violation) << ','
           << fmt_double(r.tolerance) << ',' << (r.passed ? "true" : "false") << ','
           << (r.hard ? "hard" : "soft") << ',' << r.worst_point << "\n";
    }
    return divdraw::all_hard_passed(reports) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal dividends under a drawdown constraint: semi-explicit solver, "
                 "policy evaluation, certification checks and Monte Carlo simulation"};
    app.fallthrough();
    app.set_config("--config", "", "flat key=value parameter file (keys: mu sigma delta alpha p)");

    divdraw::ModelParams mp;
    app.add_option("--mu", mp.mu, "drift of excess return")->capture_default_str();
    app.add_option("--sigma", mp.sigma, "volatility")->capture_default_str();
    app.add_option("--delta", mp.delta, "subjective discount rate")->capture_default_str();
    app.add_option("--alpha", mp.alpha, "drawdown fraction in [0,1]")->capture_default_str();
    app.add_option("--p", mp.p, "relative risk aversion")->capture_default_str();
    std::string out_path;
    app.add_option("--out", out_path, "write output to FILE instead of stdout");
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = all cores); any value gives identical numbers");

    app.add_subcommand("solve", "solve the free-boundary system and print the solution row");

    auto* cmd_eval = app.add_subcommand("eval", "evaluate the policy at a state or the dual function at y");
    double eval_x = 0.0, eval_z = 1.0, eval_dual_y = 0.0;
    auto* opt_x = cmd_eval->add_option("--x", eval_x, "surplus");
    cmd_eval->add_option("--z", eval_z, "historical peak dividend rate")->capture_default_str();
    auto* opt_dual = cmd_eval->add_option("--dual", eval_dual_y, "evaluate the dual function at this y");

    auto* cmd_sweep = app.add_subcommand("sweep", "sweep a parameter and emit boundary/policy CSV");
    std::string sweep_param;
    double sweep_from = 0.1, sweep_to = 0.9;
    int sweep_steps = 9, sweep_xgrid = 0;
    cmd_sweep->add_option("--param", sweep_param, "alpha | p | x")->required();
    cmd_sweep->add_option("--from", sweep_from, "start value")->required();
    cmd_sweep->add_option("--to", sweep_to, "end value")->required();
    cmd_sweep->add_option("--steps", sweep_steps, "number of sweep points")->required();
    cmd_sweep->add_option("--x-grid", sweep_xgrid, "emit V/pi/c on this many x points per sweep value");

    auto* cmd_sim = app.add_subcommand("simulate", "Monte Carlo of the optimally controlled surplus");
    divdraw::SimConfig cfg;
    int trace_paths = 0;
    cmd_sim->add_option("--x0", cfg.x0, "initial surplus")->capture_default_str();
    cmd_sim->add_option("--z0", cfg.z0, "initial historical peak")->capture_default_str();
    cmd_sim->add_option("--dt", cfg.dt, "time step")->capture_default_str();
    cmd_sim->add_option("--horizon", cfg.horizon, "truncation time T")->capture_default_str();
    cmd_sim->add_option("--paths", cfg.n_paths, "number of paths")->capture_default_str();
    cmd_sim->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
    cmd_sim->add_option("--trace", trace_paths, "also write the first k paths as CSV");

    auto* cmd_verify = app.add_subcommand("verify", "run the numerical certification suite");
    divdraw::VerifySuiteOptions vopt;
    cmd_verify->add_option("--grid", vopt.state_grid, "state grid size per axis")->capture_default_str();
    cmd_verify->add_option("--ode-grid", vopt.ode_grid, "dual ODE residual grid")->capture_default_str();

    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints the synopsis
        return 2;
    }

    try {
        const divdraw::ValidatedParams vp = divdraw::validate(mp);
        Output out;
        out.open(out_path);
        cfg.n_threads = threads;
        if (app.got_subcommand("solve")) {
            run_solve(out.stream(), vp);
        } else if (app.got_subcommand(cmd_eval)) {
            run_eval(out.stream(), vp, opt_dual->count() > 0, eval_dual_y, opt_x->count() > 0,
                     eval_x, eval_z);
        } else if (app.got_subcommand(cmd_sweep)) {
            run_sweep(out.stream(), vp, sweep_param, sweep_from, sweep_to, sweep_steps,
                      sweep_xgrid);
        } else if (app.got_subcommand(cmd_sim)) {
            run_simulate(out.stream(), vp, cfg, trace_paths);
        } else if (app.got_subcommand(cmd_verify)) {
            return run_verify(out.stream(), vp, vopt);
        }
    } catch (const divdraw::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

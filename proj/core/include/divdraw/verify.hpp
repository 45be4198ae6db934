#pragma once

#include "divdraw/fbp.hpp"
#include "divdraw/model.hpp"

#include <string>
#include <vector>

namespace divdraw {

/// Outcome of one numerical certification check.
struct VerificationReport {
    std::string check_name;
    long grid_size = 0;
    double max_violation = 0.0;
    double tolerance = 0.0;
    bool passed = false; ///< max_violation <= tolerance
    std::string worst_point;
    bool hard = true; ///< soft checks report but never gate the exit code
};

/// Residual of the dual linear ODE on an n-point grid over the region
/// interiors, |y^2 Uhat_yy + kd y Uhat_y - kd Uhat - rhs(y)| / (1 + |Uhat|),
/// plus the C1 matching mismatch at the two seams (a corrupted integration
/// constant shifts a homogeneous mode, which the interior residual cannot
/// see; the seam jump catches it). Pass tolerance 1e-9.
VerificationReport check_dual_ode(const FreeBoundarySolution& fb, const ValidatedParams& vp,
                                  int n);

/// The four scalar free-boundary conditions (value matching and slope at
/// y0, smooth pasting and super contact at y_star), each scaled by
/// 1 + |magnitude|, plus the closed-form identity for Uhat(y_star).
/// Tolerance 1e-8.
VerificationReport check_free_boundaries(const FreeBoundarySolution& fb,
                                         const ValidatedParams& vp);

/// The two comparison-lemma conditions on an n x n state grid covering the
/// domain and the band above it, reported as three rows:
///  - "comparison_Vz": central-difference V_z <= 1e-6 (scaled by z^p);
///  - "comparison_generator": HJB generator over a control lattice
///    (lattice_n x lattice_n) spanning pi in [0, 2*pi_max] and the
///    admissible dividend band c in [alpha*z_eff, z_eff], analytic
///    maximizers included, <= 1e-6;
///  - "generator_at_optimum": |generator| at (pi*, c*) inside the domain
///    <= 1e-7 (the HJB holds with equality there).
std::vector<VerificationReport> check_comparison_conditions(const FreeBoundarySolution& fb,
                                                            const ValidatedParams& vp,
                                                            int n, int lattice_n = 21);

/// Comparative statics across an alpha grid (>= 3 sorted values in (0,1]):
/// w_star strictly increasing; V(x,z) non-increasing in alpha at fixed
/// sample states; Uhat(y) non-increasing in alpha at fixed y in the common
/// dual domain. Also emits the soft "lower boundaries increasing" check
/// (observed in the figures but only proven for w_star).
std::vector<VerificationReport> check_comparative_statics(const ValidatedParams& vp_base,
                                                          const std::vector<double>& alphas);

/// Soft diagnostic: bounded finite-difference slopes of pi* and c* in x
/// (the Lipschitz property); reported, never gating.
VerificationReport soft_check_policy_slopes(const FreeBoundarySolution& fb,
                                            const ValidatedParams& vp, int n);

struct VerifySuiteOptions {
    int ode_grid = 300;
    int state_grid = 50;
    int control_lattice = 21;
    std::vector<double> alphas = {0.1, 0.3, 0.5, 0.7, 0.9};
};

/// The full certification suite; deterministic given (params, options).
std::vector<VerificationReport> run_verification(const ValidatedParams& vp,
                                                 const FreeBoundarySolution& fb,
                                                 const VerifySuiteOptions& opt = {});

/// True iff every hard check in the list passed.
bool all_hard_passed(const std::vector<VerificationReport>& reports);

} // namespace divdraw

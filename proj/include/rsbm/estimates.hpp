#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rsbm/environment.hpp"
#include "rsbm/norms.hpp"
#include "rsbm/pam_solver.hpp"

namespace rsbm {

// 28 max{1 / min_i((n - x_i)^2, (n + x_i)^2), sqrt(g_sup)} inside P_n.
double barrier_bound(double x, double y, double n, double g_sup);

struct BarrierReport {
  double n = 0.0;
  double g_sup = 0.0;
  long long points_checked = 0;
  long long violations = 0;
  double worst_ratio = 0.0;   // max u / bound
  double worst_margin = 0.0;  // min bound - u
  double u_sup = 0.0;
};

// u must solve (d_t - Lap) u = -u^2 + g from zero initial data; checked at
// every stored time on grid points strictly inside P_n.
BarrierReport barrier_check(const SpaceTimeField& u, const Field& g, double n, double tolerance = 1e-8);

// Smooth non-negative forcing: a sum of random Gaussian bumps centred in P_{n+1}.
Field random_smooth_forcing(const GridSpec& grid, double n, std::uint64_t seed);

struct InteriorRow {
  double m = 0.0;
  double l = 0.0;
  double box_radius = 0.0;
  double interior_sup = 0.0;
  double rhs = 0.0;  // max{1/l^2, noise terms}
  double ratio = 0.0;
};

struct InteriorReport {
  double n = 0.0;
  double source_free_radius = 0.0;
  double kappa = 0.0;
  bool noise = false;
  NoiseNorms noise_norms;
  double noise_term = 0.0;  // max over trees of ||tau||^{2/(n_tau (1 - eps))}
  std::vector<InteriorRow> rows;
  double fitted_slope = 0.0;     // log sup vs log l at the largest m
  double m_variation = 0.0;      // relative change at the largest l between the last two m
  double required_constant = 0.0;
  bool nested = true;
};

struct InteriorOptions {
  double kappa = 1000.0;
  double horizon = 4.0;
  double dt = 2e-3;
  std::vector<double> l_values{1, 2, 4};
  std::vector<double> m_values{1e2, 1e3, 1e4};
};

// The forcing phi^m_{n-2} leaves P_{n-2} source free; boxes P_{n-2-l} are
// measured against max{1/l^2, noise terms} on P_{n-2}. env == nullptr runs
// without the potential.
InteriorReport interior_bound_check(const MollifierKit& kit, const Environment* env, double n,
                                    const InteriorOptions& options);

// Least-squares slope of log y against log x.
double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ShrinkStep {
  double radius = 0.0;
  double sup = 0.0;
  double scaled = 0.0;  // sup * radius^2
};

struct ShrinkTrace {
  double C0 = 0.0;
  double c0 = 0.0;
  std::vector<ShrinkStep> steps;
  double scaled_min = 0.0;
  double scaled_max = 0.0;
  double worst_halving = 0.0;  // max sup(R_{i+1}) / sup(R_i)
  bool stopped_by_threshold = false;
};

// box_sup(R) = ||u||_{C_T P_{n-R}}. R_{i+1} = R_i + 2 C0 box_sup(R_i)^{-1/2}
// until R exceeds n or box_sup drops below c0.
ShrinkTrace shrink_iteration(const std::function<double(double)>& box_sup, double c0, double C0, double n,
                             double R0);

// Smallest C0 for which every step of size 2 C0 sup^{-1/2} at least halves the
// sup, scanned on R in [R0, n) with step dR.
double fit_shrink_constant(const std::function<double(double)>& box_sup, double n, double R0, double dR);

// U(x, xbar) = u(xbar) - u(x) - u(x)(I xi(xbar) - I xi(x)) on base points of
// the region (every `stride` cells) times the offsets within r.
TwoVariableField build_U_field(const Field& u, const Field& I_xi, const Box& region, double r, int stride = 1);

struct GradientCase {
  double ball_radius = 0.0;
  double gradient_sup = 0.0;    // on the half ball
  double oscillation = 0.0;     // inf over constants of sup |u - c| on the ball
  double constant = 0.0;        // gradient_sup * radius / oscillation
};

struct GradientReport {
  std::vector<GradientCase> cases;
  double k_min = 0.0;
  double k_max = 0.0;
};

// Heat solutions with zero initial data on B(0, L), driven by random sources
// placed outside the ball, for every ball radius L.
GradientReport heat_gradient_check(const GridSpec& grid, const std::vector<double>& radii, int draws,
                                   double horizon, double dt, std::uint64_t seed);

}  // namespace rsbm

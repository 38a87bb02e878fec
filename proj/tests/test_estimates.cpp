#include <cmath>

#include "doctest.h"
#include "rsbm/cutoffs.hpp"
#include "rsbm/environment.hpp"
#include "rsbm/errors.hpp"
#include "rsbm/estimates.hpp"
#include "rsbm/norms.hpp"

using namespace rsbm;

namespace {

SpaceTimeField solve_free(const GridSpec& g, double kappa, const Field& forcing, double T, double dt, bool implicit = false) {
  SolveOptions so;
  so.dt = dt;
  so.implicit_absorption = implicit;
  so.store_every = std::max(1, int(T / dt) / 40);
  return solve_imex(make_free_problem(g, kappa, Field(g), forcing, T), so);
}

}  // namespace

TEST_CASE("barrier bound closed form") {
  CHECK(barrier_bound(0.0, 0.0, 4.0, 1.0) == doctest::Approx(28.0));
  CHECK(barrier_bound(3.0, 0.0, 4.0, 0.0) == doctest::Approx(28.0));
  CHECK(barrier_bound(0.0, 0.0, 4.0, 0.0) == doctest::Approx(28.0 / 16.0));
}

TEST_CASE("zero data stays zero under the barrier") {
  const GridSpec g{16.0, 128, Boundary::periodic};
  const SpaceTimeField u = solve_free(g, 2.0, Field(g), 0.5, 1e-2);
  CHECK(u.sup() == 0.0);
  const BarrierReport r = barrier_check(u, Field(g), 4.0);
  CHECK(r.violations == 0);
  CHECK(r.points_checked > 0);
}

TEST_CASE("unit forcing is capped by the square root of its sup") {
  const GridSpec g{16.0, 128, Boundary::periodic};
  // kappa = 2 makes the absorption u^2, so the ODE cap is sqrt(g) = 1
  const SpaceTimeField u = solve_free(g, 2.0, Field(g, 1.0), 1.0, 1e-3);
  CHECK(u.sup() <= 1.0);
  const BarrierReport r = barrier_check(u, Field(g, 1.0), 4.0);
  CHECK(r.violations == 0);
  CHECK(r.g_sup == 1.0);
}

TEST_CASE("barrier check refuses negative solutions") {
  const GridSpec g{16.0, 64, Boundary::periodic};
  SpaceTimeField u;
  u.grid = g;
  u.times = {0.0};
  u.values = {Field(g, -1.0)};
  CHECK_THROWS_AS(barrier_check(u, Field(g), 4.0), InvalidInputError);
}

TEST_CASE("random forcing is non-negative and seed-determined") {
  const GridSpec g{16.0, 128, Boundary::periodic};
  const Field a = random_smooth_forcing(g, 4.0, 3), b = random_smooth_forcing(g, 4.0, 3);
  CHECK(a.min() >= 0.0);
  CHECK((a - b).max_abs() == 0.0);
}

TEST_CASE("log slope fit") {
  CHECK(fit_log_slope({1, 2, 4}, {1, 0.25, 1.0 / 16}) == doctest::Approx(-2.0));
  CHECK_THROWS_AS(fit_log_slope({1}, {1}), InvalidInputError);
}

TEST_CASE("shrink trace of a constant has constant increments") {
  const double c = 4.0, C0 = 0.3;
  const ShrinkTrace t = shrink_iteration([&](double) { return c; }, 0.0, C0, 5.0, 0.5);
  REQUIRE(t.steps.size() >= 3);
  for (std::size_t k = 1; k < t.steps.size(); ++k)
    CHECK(t.steps[k].radius - t.steps[k - 1].radius == doctest::Approx(2 * C0 / std::sqrt(c)));
}

TEST_CASE("shrink trace of a boundary layer halves and keeps sup R^2 bounded") {
  const GridSpec g{8.0, 128, Boundary::periodic};
  const double n = 2.0;
  const SpaceTimeField u = solve_free(g, 1000.0, annulus_forcing(g, n, 1e3), 1.0, 2e-3, true);
  auto box_sup = [&](double R) { return u.sup_on(Box{n - R}); };
  const double C0 = fit_shrink_constant(box_sup, n, 0.25, g.spacing());
  const ShrinkTrace t = shrink_iteration(box_sup, 0.0, C0, n, 0.25);
  REQUIRE(t.steps.size() >= 3);
  CHECK(t.worst_halving <= 0.5 + 1e-2);
  CHECK(t.scaled_max <= 10.0 * t.scaled_min);
}

TEST_CASE("two-variable field reduces to increments without noise") {
  const GridSpec g{8.0, 128, Boundary::periodic};
  const Field u = Field::from_function(g, [](double x, double y) { return std::exp(-x * x - 0.5 * y * y); });
  const TwoVariableField U = build_U_field(u, Field(g), Box{1.0}, 0.5, 8);
  double worst = 0.0;
  for (std::size_t b = 0; b < U.base_points.size(); ++b)
    for (std::size_t s = 0; s < U.offsets.size(); ++s) {
      const auto [i, j] = U.base_points[b];
      const auto [a, c] = U.offsets[s];
      worst = std::max(worst, std::abs(U.at(b, s) - (u(i + a, j + c) - u(i, j))));
    }
  CHECK(worst == 0.0);
}

TEST_CASE("two-variable field of a constant is minus the lifted increment") {
  const GridSpec g{8.0, 128, Boundary::periodic};
  const MollifierKit kit(g);
  const Field ixi = compute_I_xi(kit.mollify(sample_white_noise(g, 4), 0.25));
  const double c = 1.5;
  const TwoVariableField U = build_U_field(Field(g, c), ixi, Box{1.0}, 0.5, 8);
  const double h = g.spacing();
  double worst = 0.0, grad = 0.0;
  for (std::size_t b = 0; b < U.base_points.size(); ++b) {
    const auto [i, j] = U.base_points[b];
    for (std::size_t s = 0; s < U.offsets.size(); ++s) {
      const auto [a, d] = U.offsets[s];
      worst = std::max(worst, std::abs(U.at(b, s) + c * (ixi(i + a, j + d) - ixi(i, j))));
    }
    const double gx = (ixi(i + 1, j) - ixi(i - 1, j)) / (2 * h), gy = (ixi(i, j + 1) - ixi(i, j - 1)) / (2 * h);
    grad = std::max({grad, std::abs(U.gradient[b][0] + c * gx), std::abs(U.gradient[b][1] + c * gy)});
  }
  CHECK(worst < 1e-12);
  CHECK(grad < 1e-9);
}

TEST_CASE("scaled two-variable seminorm stays bounded across window sizes") {
  const GridSpec g{8.0, 256, Boundary::periodic};
  const MollifierKit kit(g);
  EnvironmentOptions eo;
  eo.alpha = 0.125;
  const Environment env = make_environment(kit, 8, eo);
  SolveOptions so;
  so.dt = 0.5 / env.potential().max_abs();
  so.store_every = 1 << 30;
  const Field u0 = Field::from_function(g, [](double x, double y) { return std::exp(-(x * x + y * y)); });
  const Field u = solve_imex(make_problem(env, 1.0, u0, Field(), 0.2), so).final_slice();
  const double domain = 2.0;
  const NoiseNorms nn = noise_norms(kit, env, domain);
  const double rhs = (1.0 + nn.xi + nn.xiX + nn.IxiXi) * u.max_abs_on(Box{domain});
  std::vector<double> scaled;
  for (double d : {0.25, 0.5, 1.0}) {
    const TwoVariableField U = build_U_field(u, env.I_xi, Box{domain - d}, d, 4);
    scaled.push_back(std::pow(d, 2 - 2 * env.epsilon) * two_variable_holder(U, 2 - 2 * env.epsilon, d).value / rhs);
  }
  MESSAGE("scaled ", scaled[0], " ", scaled[1], " ", scaled[2]);
  for (double v : scaled) CHECK(v <= 2.0);
}

TEST_CASE("zero forcing gives zero gradient case") {
  const GridSpec g{16.0, 64, Boundary::periodic};
  CHECK(solve_free(g, 0.0, Field(g), 0.5, 1e-2).sup() == 0.0);
}

TEST_CASE("gradient constant is stable across ball radii") {
  const GridSpec g{32.0, 256, Boundary::periodic};
  // parabolic scaling: the horizon grows like the radius squared
  std::vector<double> kmin, kmax, kmean;
  for (double L : {2.0, 4.0}) {
    const GradientReport r = heat_gradient_check(g, {L}, 6, 0.5 * L * L, 1e-2, 5);
    REQUIRE(r.cases.size() == 6);
    double m = 0.0;
    for (const auto& c : r.cases) m += c.constant / 6;
    kmin.push_back(r.k_min);
    kmax.push_back(r.k_max);
    kmean.push_back(m);
  }
  MESSAGE("K ranges [", kmin[0], ", ", kmax[0], "] and [", kmin[1], ", ", kmax[1], "]");
  CHECK(std::max(kmax[0], kmax[1]) <= 2.0 * std::min(kmin[0], kmin[1]));
  CHECK(kmean[1] == doctest::Approx(kmean[0]).epsilon(0.25));
}

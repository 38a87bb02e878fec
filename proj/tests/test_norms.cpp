#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rsbm/environment.hpp"
#include "rsbm/errors.hpp"
#include "rsbm/norms.hpp"
#include "rsbm/weights.hpp"

using namespace rsbm;

namespace {

const GridSpec kUnit{4.0, 64, Boundary::periodic};

}  // namespace

TEST_CASE("negative seminorm of a constant is attained at the largest scale") {
  const GridSpec g{8.0, 128, Boundary::periodic};
  const MollifierKit kit(g);
  const NormReport r = neg_holder_seminorm(kit, Field(g, -2.5), -0.7, Box{2.0});
  CHECK(r.value == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(r.argmax_scale == 1.0);
}

TEST_CASE("white-noise seminorm is stable under refinement") {
  std::vector<double> values;
  for (int n : {256, 512}) {
    const GridSpec g{8.0, n, Boundary::periodic};
    const MollifierKit kit(g);
    double mean = 0.0;
    for (int s = 0; s < 4; ++s) mean += neg_holder_seminorm(kit, sample_white_noise(g, derive_seed(31, s)), -1.1, Box{2.0}).value;
    values.push_back(mean / 4);
  }
  CHECK(values[1] == doctest::Approx(values[0]).epsilon(0.15));
}

TEST_CASE("polynomial weight can only lower the seminorm") {
  const GridSpec g{8.0, 128, Boundary::periodic};
  const MollifierKit kit(g);
  const Field xi = sample_white_noise(g, 2);
  const double plain = neg_holder_seminorm(kit, xi, -1.1, Box{3.0}).value;
  const double weighted = neg_holder_seminorm(kit, xi, -1.1, Box{3.0}, Weight::polynomial(6.0)).value;
  CHECK(weighted <= plain);
}

TEST_CASE("Holder seminorm of a linear function matches brute force") {
  const Field f = Field::from_function(kUnit, [](double x, double) { return x; });
  const double alpha = 0.9, r = 1.0;
  const NormReport rep = holder_seminorm(f, alpha, Box{1.0}, r);
  const IndexRange ir = box_indices(kUnit, 1.0);
  const double h = kUnit.spacing();
  double expected = 0.0;
  for (int j = ir.lo; j <= ir.hi; ++j)
    for (int i = ir.lo; i <= ir.hi; ++i)
      for (int jb = ir.lo; jb <= ir.hi; ++jb)
        for (int ib = ir.lo; ib <= ir.hi; ++ib) {
          const double d = std::max(std::abs(ib - i), std::abs(jb - j)) * h;
          if (d == 0.0 || d > r + 1e-12) continue;
          expected = std::max(expected, std::abs(ib - i) * h / std::pow(d, alpha));
        }
  CHECK(rep.value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(holder_seminorm(Field(kUnit, 4.0), alpha, Box{1.0}, r).value == 0.0);
}

TEST_CASE("square root modulus has Holder-1/2 seminorm one") {
  const Field f = Field::from_function(kUnit, [](double x, double) { return std::sqrt(std::abs(x)); });
  CHECK(holder_seminorm(f, 0.5, Box{1.0}, 1.0).value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Besov norm of a single-block mode") {
  const GridSpec g{8.0, 256, Boundary::periodic};
  const LPDecomposition lp(g);
  const int q = 44;  // |k| = 5.5 sits where block 2 is identically one
  REQUIRE(lp.rho(2, q / g.side_length) == doctest::Approx(1.0));
  const Field f = Field::from_function(g, [&](double x, double) { return std::cos(2 * std::numbers::pi * q * x / g.side_length); });
  const double alpha = -0.4;
  CHECK(besov_norm(lp, f, alpha) == doctest::Approx(std::pow(2.0, 2 * alpha) * f.max_abs()).epsilon(1e-10));
  CHECK(besov_norm(lp, Field(g), alpha) == 0.0);
}

TEST_CASE("two-variable Holder of a quadratic and of an affine field") {
  const double r = 1.0;
  TwoVariableField u;
  u.grid = kUnit;
  u.offsets = full_stencil(kUnit, r);
  const IndexRange ir = box_indices(kUnit, 1.0);
  for (int j = ir.lo; j <= ir.hi; j += 4)
    for (int i = ir.lo; i <= ir.hi; i += 4) u.base_points.push_back({i, j});
  const double h = kUnit.spacing();
  TwoVariableField affine = u;
  for (std::size_t b = 0; b < u.base_points.size(); ++b)
    for (const auto& [a, c] : u.offsets) {
      u.values.push_back((a * h) * (a * h));
      affine.values.push_back(0.3 * a * h - 1.7 * c * h);
    }
  compute_gradient(u);
  compute_gradient(affine);
  CHECK(two_variable_holder(u, 1.8, r).value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(two_variable_holder(affine, 1.5, r).value < 1e-12);
}

TEST_CASE("time part of the space-time norm") {
  const Field g = Field::from_function(kUnit, [](double x, double y) { return std::exp(-x * x - y * y); });
  const std::vector<double> times{0.0, 0.1, 0.3, 0.5};
  std::vector<Field> still(times.size(), g), growing;
  for (double t : times) growing.push_back(g * t);
  auto unit = [](double) { return Weight{}; };
  const double alpha = 0.6;
  CHECK(space_time_norm(still, times, alpha, Box{1.0}, 0.5, unit).temporal == 0.0);
  double expected = 0.0;
  for (std::size_t a = 0; a < times.size(); ++a)
    for (std::size_t b = 0; b < a; ++b)
      expected = std::max(expected, g.max_abs_on(Box{1.0}) * (times[a] - times[b]) / std::pow(times[a] - times[b], alpha / 2));
  CHECK(space_time_norm(growing, times, alpha, Box{1.0}, 0.5, unit).temporal == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("weights parse and are admissible") {
  CHECK(Weight::parse("p:2").kind == WeightKind::polynomial);
  CHECK(Weight::parse("e:-1.5").parameter == -1.5);
  CHECK(Weight::parse("none").kind == WeightKind::unit);
  CHECK_THROWS(Weight::parse("q:1"));
  CHECK(check_admissibility(Weight::polynomial(2.0), 10.0, 2000, 1).admissible);
  CHECK(check_admissibility(Weight::exponential(-1.0), 10.0, 2000, 1).admissible);
}

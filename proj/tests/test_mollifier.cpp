#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rsbm/errors.hpp"
#include "rsbm/mollifier.hpp"
#include "rsbm/spectral.hpp"

using namespace rsbm;

namespace {

const GridSpec kGrid{8.0, 256, Boundary::periodic};

const MollifierKit& kit() {
  static const MollifierKit k(kGrid);
  return k;
}

// cosine sum of a centred even sequence, written out directly
double direct_cosine(const std::vector<double>& centred, int q) {
  const int n = int(centred.size());
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += centred[i] * std::cos(2.0 * std::numbers::pi * q * (i - n / 2) / n);
  return s;
}

}  // namespace

TEST_CASE("base bump is symmetric, peaked at the origin and supported in the half ball") {
  const SeparableKernel b = build_base_bump(kGrid);
  const Field f = b.to_field();
  const int c = kGrid.points_per_side / 2;
  CHECK(f(c, c) == doctest::Approx(f.max()));
  const double h = kGrid.spacing();
  const int off = int(std::lround(0.6 / h));
  CHECK(f(c + off, c) == 0.0);
  CHECK(f(c, c - off) == 0.0);
  double asym = 0.0;
  for (int j = 1; j < kGrid.points_per_side; ++j)
    for (int i = 1; i < kGrid.points_per_side; ++i) asym = std::max(asym, std::abs(f(i, j) - f(2 * c - i, 2 * c - j)));
  CHECK(asym == 0.0);
}

TEST_CASE("coarse grid is rejected for the bump") {
  CHECK_THROWS_AS(build_base_bump(GridSpec{8.0, 32, Boundary::periodic}), ResolutionError);
}

TEST_CASE("phi has unit mass, support in the unit ball and positive transform") {
  const SeparableKernel& phi = kit().phi();
  CHECK(phi.mass() == doctest::Approx(1.0).epsilon(1e-10));
  const Field f = phi.to_field();
  const double h = kGrid.spacing();
  double outside = 0.0;
  for (int j = 0; j < kGrid.points_per_side; ++j)
    for (int i = 0; i < kGrid.points_per_side; ++i)
      if (max_norm(kGrid.coord(i), kGrid.coord(j)) > 1.0 + 1e-12) outside = std::max(outside, std::abs(f(i, j)));
  CHECK(outside == 0.0);
  double lowest = 1.0;
  for (int q = 0; q <= kGrid.points_per_side / 2; ++q) lowest = std::min(lowest, direct_cosine(phi.factor, q) * h);
  CHECK(lowest > 0.0);
}

TEST_CASE("one level of psi is phi at half the scale") {
  const double delta = 0.5;
  const SeparableKernel psi1 = build_psi(kGrid, delta, 1);
  const std::vector<double> phi_half = scaled_phi_factor(kGrid, delta / 2);
  const Multiplier a = Multiplier::separable(kGrid, phi_half);
  const Field via_multiplier = a.apply(point_mass(kGrid));
  const Field direct = psi1.to_field();
  CHECK((direct - via_multiplier).max_abs() < 1e-10 * direct.max_abs());
}

TEST_CASE("psi transform is one at zero and the kernel is self-similar") {
  for (double delta : kit().delta_grid()) {
    const PsiFactor pf = kit().psi_factor(delta);
    CHECK(pf.factor[0] * pf.factor[0] == doctest::Approx(1.0).epsilon(1e-10));
    const Field psi = kit().psi(delta);
    if (delta / 2 < 4 * kGrid.spacing()) continue;
    const Field half = kit().psi(delta / 2);
    const Field composed = kit().apply_factor(half, scaled_phi_factor(kGrid, delta / 2));
    CHECK((psi - composed).max_abs() < 1e-6);
  }
}

TEST_CASE("psi increments shrink with the level") {
  const PsiFactor pf = converged_psi_factor(kGrid, 1.0, 1e-8, 64);
  REQUIRE(pf.increments.size() >= 3);
  for (std::size_t k = 2; k < pf.increments.size(); ++k) CHECK(pf.increments[k] <= pf.increments[k - 1]);
  CHECK(pf.increments.back() < 1e-8);
}

TEST_CASE("unresolvable psi level is a resolution error") {
  CHECK_THROWS_AS(build_psi(kGrid, 0.25, 10), ResolutionError);
}

TEST_CASE("mollify fixes constants, scales single modes, and reproduces psi from a delta") {
  const double delta = 0.25;
  const Field c(kGrid, 3.5);
  CHECK((kit().mollify(c, delta) - c).max_abs() < 1e-12);

  const int kx = 3, ky = 5;
  const Field mode = Field::from_function(kGrid, [&](double x, double y) {
    return std::cos(2 * std::numbers::pi * (kx * x + ky * y) / kGrid.side_length);
  });
  const PsiFactor pf = kit().psi_factor(delta);
  const double gain = pf.factor[kx * 1] * pf.factor[ky];
  CHECK((kit().mollify(mode, delta) - gain * mode).max_abs() < 1e-12);

  const Field psi = kit().psi(delta);
  CHECK((kit().mollify(point_mass(kGrid), delta) - psi).max_abs() < 1e-10 * psi.max_abs());
}

TEST_CASE("mollify rejects a field on another grid") {
  const Field other(GridSpec{8.0, 128, Boundary::periodic}, 1.0);
  CHECK_THROWS_AS(kit().mollify(other, 0.5), ShapeError);
}

TEST_CASE("delta grid stops at four cells") {
  const auto grid = make_delta_grid(kGrid, 1, -1);
  CHECK(grid.front() == 1.0);
  CHECK(grid.back() >= 4 * kGrid.spacing());
  CHECK(grid.back() / 2 < 4 * kGrid.spacing());
  const auto capped = make_delta_grid(kGrid, 1, 2);
  CHECK(capped.size() == 3);
}

TEST_CASE("mollify agrees across two resolutions for smooth data") {
  auto smooth = [](double x, double y) { return std::sin(2 * std::numbers::pi * x / 8) * std::cos(2 * std::numbers::pi * y / 4); };
  const GridSpec fine{8.0, 512, Boundary::periodic};
  const MollifierKit kf(fine);
  const Field a = kit().mollify(Field::from_function(kGrid, smooth), 0.5);
  const Field b = kf.mollify(Field::from_function(fine, smooth), 0.5);
  double diff = 0.0;
  for (int j = 0; j < kGrid.points_per_side; ++j)
    for (int i = 0; i < kGrid.points_per_side; ++i) diff = std::max(diff, std::abs(a(i, j) - b(2 * i, 2 * j)));
  CHECK(diff < kGrid.spacing());
}

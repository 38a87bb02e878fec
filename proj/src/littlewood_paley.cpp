#include "rsbm/littlewood_paley.hpp"

#include <cmath>

#include "rsbm/errors.hpp"
#include "rsbm/spectral.hpp"

namespace rsbm {
namespace {

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

constexpr double kInner = 0.75;
constexpr double kOuter = 4.0 / 3.0;

}  // namespace

double LPDecomposition::cutoff(double r) { return 1.0 - smooth_step((r - kInner) / (kOuter - kInner)); }

LPDecomposition::LPDecomposition(const GridSpec& grid) : grid_(grid) {
  grid_.validate();
  if (grid_.boundary != Boundary::periodic) throw DomainError("Littlewood-Paley blocks need a periodic grid");
  const double corner = std::sqrt(2.0) * grid_.points_per_side / (2.0 * grid_.side_length);
  j_max_ = 0;
  while (std::exp2(j_max_ + 1) * kInner < corner) ++j_max_;
}

double LPDecomposition::rho(int j, double k) const {
  if (j < -1 || j > j_max_) return 0.0;
  if (j == -1) return cutoff(k);
  if (j == j_max_) return 1.0 - cutoff(std::exp2(-j) * k);
  return cutoff(std::exp2(-j - 1) * k) - cutoff(std::exp2(-j) * k);
}

Field LPDecomposition::block(const Field& f, int j) const {
  if (!(f.grid() == grid_)) throw ShapeError("block: field grid does not match decomposition");
  return apply_multiplier(f, [&](double kx, double ky) { return rho(j, std::hypot(kx, ky)); });
}

std::vector<Field> LPDecomposition::blocks(const Field& f) const {
  if (!(f.grid() == grid_)) throw ShapeError("blocks: field grid does not match decomposition");
  const Spectrum s = forward(f);
  std::vector<Field> out;
  out.reserve(j_max_ + 2);
  for (int j = -1; j <= j_max_; ++j) {
    Spectrum b = s;
    const int n = grid_.points_per_side;
    for (int qy = 0; qy < n; ++qy)
      for (int qx = 0; qx < n / 2 + 1; ++qx)
        b(qx, qy) *= rho(j, std::hypot(frequency(qx, grid_), frequency(qy, grid_)));
    out.push_back(inverse(b));
  }
  return out;
}

Field paraproduct(const LPDecomposition& lp, const Field& f, const Field& g, ProductMode mode) {
  require_same_grid(f, g, "paraproduct");
  const auto fb = lp.blocks(f);
  const auto gb = lp.blocks(g);
  const int count = int(fb.size());
  Field out(f.grid());
  if (mode == ProductMode::resonant) {
    for (int i = 0; i < count; ++i)
      for (int j = std::max(0, i - 1); j <= std::min(count - 1, i + 1); ++j) out += fb[i] * gb[j];
    return out;
  }
  Field low(f.grid());  // S_{j-1} f = sum_{i <= j-2} D_i f
  for (int j = 2; j < count; ++j) {
    low += fb[j - 2];
    out += low * gb[j];
  }
  return out;
}

}  // namespace rsbm

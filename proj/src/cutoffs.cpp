#include "rsbm/cutoffs.hpp"

#include "rsbm/errors.hpp"

namespace rsbm {

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double annulus_forcing_value(double s, double n, double m) {
  if (s <= n || s >= n + 2.0) return 0.0;
  if (s > n + 1.0) return m * (1.0 - smooth_step(s - n - 1.0));
  return m * smooth_step((s - n) * m);
}

Field annulus_forcing(const GridSpec& grid, double n, double m) {
  if (m < 0.0) throw InvalidInputError("forcing level must be non-negative");
  if (n + 2.0 > grid.half_width() + 1e-12)
    throw DomainError("P_" + std::to_string(n + 2.0) + " does not fit in " + grid.describe());
  return Field::from_function(grid, [&](double x, double y) { return annulus_forcing_value(max_norm(x, y), n, m); });
}

Field localizer(const GridSpec& grid, double r) {
  if (r - 1.0 > grid.half_width() + 1e-12) throw DomainError("localizer support exceeds the grid");
  return Field::from_function(grid, [&](double x, double y) { return 1.0 - smooth_step(max_norm(x, y) - (r - 2.0)); });
}

CutoffFamily build_cutoffs(const GridSpec& grid, double n, double m) {
  CutoffFamily out;
  out.grid = grid;
  out.n = n;
  out.m = m;
  out.box = Box{n};
  out.forcing = annulus_forcing(grid, n, m);
  out.localizer = localizer(grid, n);
  return out;
}

}  // namespace rsbm

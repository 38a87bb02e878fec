#include "rsbm/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "rsbm/cutoffs.hpp"
#include "rsbm/errors.hpp"
#include "rsbm/spectral.hpp"

namespace rsbm {

double barrier_bound(double x, double y, double n, double g_sup) {
  double gap = std::numeric_limits<double>::infinity();
  for (double c : {x, y}) gap = std::min({gap, (n - c) * (n - c), (n + c) * (n + c)});
  return 28.0 * std::max(1.0 / gap, std::sqrt(g_sup));
}

BarrierReport barrier_check(const SpaceTimeField& u, const Field& g, double n, double tolerance) {
  const GridSpec& grid = u.grid;
  require_same_grid(u.final_slice(), g, "barrier_check");
  BarrierReport out;
  out.n = n;
  out.g_sup = g.max_abs_on(Box{n});
  out.worst_margin = std::numeric_limits<double>::infinity();
  const IndexRange r = box_indices(grid, n);
  for (const Field& f : u.values) {
    const double scale = std::max(f.max_abs(), 1.0);
    for (int j = r.lo; j <= r.hi; ++j)
      for (int i = r.lo; i <= r.hi; ++i) {
        const double x = grid.coord(i), y = grid.coord(j);
        if (std::max(std::abs(x), std::abs(y)) >= n) continue;
        const double v = f(i, j);
        if (v < -tolerance * scale) throw InvalidInputError("barrier check needs a non-negative solution");
        const double b = barrier_bound(x, y, n, out.g_sup);
        ++out.points_checked;
        if (v > b) ++out.violations;
        out.worst_ratio = std::max(out.worst_ratio, v / b);
        out.worst_margin = std::min(out.worst_margin, b - v);
        out.u_sup = std::max(out.u_sup, v);
      }
  }
  return out;
}

Field random_smooth_forcing(const GridSpec& grid, double n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(1, 5);
  std::uniform_real_distribution<double> centre(-(n + 1.0), n + 1.0), width(0.3, 1.5), log_amp(std::log(0.1),
                                                                                             std::log(100.0));
  struct Bump {
    double x, y, w, a;
  };
  std::vector<Bump> bumps(count(rng));
  for (auto& b : bumps) {
    b.x = centre(rng);
    b.y = centre(rng);
    b.w = width(rng);
    b.a = std::exp(log_amp(rng));
  }
  return Field::from_function(grid, [&](double x, double y) {
    double s = 0.0;
    for (const auto& b : bumps) s += b.a * std::exp(-((x - b.x) * (x - b.x) + (y - b.y) * (y - b.y)) / (2 * b.w * b.w));
    return s;
  });
}

double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw InvalidInputError("slope fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

InteriorReport interior_bound_check(const MollifierKit& kit, const Environment* env, double n,
                                    const InteriorOptions& options) {
  const GridSpec& grid = kit.grid();
  InteriorReport out;
  out.n = n;
  out.source_free_radius = n - 2.0;
  out.kappa = options.kappa;
  out.noise = env != nullptr;
  if (env) {
    out.noise_norms = noise_norms(kit, *env, out.source_free_radius);
    const double p = 1.0 / (1.0 - env->epsilon);
    out.noise_term = std::max({std::pow(out.noise_norms.xi, 2.0 * p), std::pow(out.noise_norms.xiX, p),
                               std::pow(out.noise_norms.IxiXi, p)});
  }
  for (double l : options.l_values)
    if (!(l > 0.0 && l < out.source_free_radius)) throw DomainError("l must lie in (0, n - 2)");
  const int steps = int(std::ceil(options.horizon / options.dt));
  std::vector<std::vector<double>> sups;
  for (double m : options.m_values) {
    Field forcing = annulus_forcing(grid, out.source_free_radius, m);
    SemilinearProblem problem = env ? make_problem(*env, options.kappa, Field(grid), std::move(forcing), options.horizon)
                                    : make_free_problem(grid, options.kappa, Field(grid), std::move(forcing),
                                                        options.horizon);
    SolveOptions so;
    so.dt = options.dt;
    so.implicit_absorption = true;
    so.store_every = std::max(1, steps / 40);
    const SpaceTimeField u = solve_imex(problem, so);
    std::vector<double> row;
    for (double l : options.l_values) {
      InteriorRow r;
      r.m = m;
      r.l = l;
      r.box_radius = out.source_free_radius - l;
      r.interior_sup = u.sup_on(Box{r.box_radius});
      r.rhs = std::max(1.0 / (l * l), out.noise_term);
      r.ratio = r.interior_sup / r.rhs;
      out.required_constant = std::max(out.required_constant, r.ratio);
      if (!row.empty() && r.interior_sup > row.back() * (1.0 + 1e-12)) out.nested = false;
      row.push_back(r.interior_sup);
      out.rows.push_back(r);
    }
    sups.push_back(std::move(row));
  }
  if (options.l_values.size() >= 2) out.fitted_slope = fit_log_slope(options.l_values, sups.back());
  if (sups.size() >= 2) {
    const double a = sups[sups.size() - 2].back(), b = sups.back().back();
    out.m_variation = std::abs(b - a) / std::max(std::abs(b), 1e-300);
  }
  return out;
}

ShrinkTrace shrink_iteration(const std::function<double(double)>& box_sup, double c0, double C0, double n,
                             double R0) {
  ShrinkTrace out;
  out.C0 = C0;
  out.c0 = c0;
  out.scaled_min = std::numeric_limits<double>::infinity();
  double R = R0;
  while (R < n) {
    const double s = box_sup(R);
    ShrinkStep step{R, s, s * R * R};
    if (!out.steps.empty()) out.worst_halving = std::max(out.worst_halving, s / out.steps.back().sup);
    out.steps.push_back(step);
    out.scaled_min = std::min(out.scaled_min, step.scaled);
    out.scaled_max = std::max(out.scaled_max, step.scaled);
    if (s < c0 || s <= 0.0) {
      out.stopped_by_threshold = true;
      break;
    }
    R += 2.0 * C0 / std::sqrt(s);
  }
  return out;
}

double fit_shrink_constant(const std::function<double(double)>& box_sup, double n, double R0, double dR) {
  double C0 = 0.0;
  for (double R = R0; R < n; R += dR) {
    const double s = box_sup(R);
    if (s <= 0.0) break;
    for (double d = dR; R + d < n; d += dR)
      if (box_sup(R + d) <= 0.5 * s) {
        C0 = std::max(C0, 0.5 * d * std::sqrt(s));
        break;
      }
  }
  return C0;
}

TwoVariableField build_U_field(const Field& u, const Field& I_xi, const Box& region, double r, int stride) {
  require_same_grid(u, I_xi, "build_U_field");
  const GridSpec& grid = u.grid();
  if (region.radius + r > grid.half_width() - grid.spacing() + 1e-12)
    throw DomainError("two-variable stencil leaves the grid");
  TwoVariableField out;
  out.grid = grid;
  out.offsets = full_stencil(grid, r);
  const IndexRange ir = box_indices(grid, region.radius);
  stride = std::max(1, stride);
  for (int j = ir.lo; j <= ir.hi; j += stride)
    for (int i = ir.lo; i <= ir.hi; i += stride) out.base_points.push_back({i, j});
  out.values.reserve(out.base_points.size() * out.offsets.size());
  for (const auto& [i, j] : out.base_points)
    for (const auto& [a, b] : out.offsets)
      out.values.push_back(u(i + a, j + b) - u(i, j) - u(i, j) * (I_xi(i + a, j + b) - I_xi(i, j)));
  compute_gradient(out);
  return out;
}

GradientReport heat_gradient_check(const GridSpec& grid, const std::vector<double>& radii, int draws,
                                   double horizon, double dt, std::uint64_t seed) {
  GradientReport out;
  out.k_min = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double L : radii) {
    for (int d = 0; d < draws; ++d) {
      const int bumps = 1 + int(unit(rng) * 3);
      std::vector<std::array<double, 4>> spec;
      for (int b = 0; b < bumps; ++b) {
        const double w = 0.15 + 0.25 * unit(rng);
        const double dist = L + 4.0 * w + unit(rng);
        const double angle = 2.0 * std::numbers::pi * unit(rng);
        const double scale = dist / std::max(std::abs(std::cos(angle)), std::abs(std::sin(angle)));
        spec.push_back({scale * std::cos(angle), scale * std::sin(angle), w, 1.0 + 9.0 * unit(rng)});
      }
      if (L + 6.0 > grid.half_width()) throw DomainError("gradient battery does not fit in the grid");
      Field g = Field::from_function(grid, [&](double x, double y) {
        double s = 0.0;
        for (const auto& [cx, cy, w, a] : spec) s += a * std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2 * w * w));
        return s;
      });
      SolveOptions so;
      so.dt = dt;
      so.store_every = std::max(1, int(horizon / dt) / 50);
      const SpaceTimeField u = solve_imex(make_free_problem(grid, 0.0, Field(grid), std::move(g), horizon), so);
      GradientCase c;
      c.ball_radius = L;
      const IndexRange outer = box_indices(grid, L), inner = box_indices(grid, 0.5 * L);
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (const Field& f : u.values) {
        for (int j = outer.lo; j <= outer.hi; ++j)
          for (int i = outer.lo; i <= outer.hi; ++i) {
            lo = std::min(lo, f(i, j));
            hi = std::max(hi, f(i, j));
          }
        const Field gx = spectral_derivative(f, 0), gy = spectral_derivative(f, 1);
        for (int j = inner.lo; j <= inner.hi; ++j)
          for (int i = inner.lo; i <= inner.hi; ++i) c.gradient_sup = std::max(c.gradient_sup, std::hypot(gx(i, j), gy(i, j)));
      }
      c.oscillation = 0.5 * (hi - lo);
      c.constant = c.oscillation > 0.0 ? c.gradient_sup * L / c.oscillation : 0.0;
      out.k_min = std::min(out.k_min, c.constant);
      out.k_max = std::max(out.k_max, c.constant);
      out.cases.push_back(c);
    }
  }
  return out;
}

}  // namespace rsbm

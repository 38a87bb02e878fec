#include "rsbm/norms.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rsbm/errors.hpp"
#include "rsbm/spectral.hpp"

namespace rsbm {
namespace {

void require_fattened(const GridSpec& grid, const Box& region) {
  if (region.radius + 1.0 > grid.half_width() + 1e-12)
    throw DomainError("region " + region.describe() + " fattened by 1 exceeds grid " + grid.describe());
}

std::vector<double> weight_on(const GridSpec& g, const IndexRange& r, const Weight& w) {
  std::vector<double> out(std::size_t(r.count()) * r.count());
  for (int j = r.lo; j <= r.hi; ++j)
    for (int i = r.lo; i <= r.hi; ++i)
      out[std::size_t(j - r.lo) * r.count() + (i - r.lo)] = w(g.coord(i), g.coord(j));
  return out;
}

}  // namespace

NormReport averaged_seminorm(const MollifierKit& kit, const AverageFamily& averages, double alpha,
                             const Box& region, const Weight& weight, const std::string& symbol) {
  const GridSpec& g = kit.grid();
  require_fattened(g, region);
  const IndexRange r = box_indices(g, region.radius);
  const auto theta = weight_on(g, r, weight);
  NormReport out{symbol, alpha, region, weight, 0.0, 1.0, 0.0, 0.0};
  for (double delta : kit.delta_grid()) {
    const auto fields = averages(delta);
    const double scale = std::pow(delta, -alpha);
    for (int j = r.lo; j <= r.hi; ++j)
      for (int i = r.lo; i <= r.hi; ++i) {
        double v = 0.0;
        for (const auto& f : fields) v = std::max(v, std::abs(f(i, j)));
        v *= scale / theta[std::size_t(j - r.lo) * r.count() + (i - r.lo)];
        if (v > out.value) {
          out.value = v;
          out.argmax_scale = delta;
          out.argmax_x = g.coord(i);
          out.argmax_y = g.coord(j);
        }
      }
  }
  return out;
}

NormReport neg_holder_seminorm(const MollifierKit& kit, const Field& f, double alpha, const Box& region,
                               const Weight& weight) {
  if (!(alpha < 0.0)) throw DomainError("negative Holder seminorm needs alpha < 0");
  return averaged_seminorm(
      kit, [&](double delta) { return std::vector<Field>{kit.mollify(f, delta)}; }, alpha, region, weight, "f");
}

PairStencil make_pair_stencil(const GridSpec& grid, const Box& region, double r, std::size_t budget) {
  const double h = grid.spacing();
  if (!(r > h)) throw DomainError("pair distance r must exceed the grid spacing");
  const int reach = int(std::floor(r / h + 1e-9));
  const IndexRange ir = box_indices(grid, region.radius);
  const std::size_t points = std::size_t(ir.count()) * ir.count();
  const std::size_t full = std::size_t(2 * reach + 1) * (2 * reach + 1) / 2;
  PairStencil out;
  auto half_plane = [](int a, int b) { return b > 0 || (b == 0 && a > 0); };
  if (points * full <= budget) {
    out.exhaustive = true;
    for (int b = -reach; b <= reach; ++b)
      for (int a = -reach; a <= reach; ++a)
        if (half_plane(a, b)) out.offsets.push_back({a, b});
    return out;
  }
  std::set<int> radii;
  for (int k = 0; k <= std::min(reach, 6); ++k) radii.insert(k);
  for (int k = 8; k < reach; k *= 2) {
    radii.insert(k);
    radii.insert(k + k / 2);
  }
  radii.insert(reach);
  std::set<std::array<int, 2>> picked;
  for (int b = -6; b <= 6; ++b)
    for (int a = -6; a <= 6; ++a)
      if (std::max(std::abs(a), std::abs(b)) <= reach && half_plane(a, b)) picked.insert({a, b});
  for (int rad : radii) {
    if (rad <= 6) continue;
    for (int a : {-rad, -rad / 2, 0, rad / 2, rad})
      for (int b : {-rad, -rad / 2, 0, rad / 2, rad}) {
        if (std::max(std::abs(a), std::abs(b)) != rad) continue;
        if (half_plane(a, b)) picked.insert({a, b});
      }
  }
  out.offsets.assign(picked.begin(), picked.end());
  return out;
}

NormReport holder_seminorm(const Field& f, double alpha, const Box& region, double r, const Weight& weight) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("Holder seminorm needs alpha in (0,1)");
  const GridSpec& g = f.grid();
  const IndexRange ir = box_indices(g, region.radius);
  const auto theta = weight_on(g, ir, weight);
  const auto stencil = make_pair_stencil(g, region, r);
  const double h = g.spacing();
  NormReport out{"f", alpha, region, weight, 0.0, 0.0, 0.0, 0.0};
  auto th = [&](int i, int j) { return theta[std::size_t(j - ir.lo) * ir.count() + (i - ir.lo)]; };
  for (const auto& [a, b] : stencil.offsets) {
    const double dist = std::max(std::abs(a), std::abs(b)) * h;
    const double denom = std::pow(dist, alpha);
    for (int j = ir.lo; j <= ir.hi; ++j) {
      const int jb = j + b;
      if (jb < ir.lo || jb > ir.hi) continue;
      for (int i = ir.lo; i <= ir.hi; ++i) {
        const int ib = i + a;
        if (ib < ir.lo || ib > ir.hi) continue;
        const double v = std::abs(f(i, j) - f(ib, jb)) / (std::min(th(i, j), th(ib, jb)) * denom);
        if (v > out.value) {
          out.value = v;
          out.argmax_scale = dist;
          out.argmax_x = g.coord(i);
          out.argmax_y = g.coord(j);
        }
      }
    }
  }
  return out;
}

double holder_norm(const Field& f, double alpha, const Box& region, double r, const Weight& weight) {
  const GridSpec& g = f.grid();
  const IndexRange ir = box_indices(g, region.radius);
  double sup = 0.0;
  for (int j = ir.lo; j <= ir.hi; ++j)
    for (int i = ir.lo; i <= ir.hi; ++i) sup = std::max(sup, std::abs(f(i, j)) / weight(g.coord(i), g.coord(j)));
  return sup + holder_seminorm(f, alpha, region, r, weight).value;
}

std::vector<double> besov_profile(const LPDecomposition& lp, const Field& f, double alpha, const Weight& weight) {
  const auto blocks = lp.blocks(f);
  const GridSpec& g = f.grid();
  const int n = g.points_per_side;
  std::vector<double> theta(f.size());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) theta[std::size_t(j) * n + i] = weight(g.coord(i), g.coord(j));
  std::vector<double> out;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const int j = int(b) - 1;
    double sup = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) sup = std::max(sup, std::abs(blocks[b][k]) / theta[k]);
    out.push_back(std::exp2(j * alpha) * sup);
  }
  return out;
}

double besov_norm(const LPDecomposition& lp, const Field& f, double alpha, const Weight& weight) {
  const auto p = besov_profile(lp, f, alpha, weight);
  return *std::max_element(p.begin(), p.end());
}

void compute_gradient(TwoVariableField& u) {
  auto find = [&](int a, int b) -> std::size_t {
    for (std::size_t s = 0; s < u.offsets.size(); ++s)
      if (u.offsets[s][0] == a && u.offsets[s][1] == b) return s;
    throw InvalidInputError("two-variable stencil lacks the unit offsets needed for the gradient");
  };
  const std::size_t xp = find(1, 0), xm = find(-1, 0), yp = find(0, 1), ym = find(0, -1);
  const double h = u.grid.spacing();
  u.gradient.resize(u.base_points.size());
  for (std::size_t b = 0; b < u.base_points.size(); ++b)
    u.gradient[b] = {(u.at(b, xp) - u.at(b, xm)) / (2 * h), (u.at(b, yp) - u.at(b, ym)) / (2 * h)};
}

std::vector<std::array<int, 2>> full_stencil(const GridSpec& grid, double r, int dense) {
  const int reach = int(std::floor(r / grid.spacing() + 1e-9));
  std::set<int> axis;
  for (int k = -std::min(reach, dense); k <= std::min(reach, dense); ++k) axis.insert(k);
  const int stride = std::max(1, (reach + dense - 1) / dense);
  for (int k = 0; k <= reach; k += stride) {
    axis.insert(k);
    axis.insert(-k);
  }
  axis.insert(reach);
  axis.insert(-reach);
  std::vector<std::array<int, 2>> out;
  for (int b : axis)
    for (int a : axis) out.push_back({a, b});
  return out;
}

NormReport two_variable_holder(const TwoVariableField& u, double alpha, double r) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("two-variable seminorm needs alpha in (1,2)");
  const double h = u.grid.spacing();
  double scale = 0.0;
  for (double v : u.values) scale = std::max(scale, std::abs(v));
  NormReport out{"U", alpha, Box{}, Weight{}, 0.0, 0.0, 0.0, 0.0};
  for (std::size_t b = 0; b < u.base_points.size(); ++b) {
    const auto nu = u.gradient.empty() ? std::array<double, 2>{0.0, 0.0} : u.gradient[b];
    for (std::size_t s = 0; s < u.offsets.size(); ++s) {
      const auto [a, c] = u.offsets[s];
      if (a == 0 && c == 0) {
        if (std::abs(u.at(b, s)) > 1e-12 * std::max(1.0, scale))
          throw InvalidInputError("two-variable field does not vanish on the diagonal");
        continue;
      }
      const double dist = std::max(std::abs(a), std::abs(c)) * h;
      if (dist > r + 1e-12) continue;
      const double v = std::abs(u.at(b, s) - nu[0] * a * h - nu[1] * c * h) / std::pow(dist, alpha);
      if (v > out.value) {
        out.value = v;
        out.argmax_scale = dist;
        out.argmax_x = u.grid.coord(u.base_points[b][0]);
        out.argmax_y = u.grid.coord(u.base_points[b][1]);
      }
    }
  }
  return out;
}

SpaceTimeNorm space_time_norm(std::span<const Field> slices, std::span<const double> times, double alpha,
                              const Box& region, double r, const std::function<Weight(double)>& weight_at) {
  if (slices.size() < 2 || times.size() != slices.size())
    throw DomainError("space-time norm needs at least two time slices");
  SpaceTimeNorm out;
  const GridSpec& g = slices.front().grid();
  const IndexRange ir = box_indices(g, region.radius);
  for (std::size_t k = 0; k < slices.size(); ++k)
    out.spatial = std::max(out.spatial, holder_norm(slices[k], alpha, region, r, weight_at(times[k])));
  for (std::size_t t = 1; t < slices.size(); ++t) {
    const Weight w = weight_at(times[t]);
    for (std::size_t s = 0; s < t; ++s) {
      double sup = 0.0;
      for (int j = ir.lo; j <= ir.hi; ++j)
        for (int i = ir.lo; i <= ir.hi; ++i)
          sup = std::max(sup, std::abs(slices[t](i, j) - slices[s](i, j)) / w(g.coord(i), g.coord(j)));
      out.temporal = std::max(out.temporal, sup / std::pow(times[t] - times[s], 0.5 * alpha));
    }
  }
  return out;
}

}  // namespace rsbm

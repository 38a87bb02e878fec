#include "rsbm/mollifier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rsbm/errors.hpp"

namespace rsbm {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// centred offsets d = i - N/2 of a 1D factor
double cos_phase(long long q, long long d, long long n) {
  long long r = (q * d) % n;
  if (r < 0) r += n;
  return std::cos(kTwoPi * double(r) / double(n));
}

std::vector<double> inverse_even_dft(std::span<const double> multiplier, const GridSpec& g) {
  // density samples of (1/L) sum_q m(q) e^{2 pi i q x / L}
  const int n = g.points_per_side;
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int q = 0; q < n; ++q) acc += multiplier[q] * cos_phase(q, i - n / 2, n);
    out[i] = acc / g.side_length;
  }
  return out;
}

}  // namespace

double bump_profile(double x) {
  const double t = 4.0 * x * x;
  if (t >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - t));
}

Field SeparableKernel::to_field() const {
  Field out(grid);
  const int n = grid.points_per_side;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out(i, j) = factor[i] * factor[j];
  return out;
}

double SeparableKernel::mass() const {
  double s = 0.0;
  for (double v : factor) s += v;
  const double h = grid.spacing();
  return (s * h) * (s * h);
}

PhiTransform::PhiTransform() {
  // Bump transform B(p) on p = k / window via a zero-padded FFT.
  constexpr int window = 64;        // p-step 1/64
  constexpr int per_unit = 1024;    // x-step 1/1024
  constexpr int total = window * per_unit;
  constexpr int p_cut = 256 * window;   // |p| <= 256
  constexpr int k_cut = 64 * window;    // table for |k| <= 64
  std::vector<double> samples(total, 0.0);
  for (int i = 0; i < total; ++i) {
    // index 0 is the origin (wrapped layout)
    const int d = i <= total / 2 ? i : i - total;
    samples[i] = bump_profile(double(d) / per_unit);
  }
  std::vector<fftw_complex> spec(total / 2 + 1);
  fftw_plan plan = fftw_plan_dft_r2c_1d(total, samples.data(), spec.data(), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  std::vector<double> a(p_cut + 1);
  for (int i = 0; i <= p_cut; ++i) {
    const double b = spec[i][0] / per_unit;
    a[i] = b * b;
  }
  auto a_at = [&](int i) { i = std::abs(i); return i <= p_cut ? a[i] : 0.0; };

  std::vector<double> g(k_cut + 1, 0.0);
  for (int m = 0; m <= k_cut; ++m) {
    double acc = 0.0;
    for (int i = -p_cut; i <= p_cut; ++i) acc += a[std::abs(i)] * a_at(m - i);
    g[m] = acc;
  }
  step_ = 1.0 / window;
  log_values_.resize(g.size());
  for (std::size_t m = 0; m < g.size(); ++m) log_values_[m] = std::log(g[m] / g[0]);
}

const PhiTransform& PhiTransform::instance() {
  static const PhiTransform table;
  return table;
}

double PhiTransform::operator()(double k) const {
  k = std::abs(k);
  const double u = k / step_;
  const int last = int(log_values_.size()) - 1;
  if (u >= last) {
    const double slope = log_values_[last] - log_values_[last - 1];
    return std::exp(log_values_[last] + slope * (u - last));
  }
  const int i = int(u);
  const double t = u - i;
  auto lv = [&](int m) { return log_values_[std::min(std::abs(m), last)]; };
  // Catmull-Rom on the log; the table is even in k
  const double p0 = lv(i - 1), p1 = lv(i), p2 = lv(i + 1), p3 = i + 2 <= last ? lv(i + 2) : 2 * lv(i + 1) - lv(i);
  const double v = p1 + 0.5 * t * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)));
  return std::exp(v);
}

SeparableKernel build_base_bump(const GridSpec& grid) {
  grid.validate();
  const double h = grid.spacing();
  if (1.0 / h < 8.0)
    throw ResolutionError("grid spacing " + std::to_string(h) +
                          " leaves fewer than 8 cells across the bump support");
  if (grid.side_length <= 2.0)
    throw DomainError("torus side must exceed 2 to hold the unit-scale kernel");
  const int n = grid.points_per_side;
  SeparableKernel out{grid, std::vector<double>(n), {}};
  for (int i = 0; i < n; ++i) out.factor[i] = bump_profile(grid.coord(i));
  out.dft = even_dft_direct(out.factor);
  return out;
}

SeparableKernel build_phi(const SeparableKernel& bump) {
  const GridSpec& grid = bump.grid;
  const int n = grid.points_per_side;
  const double h = grid.spacing();
  std::vector<int> support;
  for (int i = 0; i < n; ++i)
    if (bump.factor[i] != 0.0) support.push_back(i - n / 2);

  // c = bump * bump on offsets, then squared
  std::vector<double> c(n, 0.0);
  for (int d = -n / 2; d < n / 2; ++d) {
    double acc = 0.0;
    for (int e : support) {
      int o = d - e;
      if (o < -n / 2 || o >= n / 2) continue;
      acc += bump.factor[e + n / 2] * bump.factor[o + n / 2];
    }
    c[d + n / 2] = h * acc;
  }
  SeparableKernel out{grid, std::vector<double>(n), std::vector<double>(n)};
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    out.factor[i] = c[i] * c[i];
    z += out.factor[i];
  }
  z *= h;
  for (auto& v : out.factor) v /= z;

  // Transform of c^2 is the circular autocorrelation of h B^2 / N: non-negative terms only.
  std::vector<double> chat(n);
  for (int q = 0; q < n; ++q) chat[q] = h * bump.dft[q] * bump.dft[q];
  for (int q = 0; q < n; ++q) {
    double acc = 0.0;
    for (int p = 0; p < n; ++p) acc += chat[p] * chat[((q - p) % n + n) % n];
    out.dft[q] = acc / (double(n) * z);
  }
  const double lowest = *std::min_element(out.dft.begin(), out.dft.end());
  if (!(lowest > 0.0)) {
    std::ostringstream os;
    os << "discrete transform of Phi has a non-positive entry (" << lowest << "); refine the grid";
    throw ConstructionError(os.str());
  }
  return out;
}

std::vector<double> scaled_phi_factor(const GridSpec& grid, double s) {
  const auto& g = PhiTransform::instance();
  const int n = grid.points_per_side;
  std::vector<double> out(n);
  for (int q = 0; q < n; ++q) out[q] = g(s * frequency(q, grid));
  return out;
}

namespace {

PsiFactor grow_psi(const GridSpec& grid, double delta, int max_levels, double tolerance) {
  const int n = grid.points_per_side;
  const double area = grid.side_length * grid.side_length;
  const auto& g = PhiTransform::instance();
  PsiFactor out{std::vector<double>(n, 1.0), 0, {}};
  double s = delta;
  for (int level = 1; level <= max_levels; ++level) {
    s *= 0.5;
    double s0 = 0.0, s1 = 0.0;
    for (int q = 0; q < n; ++q) {
      const double gk = g(s * frequency(q, grid));
      s0 += out.factor[q];
      s1 += out.factor[q] * (1.0 - gk);
      out.factor[q] *= gk;
    }
    out.levels = level;
    out.increments.push_back(2.0 * s0 * s1 / area);
    if (out.increments.back() < tolerance) break;
  }
  return out;
}

}  // namespace

PsiFactor psi_factor(const GridSpec& grid, double delta, int n_levels) {
  if (!(delta > 0.0)) throw DomainError("mollifier scale must be positive");
  if (n_levels < 1) throw DomainError("need at least one level");
  return grow_psi(grid, delta, n_levels, -1.0);
}

PsiFactor converged_psi_factor(const GridSpec& grid, double delta, double tolerance, int max_levels) {
  if (!(delta > 0.0)) throw DomainError("mollifier scale must be positive");
  return grow_psi(grid, delta, max_levels, tolerance);
}

int max_resolved_levels(const GridSpec& grid, double delta) {
  return int(std::floor(std::log2(delta / (2.0 * grid.spacing())) + 1e-12));
}

SeparableKernel build_psi(const GridSpec& grid, double delta, int n_levels) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("delta must lie in (0, 1]");
  const int usable = max_resolved_levels(grid, delta);
  if (n_levels > usable) {
    std::ostringstream os;
    os << "smallest factor delta 2^-" << n_levels << " is below 2h; maximal usable n_levels is "
       << std::max(usable, 0);
    throw ResolutionError(os.str());
  }
  const PsiFactor f = psi_factor(grid, delta, n_levels);
  SeparableKernel out{grid, inverse_even_dft(f.factor, grid), f.factor};
  for (auto& v : out.dft) v /= grid.spacing();
  return out;
}

std::vector<double> make_delta_grid(const GridSpec& grid, int scales_per_octave, int j_max) {
  const int finest = int(std::floor(std::log2(1.0 / (4.0 * grid.spacing())) + 1e-12));
  if (finest < 0) throw ResolutionError("grid too coarse for any mollifier scale (need h <= 1/4)");
  if (j_max > finest)
    throw ResolutionError("delta grid depth " + std::to_string(j_max) + " exceeds the finest resolved octave " +
                          std::to_string(finest));
  const int depth = j_max < 0 ? finest : j_max;
  std::vector<double> out;
  for (int i = 0; i <= depth * scales_per_octave; ++i)
    out.push_back(std::exp2(-double(i) / scales_per_octave));
  return out;
}

MollifierKit::MollifierKit(const GridSpec& grid, MollifierOptions options)
    : grid_(grid), spectral_grid_(grid), options_(options) {
  grid_.validate();
  if (grid_.boundary == Boundary::dirichlet) {
    spectral_grid_ = GridSpec{2.0 * grid_.side_length, 2 * grid_.points_per_side, Boundary::periodic};
  }
  bump_ = build_base_bump(grid_);
  phi_ = build_phi(bump_);
  deltas_ = make_delta_grid(grid_, options_.scales_per_octave, options_.j_max);
  for (double d : deltas_)
    psi_.emplace(d, converged_psi_factor(spectral_grid_, d, options_.tolerance, options_.max_levels));
}

PsiFactor MollifierKit::psi_factor(double delta) const {
  if (auto it = psi_.find(delta); it != psi_.end()) return it->second;
  return converged_psi_factor(spectral_grid_, delta, options_.tolerance, options_.max_levels);
}

Field MollifierKit::apply_factor(const Field& f, std::span<const double> factor) const {
  if (!(f.grid() == grid_)) throw ShapeError("mollify: field grid " + f.grid().describe() +
                                             " does not match kit grid " + grid_.describe());
  const Multiplier m = Multiplier::separable(spectral_grid_, factor);
  if (grid_.boundary == Boundary::periodic) return m.apply(f);
  // zero-padded convolution on the doubled torus
  const int n = grid_.points_per_side, off = n / 2;
  Field padded(spectral_grid_);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) padded(i + off, j + off) = f(i, j);
  const Field smooth = m.apply(padded);
  Field out(grid_);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out(i, j) = smooth(i + off, j + off);
  return out;
}

Field MollifierKit::mollify(const Field& f, double delta) const {
  if (auto it = psi_.find(delta); it != psi_.end()) return apply_factor(f, it->second.factor);
  return apply_factor(f, psi_factor(delta).factor);
}

Field MollifierKit::psi(double delta) const { return mollify(point_mass(grid_), delta); }

}  // namespace rsbm

#include "rsbm/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "rsbm/errors.hpp"

namespace rsbm {
namespace {

enum class PlanKind { r2c, c2r, dst };

// FFTW planning is not thread safe; execution on fresh arrays is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(PlanKind kind, int n) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(kind, n);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = nullptr;
    switch (kind) {
      case PlanKind::r2c: {
        std::vector<double> in(std::size_t(n) * n);
        std::vector<fftw_complex> out(std::size_t(n) * (n / 2 + 1));
        plan = fftw_plan_dft_r2c_2d(n, n, in.data(), out.data(), flags);
        break;
      }
      case PlanKind::c2r: {
        std::vector<fftw_complex> in(std::size_t(n) * (n / 2 + 1));
        std::vector<double> out(std::size_t(n) * n);
        plan = fftw_plan_dft_c2r_2d(n, n, in.data(), out.data(), flags);
        break;
      }
      case PlanKind::dst: {
        std::vector<double> in(std::size_t(n) * n), out(std::size_t(n) * n);
        plan = fftw_plan_r2r_2d(n, n, in.data(), out.data(), FFTW_RODFT00, FFTW_RODFT00, flags);
        break;
      }
    }
    if (!plan) throw Error("fftw planning failed");
    plans_[key] = plan;
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<PlanKind, int>, fftw_plan> plans_;
};

PlanCache& plans() {
  static PlanCache cache;
  return cache;
}

}  // namespace

Spectrum forward(const Field& f) {
  const int n = f.n();
  Spectrum s{f.grid(), std::vector<std::complex<double>>(std::size_t(n) * (n / 2 + 1))};
  fftw_execute_dft_r2c(plans().get(PlanKind::r2c, n), const_cast<double*>(f.data()),
                       reinterpret_cast<fftw_complex*>(s.data.data()));
  return s;
}

Field inverse(const Spectrum& s) {
  const int n = s.grid.points_per_side;
  Field out(s.grid);
  // c2r destroys its input
  std::vector<std::complex<double>> work = s.data;
  fftw_execute_dft_c2r(plans().get(PlanKind::c2r, n), reinterpret_cast<fftw_complex*>(work.data()),
                       out.data());
  out *= 1.0 / (double(n) * n);
  return out;
}

Multiplier Multiplier::from_function(const GridSpec& g, const std::function<double(double, double)>& m) {
  Multiplier out;
  out.grid_ = g;
  const int n = g.points_per_side, cols = n / 2 + 1;
  out.values_.resize(std::size_t(n) * cols);
  for (int qy = 0; qy < n; ++qy) {
    const double ky = frequency(qy, g);
    for (int qx = 0; qx < cols; ++qx) out.values_[std::size_t(qy) * cols + qx] = m(frequency(qx, g), ky);
  }
  return out;
}

Multiplier Multiplier::separable(const GridSpec& g, std::span<const double> factor) {
  const int n = g.points_per_side, cols = n / 2 + 1;
  if (int(factor.size()) != n) throw ShapeError("separable multiplier: factor length mismatch");
  Multiplier out;
  out.grid_ = g;
  out.values_.resize(std::size_t(n) * cols);
  for (int qy = 0; qy < n; ++qy)
    for (int qx = 0; qx < cols; ++qx) out.values_[std::size_t(qy) * cols + qx] = factor[qx] * factor[qy];
  return out;
}

void Multiplier::apply_in_place(Spectrum& s) const {
  if (!(s.grid == grid_)) throw ShapeError("multiplier applied on a different grid");
  for (std::size_t k = 0; k < values_.size(); ++k) s.data[k] *= values_[k];
}

Field Multiplier::apply(const Field& f) const {
  if (!(f.grid() == grid_)) throw ShapeError("multiplier applied on a different grid");
  Spectrum s = forward(f);
  apply_in_place(s);
  return inverse(s);
}

double Multiplier::min() const { return *std::min_element(values_.begin(), values_.end()); }

Field apply_multiplier(const Field& f, const std::function<double(double, double)>& m) {
  Spectrum s = forward(f);
  const int n = f.n(), cols = n / 2 + 1;
  for (int qy = 0; qy < n; ++qy) {
    const double ky = frequency(qy, f.grid());
    for (int qx = 0; qx < cols; ++qx) s(qx, qy) *= m(frequency(qx, f.grid()), ky);
  }
  return inverse(s);
}

Field convolve_centered(const Field& f, const Field& kernel) {
  require_same_grid(f, kernel, "convolve_centered");
  Spectrum a = forward(f);
  const Spectrum b = forward(kernel);
  const int n = f.n(), cols = n / 2 + 1;
  const double h2 = f.grid().spacing() * f.grid().spacing();
  for (int qy = 0; qy < n; ++qy)
    for (int qx = 0; qx < cols; ++qx) {
      // kernel origin sits at index N/2: undo the (-1)^(qx+qy) shift
      const double sign = ((qx + qy) % 2 == 0) ? 1.0 : -1.0;
      a(qx, qy) *= b(qx, qy) * (sign * h2);
    }
  return inverse(a);
}

Field spectral_derivative(const Field& f, int axis) {
  Spectrum s = forward(f);
  const int n = f.n(), cols = n / 2 + 1;
  for (int qy = 0; qy < n; ++qy)
    for (int qx = 0; qx < cols; ++qx) {
      const int q = axis == 0 ? qx : qy;
      if (q == n / 2) {
        s(qx, qy) = 0.0;  // Nyquist mode has no odd part
        continue;
      }
      const double k = frequency(q, f.grid());
      s(qx, qy) *= std::complex<double>(0.0, 2.0 * std::numbers::pi * k);
    }
  return inverse(s);
}

Field spectral_laplacian(const Field& f) {
  const double c = -4.0 * std::numbers::pi * std::numbers::pi;
  return apply_multiplier(f, [c](double kx, double ky) { return c * (kx * kx + ky * ky); });
}

Field apply_sine_multiplier(const Field& f, const std::function<double(int, int)>& m) {
  const int n = f.n(), k = n - 1;
  std::vector<double> in(std::size_t(k) * k), out(std::size_t(k) * k);
  for (int j = 1; j < n; ++j)
    for (int i = 1; i < n; ++i) in[std::size_t(j - 1) * k + (i - 1)] = f(i, j);
  auto plan = plans().get(PlanKind::dst, k);
  fftw_execute_r2r(plan, in.data(), out.data());
  for (int q = 0; q < k; ++q)
    for (int p = 0; p < k; ++p) out[std::size_t(q) * k + p] *= m(p + 1, q + 1);
  fftw_execute_r2r(plan, out.data(), in.data());
  Field res(f.grid());
  const double norm = 1.0 / (4.0 * double(n) * n);
  for (int j = 1; j < n; ++j)
    for (int i = 1; i < n; ++i) res(i, j) = in[std::size_t(j - 1) * k + (i - 1)] * norm;
  return res;
}

std::vector<double> even_dft_direct(std::span<const double> centred) {
  const int n = int(centred.size());
  std::vector<double> out(n, 0.0);
  for (int q = 0; q < n; ++q) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      if (centred[i] == 0.0) continue;
      const long long phase = (long long)q * (i - n / 2);
      acc += centred[i] * std::cos(2.0 * std::numbers::pi * double(phase % n) / n);
    }
    out[q] = acc;
  }
  return out;
}

}  // namespace rsbm

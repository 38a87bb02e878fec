#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "rsbm/grid.hpp"

namespace rsbm {

// Half spectrum of a real periodic field: rows are ky indices 0..N-1,
// columns kx indices 0..N/2.
struct Spectrum {
  GridSpec grid;
  std::vector<std::complex<double>> data;

  int rows() const { return grid.points_per_side; }
  int cols() const { return grid.points_per_side / 2 + 1; }
  std::complex<double>& operator()(int qx, int qy) { return data[std::size_t(qy) * cols() + qx]; }
  std::complex<double> operator()(int qx, int qy) const { return data[std::size_t(qy) * cols() + qx]; }
};

// Signed integer frequency of DFT index q on an N-point axis.
inline int signed_index(int q, int n) { return q <= n / 2 ? q : q - n; }
// Physical frequency (cycles per unit length) of DFT index q.
inline double frequency(int q, const GridSpec& g) {
  return signed_index(q, g.points_per_side) / g.side_length;
}

Spectrum forward(const Field& f);
// Normalised inverse: inverse(forward(f)) == f.
Field inverse(const Spectrum& s);

// Real even Fourier multiplier stored on the half spectrum.
class Multiplier {
 public:
  Multiplier() = default;
  static Multiplier from_function(const GridSpec& g, const std::function<double(double, double)>& m);
  // m(kx, ky) = factor[qx] * factor[qy], factor indexed by DFT index 0..N-1.
  static Multiplier separable(const GridSpec& g, std::span<const double> factor);

  const GridSpec& grid() const { return grid_; }
  double operator()(int qx, int qy) const { return values_[std::size_t(qy) * (grid_.points_per_side / 2 + 1) + qx]; }
  Field apply(const Field& f) const;
  void apply_in_place(Spectrum& s) const;
  double min() const;

 private:
  GridSpec grid_{};
  std::vector<double> values_;
};

Field apply_multiplier(const Field& f, const std::function<double(double, double)>& m);

// h^2-weighted circular convolution of f with a kernel stored in the same
// centred layout as every field (kernel origin at index N/2).
Field convolve_centered(const Field& f, const Field& kernel);

// Spectral partial derivatives on the torus (axis 0 = x, 1 = y).
Field spectral_derivative(const Field& f, int axis);
Field spectral_laplacian(const Field& f);

// Sine-series multiplier on a dirichlet grid: interior values are expanded in
// sin(pi p (x + L/2) / L) sin(pi q (y + L/2) / L), p, q = 1..N-1.
Field apply_sine_multiplier(const Field& f, const std::function<double(int, int)>& m);

// Real DFT of a 1D sequence evaluated directly as a cosine sum, for even
// sequences stored in centred layout (index N/2 is the origin).
std::vector<double> even_dft_direct(std::span<const double> centred);

}  // namespace rsbm

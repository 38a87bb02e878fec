#pragma once

#include <map>
#include <span>
#include <vector>

#include "rsbm/grid.hpp"
#include "rsbm/spectral.hpp"

namespace rsbm {

// One-axis profile of the base bump, exp(-1/(1 - 4x^2)) on (-1/2, 1/2).
// The planar bump is the product of two copies, so its support is the unit
// max-norm ball of radius 1/2 and every derived kernel factorises.
double bump_profile(double x);

// Product kernel f(x, y) = factor[i] * factor[j] in centred layout, together
// with the real DFT of the factor (origin phase removed).
struct SeparableKernel {
  GridSpec grid;
  std::vector<double> factor;
  std::vector<double> dft;

  Field to_field() const;
  double operator()(int i, int j) const { return factor[i] * factor[j]; }
  // Sum of the planar kernel times h^2.
  double mass() const;
};

// Continuum Fourier transform of the one-axis factor of Phi. It is evaluated
// as the autocorrelation of the squared bump transform, a sum of non-negative
// terms, so positivity survives round-off.
class PhiTransform {
 public:
  static const PhiTransform& instance();
  double operator()(double k) const;
  double table_step() const { return step_; }
  double table_limit() const { return step_ * double(log_values_.size() - 1); }

 private:
  PhiTransform();
  double step_ = 0.0;
  std::vector<double> log_values_;
};

SeparableKernel build_base_bump(const GridSpec& grid);

// Phi = (bump * bump)^2 normalised to unit discrete mass. Throws
// ConstructionError when the discrete transform has a non-positive entry.
SeparableKernel build_phi(const SeparableKernel& bump);

// Multiplier factor of Phi^s on the grid, indexed by DFT index.
std::vector<double> scaled_phi_factor(const GridSpec& grid, double s);

struct PsiFactor {
  std::vector<double> factor;
  int levels = 0;
  // Upper bounds on the sup-norm increment added by each level.
  std::vector<double> increments;
};

// Psi^{delta,n} with exactly n levels.
PsiFactor psi_factor(const GridSpec& grid, double delta, int n_levels);
// Levels are added until the increment bound drops below tolerance.
PsiFactor converged_psi_factor(const GridSpec& grid, double delta, double tolerance, int max_levels);

// Psi^{delta,n} as a kernel; requires delta 2^-n >= 2h.
SeparableKernel build_psi(const GridSpec& grid, double delta, int n_levels);

// Largest n with delta 2^-n >= 2h.
int max_resolved_levels(const GridSpec& grid, double delta);

struct MollifierOptions {
  int max_levels = 64;
  double tolerance = 1e-8;
  int scales_per_octave = 1;
  // Cap on the finest octave; -1 picks the finest with 2^-J >= 4h.
  int j_max = -1;
};

std::vector<double> make_delta_grid(const GridSpec& grid, int scales_per_octave, int j_max);

class MollifierKit {
 public:
  explicit MollifierKit(const GridSpec& grid, MollifierOptions options = {});

  const GridSpec& grid() const { return grid_; }
  const MollifierOptions& options() const { return options_; }
  const SeparableKernel& base_bump() const { return bump_; }
  const SeparableKernel& phi() const { return phi_; }
  std::span<const double> delta_grid() const { return deltas_; }

  // Converged Psi^delta; scales off the delta grid are built on demand.
  PsiFactor psi_factor(double delta) const;
  Field psi(double delta) const;
  Field mollify(const Field& f, double delta) const;
  // Mollify with an explicit factor (used for Phi^s and truncated Psi).
  Field apply_factor(const Field& f, std::span<const double> factor) const;

 private:
  GridSpec grid_;
  GridSpec spectral_grid_;  // doubled torus for dirichlet boxes
  MollifierOptions options_;
  SeparableKernel bump_;
  SeparableKernel phi_;
  std::vector<double> deltas_;
  std::map<double, PsiFactor> psi_;
};

}  // namespace rsbm

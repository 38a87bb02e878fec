#pragma once

#include <string>
#include <vector>

#include "rsbm/environment.hpp"
#include "rsbm/grid.hpp"
#include "rsbm/spectral.hpp"

namespace rsbm {

enum class DiffusionKind { spectral, lattice };
enum class SplittingKind { lie, strang };

// d_t u = Lap u + V u - (kappa/2) u^2 + forcing, u(0) = initial.
struct SemilinearProblem {
  GridSpec grid;
  Field potential;  // xi_alpha - C_alpha; empty means zero
  double renormalization_constant = 0.0;
  double kappa = 0.0;
  Field initial;
  Field forcing;  // empty means zero
  double horizon = 1.0;
  double epsilon = 0.1;
  // Exponential weight schedule e(l0 + t); on a torus it only affects reported norms.
  double weight_l0 = -2.0;
  double weight_a = 0.0;

  void validate() const;
};

SemilinearProblem make_problem(const Environment& env, double kappa, Field initial, Field forcing, double horizon);
// Same problem with the potential switched off.
SemilinearProblem make_free_problem(const GridSpec& grid, double kappa, Field initial, Field forcing, double horizon);

struct SolveOptions {
  double dt = 1e-3;
  DiffusionKind diffusion = DiffusionKind::spectral;
  SplittingKind splitting = SplittingKind::lie;
  // (u + dt(Vu + f)) / (1 + dt kappa u / 2) instead of the explicit absorption step.
  bool implicit_absorption = false;
  // Keep every k-th slice (the final slice is always kept).
  int store_every = 1;
  double overflow_guard = 1e12;
  double positivity_tol = 1e-8;
};

struct SpaceTimeField {
  GridSpec grid;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<Field> values;
  std::string solver;
  double renormalization_constant = 0.0;
  double max_negative_excursion = 0.0;
  bool positivity_warning = false;

  const Field& final_slice() const { return values.back(); }
  // sup over stored times and grid points of the box
  double sup_on(const Box& box) const;
  double sup() const;
};

// Exact heat flow e^{t Lap}; dirichlet grids use the sine series.
Field heat_semigroup(const Field& f, double t, DiffusionKind kind = DiffusionKind::spectral);

// Reusable e^{dt Lap} for a fixed step.
class HeatPropagator {
 public:
  HeatPropagator(const GridSpec& grid, double dt, DiffusionKind kind);
  Field apply(const Field& f) const;

 private:
  GridSpec grid_;
  Multiplier periodic_;
  std::vector<double> sine_;  // per-mode factor for dirichlet
};

// Largest dt with dt ||V||_inf <= 1.
double stable_dt(const SemilinearProblem& problem);

SpaceTimeField solve_imex(const SemilinearProblem& problem, const SolveOptions& options);

struct PicardResult {
  SpaceTimeField solution;
  std::vector<double> residuals;  // sup_t ||psi^m - psi^{m-1}||
  int iterations = 0;
  bool converged = false;
};

// psi^0 solves the linear problem (kappa = 0); psi^m = K(psi^{m-1}) solves the
// linear equation with potential V - (kappa/2) psi^{m-1}, stepped like solve_imex.
PicardResult solve_picard(const SemilinearProblem& problem, int n_iterations, const SolveOptions& options,
                          double tolerance = 1e-13);

// Sup over stored times of the defect between u eta and its Duhamel
// representation driven by -(kappa/2) eta u^2 + f eta - 2 div(u grad eta) + u Lap eta.
// The cutoff terms are taken at the midpoint of each heat step. u must be a
// lie solution stored at every step.
double localization_residual(const SemilinearProblem& problem, const SpaceTimeField& u, const Field& eta,
                             const SolveOptions& options);

struct ParacontrolledDiagnostics {
  Field u_sharp;      // u - u < I xi
  Field commutator;   // (u < I xi) o xi - u (I xi o xi)
  double sharp_norm = 0.0;      // Besov norm of u_sharp at 1 + 2 eps
  double u_norm = 0.0;          // Besov norm of u at 1 - eps
  double commutator_sup = 0.0;
  double lifted_resonant_sup = 0.0;  // sup |(u < I xi) o xi|
  double product_resonant_sup = 0.0; // sup |u (I xi o xi)|
  // max over dyadic blocks j >= high_block of the block sup norms
  double commutator_high = 0.0;
  double lifted_resonant_high = 0.0;
  double product_resonant_high = 0.0;
};

ParacontrolledDiagnostics paracontrolled_diagnostics(const Field& u, const Environment& env, int high_block = 3);

}  // namespace rsbm

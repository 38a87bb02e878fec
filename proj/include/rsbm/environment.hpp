#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rsbm/grid.hpp"
#include "rsbm/littlewood_paley.hpp"
#include "rsbm/mollifier.hpp"
#include "rsbm/weights.hpp"

namespace rsbm {

// Independent stream for index `stream` of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// i.i.d. N(0, 1/h^2) per cell.
Field sample_white_noise(const GridSpec& grid, std::uint64_t seed);

// C^2 smoothstep in the max-norm radius: 0 below 1/8, 1 above 1/4.
double chi(double kx, double ky);

// Solves -Lap(I xi) = chi(D) xi by a Fourier multiplier.
Field compute_I_xi(const Field& xi);

// sup norm of (1 - chi(D)) xi
double low_frequency_sup(const Field& xi);

struct ConstantEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int samples = 0;
  std::vector<double> per_sample;
};

// Ensemble-and-space average of the resonant product I xi_a (.) xi_a.
ConstantEstimate renormalization_constant(const MollifierKit& kit, double alpha, int n_samples,
                                          std::uint64_t master_seed);
// Exact expectation of the same quantity, from the spectrum of the mollifier.
double expected_renormalization_constant(const MollifierKit& kit, double alpha);
// Covariance E[I xi_a(0) (xi_a)_delta(0)]; equals the constant at delta = 0.
double expected_cross_covariance(const MollifierKit& kit, double alpha, double delta);

struct Environment {
  GridSpec grid;
  std::uint64_t seed = 0;
  double alpha = 0.0;
  double epsilon = 0.1;
  Field xi;
  Field xi_alpha;
  Field I_xi;  // of xi_alpha
  double C_alpha = 0.0;
  double J_xi_chi = 0.0;
  std::map<std::string, double> norm_certificates;

  // xi_alpha - C_alpha
  Field potential() const;
};

struct EnvironmentOptions {
  double alpha = 0.125;
  double epsilon = 0.1;
  // 0 uses the exact expectation for C_alpha; otherwise an ensemble of this size.
  int constant_samples = 0;
  bool renormalize = true;
  // Boxes P_n on which noise norms are certified.
  std::vector<double> certify_boxes;
};

Environment make_environment(const MollifierKit& kit, std::uint64_t seed, const EnvironmentOptions& options);
Environment make_environment_from_noise(const MollifierKit& kit, Field xi, std::uint64_t seed,
                                        const EnvironmentOptions& options);

// Lazily evaluated two-point enhancements.
class Enhancements {
 public:
  Enhancements(const MollifierKit& kit, Field xi, Field I_xi, double C);

  // Pointwise two-point values, x and xbar given as grid indices.
  std::array<double, 2> xiX(int i, int j, int ibar, int jbar) const;
  double IxiXi(int i, int j, int ibar, int jbar) const;

  // x -> int enh(x, xbar) Psi^delta(x - xbar) dxbar
  std::array<Field, 2> xiX_average(double delta) const;
  Field IxiXi_average(double delta) const;

 private:
  const MollifierKit* kit_;
  Field xi_;
  Field I_xi_;
  double C_;
};

// Noise norms of the enhanced environment on P_n (unweighted).
struct NoiseNorms {
  double xi = 0.0;      // ||xi||_{n,-1-eps}
  double xiX = 0.0;     // ||xi X||_{n,-eps}
  double IxiXi = 0.0;   // ||(I xi) xi||_{n,-2eps}
};
NoiseNorms noise_norms(const MollifierKit& kit, const Environment& env, double n);

struct AssumptionStep {
  double alpha = 0.0;
  double alpha_next = 0.0;
  double noise_difference = 0.0;
  double renormalized_difference = 0.0;
  double bare_difference = 0.0;
  // relative to the first alpha of the sequence
  double bare_cumulative = 0.0;
  double renormalized_cumulative = 0.0;
};

struct AssumptionReport {
  double epsilon_prime = 0.0;
  std::vector<AssumptionStep> steps;
  std::vector<double> constants;
  bool cauchy = false;  // renormalized differences decrease along the sequence
};

AssumptionReport assumption_check(const MollifierKit& kit, const Field& xi, const std::vector<double>& alphas,
                                  double epsilon_prime, const Box& region, const Weight& weight);

}  // namespace rsbm

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "rsbm/grid.hpp"

namespace rsbm {

// Periodic lattice of spacing 1/scale on a torus of the given side.
GridSpec lattice_grid(double side_length, int scale);
// Values of a field at the lattice sites; the field grid spacing must divide 1/scale.
Field restrict_to_lattice(const Field& f, int scale);

// Per-site rates. Each particle jumps to each of its four neighbours at rate
// scale^2, splits in two at rate V+, dies at rate V-, and undergoes critical
// binary branching (0 or 2 offspring) at rate kappa * particles_per_mass.
struct BranchingRates {
  GridSpec lattice;
  int scale = 1;
  Field potential;
  double kappa = 0.0;
  double particles_per_mass = 1.0;

  double jump_rate() const { return 4.0 * double(scale) * scale; }
  double critical_rate() const { return kappa * particles_per_mass; }
  double max_rate() const;
};

BranchingRates make_rates(const Field& env_potential, int scale, double kappa, double particles_per_mass);

struct ParticleMeasure {
  GridSpec lattice;
  int scale = 1;
  double particle_mass = 1.0;
  std::vector<std::array<int, 2>> sites;
  double time = 0.0;
  double support_radius = 0.0;  // running max over the history

  double mass() const { return particle_mass * double(sites.size()); }
  double radius_now() const;
  // <mu, phi> for phi on the lattice
  double pairing(const Field& phi) const;

  // `copies` particles at the lattice site nearest to each position.
  static ParticleMeasure at_points(const BranchingRates& rates, const std::vector<std::array<double, 2>>& positions,
                                   int copies);
};

struct SimulationOptions {
  std::size_t particle_cap = 10'000'000;
  // Stop as soon as the support radius exceeds this.
  double stop_radius = std::numeric_limits<double>::infinity();
  // Population and radius are sampled on this time step (0 disables).
  double record_dt = 0.0;
};

struct Trajectory {
  ParticleMeasure final_state;
  std::vector<double> times;
  std::vector<double> population;
  std::vector<double> radius;
  long long events = 0;
  bool truncated = false;
  bool extinct = false;
  bool stopped = false;
};

// Exact event simulation by uniformisation with the maximal per-particle rate.
Trajectory simulate(const BranchingRates& rates, const ParticleMeasure& initial, double horizon, std::uint64_t seed,
                    const SimulationOptions& options = {});

struct DualOptions {
  double dt = 1e-3;
  // Sites with |x|_inf > kill_radius are absorbing (w = 0).
  double kill_radius = std::numeric_limits<double>::infinity();
};

// v = 1 - w for the dual w(t, x) = E_x[exp(-<mu(t), phi0>)], with phi0 in
// mass units. v' = Lap_n v + V v - (V+ + critical_rate / 2) v^2, solved by
// Strang splitting of exact heat and exact logistic steps.
Field solve_discrete_dual_complement(const BranchingRates& rates, const Field& phi0, double horizon,
                                     const DualOptions& options = {});
Field solve_discrete_dual(const BranchingRates& rates, const Field& phi0, double horizon,
                          const DualOptions& options = {});
// prod_i w(x_i) over the particles of mu, from the complement.
double dual_laplace(const Field& complement, const ParticleMeasure& mu);

struct DualitySetup {
  Field potential;  // on the environment grid
  std::function<double(double, double)> phi0;
  std::vector<std::array<double, 2>> initial_positions;
  double mass_per_position = 1.0;
  double particles_per_mass = 1.0;
  double kappa = 1.0;
  double horizon = 0.25;
  double dual_dt = 1e-3;
  double continuum_dt = 1e-3;
};

struct LaplaceDualityReport {
  int scale = 0;
  int trials = 0;
  int discarded = 0;
  double mc_mean = 0.0;
  double mc_se = 0.0;
  double dual = 0.0;
  double continuum = 0.0;
  double gap_mc_dual = 0.0;
  double gap_dual_continuum = 0.0;
  bool within_3se = false;
};

// trials == 0 skips the Monte-Carlo side, with_continuum == false skips the PDE.
LaplaceDualityReport laplace_duality_experiment(const DualitySetup& setup, int scale, int trials, std::uint64_t seed,
                                                bool with_continuum = true);

struct CompactSupportSetup {
  Field potential;  // on the environment grid
  std::vector<std::array<double, 2>> initial_positions;
  double mass_per_position = 1.0;
  double particles_per_mass = 10.0;
  double kappa = 1.0;
  double horizon = 1.0;
  double pde_dt = 1e-3;
  double dual_dt = 1e-3;
  std::vector<double> n_values{1, 2, 3};
  std::vector<double> m_values{1e2, 1e3, 1e4};
  int scale = 32;
  int trials = 1000;
};

struct CompactSupportRow {
  double n = 0.0;
  double m = 0.0;
  double pde = 0.0;  // exp(-<mu(0), phi_n^m(T)>)
};

struct CompactSupportSummary {
  double n = 0.0;
  double mc = 0.0;  // fraction of trials with support radius <= n
  double mc_se = 0.0;
  double lattice_exact = 0.0;  // killed dual of the particle system
  double pde_stabilized = 0.0;  // at the largest m
  double m_change = 0.0;        // relative change between the last two m
  bool agrees = false;          // |mc - pde| <= 3 se + 0.05
};

struct CompactSupportReport {
  std::vector<CompactSupportRow> table;
  std::vector<CompactSupportSummary> summary;
  int trials = 0;
  int discarded = 0;
  bool increasing_in_n = false;
};

CompactSupportReport compact_support_experiment(const CompactSupportSetup& setup, std::uint64_t seed);

}  // namespace rsbm

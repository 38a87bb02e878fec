#include "rsbm/brwre.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rsbm/cutoffs.hpp"
#include "rsbm/environment.hpp"
#include "rsbm/errors.hpp"
#include "rsbm/pam_solver.hpp"

namespace rsbm {
namespace {

int nearest_index(const GridSpec& g, double x) {
  const int i = int(std::lround(x / g.spacing())) + g.points_per_side / 2;
  if (i < 0 || i >= g.points_per_side) throw DomainError("position outside the grid");
  return i;
}

double site_radius(const GridSpec& g, const std::array<int, 2>& s) {
  return max_norm(g.coord(s[0]), g.coord(s[1]));
}

// v' = V v - a v^2 over a step tau, exactly.
double logistic_step(double v, double rate, double a, double tau) {
  const double x = rate * tau;
  if (std::abs(x) < 1e-10) return v * (1.0 + x) / (1.0 + a * v * tau);
  const double e = std::exp(x);
  return v * e / (1.0 + a * v * std::expm1(x) / rate);
}

void kill_outside(Field& v, double radius) {
  if (!std::isfinite(radius)) return;
  const GridSpec& g = v.grid();
  for (int j = 0; j < g.points_per_side; ++j)
    for (int i = 0; i < g.points_per_side; ++i)
      if (max_norm(g.coord(i), g.coord(j)) > radius + 1e-12) v(i, j) = 1.0;
}

double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / double(x.size());
}

double standard_error(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / double(x.size() - 1) / double(x.size()));
}

}  // namespace

GridSpec lattice_grid(double side_length, int scale) {
  const double points = side_length * scale;
  if (std::abs(points - std::round(points)) > 1e-9) throw DomainError("lattice must tile the torus");
  GridSpec g{side_length, int(std::lround(points)), Boundary::periodic};
  g.validate();
  return g;
}

Field restrict_to_lattice(const Field& f, int scale) {
  const GridSpec lat = lattice_grid(f.grid().side_length, scale);
  if (f.n() % lat.points_per_side != 0)
    throw ResolutionError("field grid " + f.grid().describe() + " does not refine the lattice of scale " +
                          std::to_string(scale));
  const int stride = f.n() / lat.points_per_side;
  Field out(lat);
  for (int j = 0; j < lat.points_per_side; ++j)
    for (int i = 0; i < lat.points_per_side; ++i) out(i, j) = f(i * stride, j * stride);
  return out;
}

double BranchingRates::max_rate() const { return jump_rate() + critical_rate() + potential.max_abs(); }

BranchingRates make_rates(const Field& env_potential, int scale, double kappa, double particles_per_mass) {
  if (kappa < 0.0 || !(particles_per_mass > 0.0)) throw InvalidInputError("kappa >= 0 and particles per mass > 0 required");
  BranchingRates r;
  r.potential = restrict_to_lattice(env_potential, scale);
  r.lattice = r.potential.grid();
  r.scale = scale;
  r.kappa = kappa;
  r.particles_per_mass = particles_per_mass;
  return r;
}

double ParticleMeasure::radius_now() const {
  double r = 0.0;
  for (const auto& s : sites) r = std::max(r, site_radius(lattice, s));
  return r;
}

double ParticleMeasure::pairing(const Field& phi) const {
  if (!(phi.grid() == lattice)) throw ShapeError("test function is not on the particle lattice");
  double s = 0.0;
  for (const auto& [i, j] : sites) s += phi(i, j);
  return particle_mass * s;
}

ParticleMeasure ParticleMeasure::at_points(const BranchingRates& rates, const std::vector<std::array<double, 2>>& positions,
                                           int copies) {
  ParticleMeasure mu;
  mu.lattice = rates.lattice;
  mu.scale = rates.scale;
  mu.particle_mass = 1.0 / rates.particles_per_mass;
  for (const auto& [x, y] : positions) {
    const std::array<int, 2> s{nearest_index(rates.lattice, x), nearest_index(rates.lattice, y)};
    for (int c = 0; c < copies; ++c) mu.sites.push_back(s);
  }
  mu.support_radius = mu.radius_now();
  return mu;
}

Trajectory simulate(const BranchingRates& rates, const ParticleMeasure& initial, double horizon, std::uint64_t seed,
                    const SimulationOptions& options) {
  if (!(initial.lattice == rates.lattice)) throw ShapeError("initial measure is not on the rate lattice");
  Trajectory out;
  out.final_state = initial;
  ParticleMeasure& mu = out.final_state;
  auto& sites = mu.sites;
  const int n = rates.lattice.points_per_side;
  const double per_direction = double(rates.scale) * rates.scale;
  const double jump = rates.jump_rate(), critical = rates.critical_rate(), rmax = rates.max_rate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double t = initial.time;
  double next_record = options.record_dt > 0.0 ? t : std::numeric_limits<double>::infinity();
  auto record_until = [&](double until) {
    while (next_record <= until && next_record <= horizon) {
      out.times.push_back(next_record);
      out.population.push_back(double(sites.size()));
      out.radius.push_back(mu.support_radius);
      next_record += options.record_dt;
    }
  };
  if (mu.support_radius > options.stop_radius) out.stopped = true;
  while (!out.stopped) {
    if (sites.empty()) {
      out.extinct = true;
      break;
    }
    const double dt = -std::log1p(-unit(rng)) / (double(sites.size()) * rmax);
    record_until(t + dt);
    t += dt;
    if (t > horizon) break;
    ++out.events;
    const std::size_t idx = std::min(sites.size() - 1, std::size_t(unit(rng) * double(sites.size())));
    double u = unit(rng) * rmax;
    if (u < jump) {
      auto& s = sites[idx];
      switch (std::min(3, int(u / per_direction))) {
        case 0: s[0] = (s[0] + 1) % n; break;
        case 1: s[0] = (s[0] + n - 1) % n; break;
        case 2: s[1] = (s[1] + 1) % n; break;
        default: s[1] = (s[1] + n - 1) % n; break;
      }
      const double r = site_radius(rates.lattice, s);
      if (r > mu.support_radius) {
        mu.support_radius = r;
        if (r > options.stop_radius) out.stopped = true;
      }
      continue;
    }
    u -= jump;
    bool birth = false, death = false;
    if (u < critical) {
      (u < 0.5 * critical ? birth : death) = true;
    } else {
      u -= critical;
      const double v = rates.potential(sites[idx][0], sites[idx][1]);
      if (v > 0.0 && u < v) birth = true;
      if (v < 0.0 && u < -v) death = true;
    }
    if (birth) {
      sites.push_back(sites[idx]);
      if (sites.size() > options.particle_cap) {
        out.truncated = true;
        break;
      }
    } else if (death) {
      sites[idx] = sites.back();
      sites.pop_back();
    }
  }
  mu.time = std::min(t, horizon);
  record_until(horizon);
  return out;
}

Field solve_discrete_dual_complement(const BranchingRates& rates, const Field& phi0, double horizon,
                                     const DualOptions& options) {
  if (!(phi0.grid() == rates.lattice)) throw ShapeError("phi0 is not on the rate lattice");
  if (phi0.min() < 0.0) throw InvalidInputError("phi0 must be non-negative");
  if (horizon < 0.0) throw DomainError("horizon must be non-negative");
  const double mass = 1.0 / rates.particles_per_mass;
  Field v(rates.lattice);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = -std::expm1(-mass * phi0[k]);
  kill_outside(v, options.kill_radius);
  // The logistic steps are exact; the splitting is accurate while dt times the
  // effective reaction rate (V plus absorption at the largest v) stays below one.
  const double reaction =
      rates.potential.max_abs() + (std::max(rates.potential.max(), 0.0) + 0.5 * rates.critical_rate()) * v.max();
  if (options.dt * reaction > 1.0)
    throw DomainError("dual step too large for the reaction rates; use dt <= " + std::to_string(1.0 / reaction));
  if (horizon == 0.0) return v;
  const int steps = std::max(1, int(std::ceil(horizon / options.dt - 1e-9)));
  const double dt = horizon / steps;
  const HeatPropagator heat(rates.lattice, dt, DiffusionKind::lattice);
  const double half_critical = 0.5 * rates.critical_rate();
  auto react = [&](double tau) {
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double V = rates.potential[k];
      v[k] = logistic_step(v[k], V, std::max(V, 0.0) + half_critical, tau);
    }
    kill_outside(v, options.kill_radius);
  };
  for (int s = 0; s < steps; ++s) {
    react(0.5 * dt);
    v = heat.apply(v);
    kill_outside(v, options.kill_radius);
    react(0.5 * dt);
  }
  return v;
}

Field solve_discrete_dual(const BranchingRates& rates, const Field& phi0, double horizon, const DualOptions& options) {
  Field v = solve_discrete_dual_complement(rates, phi0, horizon, options);
  for (auto& x : v.values()) x = 1.0 - x;
  return v;
}

double dual_laplace(const Field& complement, const ParticleMeasure& mu) {
  double log_sum = 0.0;
  for (const auto& [i, j] : mu.sites) log_sum += std::log1p(-std::min(complement(i, j), 1.0));
  return std::exp(log_sum);
}

LaplaceDualityReport laplace_duality_experiment(const DualitySetup& setup, int scale, int trials, std::uint64_t seed,
                                                bool with_continuum) {
  const BranchingRates rates = make_rates(setup.potential, scale, setup.kappa, setup.particles_per_mass);
  const int copies = int(std::lround(setup.mass_per_position * setup.particles_per_mass));
  const ParticleMeasure mu0 = ParticleMeasure::at_points(rates, setup.initial_positions, copies);
  const Field phi_lattice = Field::from_function(rates.lattice, setup.phi0);
  LaplaceDualityReport out;
  out.scale = scale;
  out.trials = trials;
  out.dual = dual_laplace(solve_discrete_dual_complement(rates, phi_lattice, setup.horizon, {setup.dual_dt}), mu0);
  if (trials > 0) {
    std::vector<double> weights;
    for (int k = 0; k < trials; ++k) {
      const Trajectory tr = simulate(rates, mu0, setup.horizon, derive_seed(seed, std::uint64_t(k)));
      if (tr.truncated) {
        ++out.discarded;
        continue;
      }
      weights.push_back(std::exp(-tr.final_state.pairing(phi_lattice)));
    }
    out.mc_mean = mean_of(weights);
    out.mc_se = standard_error(weights);
    out.gap_mc_dual = std::abs(out.mc_mean - out.dual);
    out.within_3se = out.gap_mc_dual <= 3.0 * out.mc_se;
  }
  if (with_continuum) {
    const GridSpec& g = setup.potential.grid();
    SemilinearProblem p = make_free_problem(g, setup.kappa, Field::from_function(g, setup.phi0), Field(), setup.horizon);
    p.potential = setup.potential;
    SolveOptions so;
    so.dt = setup.continuum_dt;
    so.splitting = SplittingKind::strang;
    so.store_every = 1 << 30;
    const Field u = solve_imex(p, so).final_slice();
    double pairing = 0.0;
    for (const auto& [x, y] : setup.initial_positions) pairing += setup.mass_per_position * u(nearest_index(g, x), nearest_index(g, y));
    out.continuum = std::exp(-pairing);
    out.gap_dual_continuum = std::abs(out.dual - out.continuum);
  }
  return out;
}

CompactSupportReport compact_support_experiment(const CompactSupportSetup& setup, std::uint64_t seed) {
  if (setup.n_values.empty() || setup.m_values.empty()) throw InvalidInputError("n and m lists must be non-empty");
  const BranchingRates rates = make_rates(setup.potential, setup.scale, setup.kappa, setup.particles_per_mass);
  const int copies = int(std::lround(setup.mass_per_position * setup.particles_per_mass));
  const ParticleMeasure mu0 = ParticleMeasure::at_points(rates, setup.initial_positions, copies);
  const double n_max = *std::max_element(setup.n_values.begin(), setup.n_values.end());
  CompactSupportReport out;
  out.trials = setup.trials;
  std::vector<double> radii;
  SimulationOptions so;
  so.stop_radius = n_max;
  for (int k = 0; k < setup.trials; ++k) {
    const Trajectory tr = simulate(rates, mu0, setup.horizon, derive_seed(seed, std::uint64_t(k)), so);
    if (tr.truncated) {
      ++out.discarded;
      continue;
    }
    radii.push_back(tr.final_state.support_radius);
  }
  const GridSpec& g = setup.potential.grid();
  for (double n : setup.n_values) {
    CompactSupportSummary s;
    s.n = n;
    std::vector<double> inside;
    for (double r : radii) inside.push_back(r <= n + 1e-12 ? 1.0 : 0.0);
    s.mc = mean_of(inside);
    s.mc_se = standard_error(inside);
    DualOptions killed;
    killed.dt = setup.dual_dt;
    killed.kill_radius = n;
    s.lattice_exact = dual_laplace(solve_discrete_dual_complement(rates, Field(rates.lattice), setup.horizon, killed), mu0);
    double previous = 0.0;
    for (double m : setup.m_values) {
      SemilinearProblem p = make_free_problem(g, setup.kappa, Field(g), annulus_forcing(g, n, m), setup.horizon);
      p.potential = setup.potential;
      SolveOptions opts;
      opts.dt = setup.pde_dt;
      opts.implicit_absorption = true;
      opts.store_every = 1 << 30;
      const Field u = solve_imex(p, opts).final_slice();
      double pairing = 0.0;
      for (const auto& [x, y] : setup.initial_positions)
        pairing += setup.mass_per_position * u(nearest_index(g, x), nearest_index(g, y));
      const double pde = std::exp(-pairing);
      out.table.push_back({n, m, pde});
      s.m_change = previous > 0.0 ? std::abs(pde - previous) / pde : 0.0;
      previous = pde;
      s.pde_stabilized = pde;
    }
    s.agrees = std::abs(s.mc - s.pde_stabilized) <= 3.0 * s.mc_se + 0.05;
    out.summary.push_back(s);
  }
  out.increasing_in_n = true;
  for (std::size_t k = 1; k < out.summary.size(); ++k)
    if (!(out.summary[k].pde_stabilized > out.summary[k - 1].pde_stabilized)) out.increasing_in_n = false;
  return out;
}

}  // namespace rsbm

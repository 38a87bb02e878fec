#include "rsbm/pam_solver.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "rsbm/errors.hpp"
#include "rsbm/littlewood_paley.hpp"
#include "rsbm/norms.hpp"

namespace rsbm {
namespace {

constexpr double kPi = std::numbers::pi;

bool has(const Field& f) { return !f.empty(); }

double potential_at(const SemilinearProblem& p, std::size_t k) { return has(p.potential) ? p.potential[k] : 0.0; }
double forcing_at(const SemilinearProblem& p, std::size_t k) { return has(p.forcing) ? p.forcing[k] : 0.0; }

// One reaction update of length tau with an externally supplied absorption
// coefficient field (the solution itself for solve_imex, psi for Picard).
void react_euler(const SemilinearProblem& p, Field& u, const Field& absorber, double tau, bool implicit) {
  const double half_kappa = 0.5 * p.kappa;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double v = potential_at(p, k), f = forcing_at(p, k);
    if (implicit)
      u[k] = (u[k] + tau * (v * u[k] + f)) / (1.0 + tau * half_kappa * absorber[k]);
    else
      u[k] += tau * (v * u[k] - half_kappa * absorber[k] * u[k] + f);
  }
}

// Heun step of the same reaction for the strang scheme (absorber = u).
void react_heun(const SemilinearProblem& p, Field& u, double tau) {
  const double half_kappa = 0.5 * p.kappa;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double v = potential_at(p, k), f = forcing_at(p, k);
    auto rhs = [&](double x) { return v * x - half_kappa * x * x + f; };
    const double r0 = rhs(u[k]);
    const double pred = u[k] + tau * r0;
    u[k] += 0.5 * tau * (r0 + rhs(pred));
  }
}

void zero_dirichlet_faces(Field& u) {
  if (u.grid().boundary != Boundary::dirichlet) return;
  const int n = u.n();
  for (int k = 0; k < n; ++k) u(0, k) = u(k, 0) = 0.0;
}

struct Stepping {
  int steps = 0;
  double dt = 0.0;
};

Stepping plan_steps(double horizon, double dt) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  const int steps = std::max(1, int(std::ceil(horizon / dt - 1e-9)));
  return {steps, horizon / steps};
}

void check_stability(const SemilinearProblem& p, double dt) {
  const double bound = stable_dt(p);
  if (dt > bound * (1.0 + 1e-12))
    throw DomainError("time step " + std::to_string(dt) + " exceeds the stability bound; use dt <= " +
                      std::to_string(bound));
}

void monitor(SpaceTimeField& out, const Field& u, double t, double guard, double tol) {
  const double sup = u.max_abs();
  if (!std::isfinite(sup) || sup > guard)
    throw DivergenceError("solution exceeded the overflow guard at t = " + std::to_string(t), t);
  const double neg = -u.min();
  if (neg > out.max_negative_excursion) out.max_negative_excursion = neg;
  if (neg > tol * std::max(sup, 1e-300)) out.positivity_warning = true;
}

void store(SpaceTimeField& out, const Field& u, double t) {
  out.times.push_back(t);
  out.values.push_back(u);
}

}  // namespace

void SemilinearProblem::validate() const {
  grid.validate();
  if (kappa < 0.0) throw InvalidInputError("kappa must be non-negative");
  if (!(horizon >= 0.0)) throw DomainError("horizon must be non-negative");
  if (!(epsilon > 0.0 && epsilon < 0.25)) throw InvalidInputError("epsilon must lie in (0, 1/4)");
  if (initial.empty() || !(initial.grid() == grid)) throw ShapeError("initial condition is missing or on another grid");
  if (initial.min() < 0.0) throw InvalidInputError("initial condition must be non-negative");
  if (has(forcing)) {
    if (!(forcing.grid() == grid)) throw ShapeError("forcing lives on another grid");
    if (forcing.min() < 0.0) throw InvalidInputError("forcing must be non-negative");
  }
  if (has(potential) && !(potential.grid() == grid)) throw ShapeError("potential lives on another grid");
}

SemilinearProblem make_problem(const Environment& env, double kappa, Field initial, Field forcing, double horizon) {
  SemilinearProblem p;
  p.grid = env.grid;
  p.potential = env.potential();
  p.renormalization_constant = env.C_alpha;
  p.kappa = kappa;
  p.initial = std::move(initial);
  p.forcing = std::move(forcing);
  p.horizon = horizon;
  p.epsilon = env.epsilon;
  return p;
}

SemilinearProblem make_free_problem(const GridSpec& grid, double kappa, Field initial, Field forcing, double horizon) {
  SemilinearProblem p;
  p.grid = grid;
  p.kappa = kappa;
  p.initial = std::move(initial);
  p.forcing = std::move(forcing);
  p.horizon = horizon;
  return p;
}

double SpaceTimeField::sup_on(const Box& box) const {
  double s = 0.0;
  for (const auto& f : values) s = std::max(s, f.max_abs_on(box));
  return s;
}

double SpaceTimeField::sup() const {
  double s = 0.0;
  for (const auto& f : values) s = std::max(s, f.max_abs());
  return s;
}

HeatPropagator::HeatPropagator(const GridSpec& grid, double dt, DiffusionKind kind) : grid_(grid) {
  if (dt < 0.0) throw DomainError("heat flow needs t >= 0");
  const int n = grid.points_per_side;
  const double h = grid.spacing(), l = grid.side_length;
  if (grid.boundary == Boundary::periodic) {
    std::vector<double> factor(n);
    for (int q = 0; q < n; ++q) {
      const double k = frequency(q, grid);
      const double rate = kind == DiffusionKind::spectral ? 4.0 * kPi * kPi * k * k
                                                          : 4.0 / (h * h) * std::pow(std::sin(kPi * k * h), 2);
      factor[q] = std::exp(-rate * dt);
    }
    periodic_ = Multiplier::separable(grid, factor);
  } else {
    sine_.assign(n, 1.0);
    for (int p = 1; p < n; ++p) {
      const double rate = kind == DiffusionKind::spectral ? kPi * kPi * double(p) * p / (l * l)
                                                          : 4.0 / (h * h) * std::pow(std::sin(0.5 * kPi * p / n), 2);
      sine_[p] = std::exp(-rate * dt);
    }
  }
}

Field HeatPropagator::apply(const Field& f) const {
  require_same_grid(f, Field(grid_), "HeatPropagator");
  if (grid_.boundary == Boundary::periodic) return periodic_.apply(f);
  return apply_sine_multiplier(f, [&](int p, int q) { return sine_[p] * sine_[q]; });
}

Field heat_semigroup(const Field& f, double t, DiffusionKind kind) {
  if (t < 0.0) throw DomainError("heat flow needs t >= 0");
  if (t == 0.0) return f;
  return HeatPropagator(f.grid(), t, kind).apply(f);
}

double stable_dt(const SemilinearProblem& problem) {
  const double v = has(problem.potential) ? problem.potential.max_abs() : 0.0;
  return v > 0.0 ? 1.0 / v : std::numeric_limits<double>::infinity();
}

SpaceTimeField solve_imex(const SemilinearProblem& problem, const SolveOptions& options) {
  problem.validate();
  const Stepping st = plan_steps(problem.horizon, options.dt);
  check_stability(problem, st.dt);
  SpaceTimeField out;
  out.grid = problem.grid;
  out.dt = st.dt;
  out.solver = options.splitting == SplittingKind::lie ? "imex-lie" : "imex-strang";
  out.renormalization_constant = problem.renormalization_constant;
  Field u = problem.initial;
  store(out, u, 0.0);
  if (problem.horizon == 0.0) return out;
  const HeatPropagator heat(problem.grid, st.dt, options.diffusion);
  const int every = std::max(1, options.store_every);
  for (int s = 1; s <= st.steps; ++s) {
    if (options.splitting == SplittingKind::lie) {
      react_euler(problem, u, u, st.dt, options.implicit_absorption);
      u = heat.apply(u);
    } else {
      react_heun(problem, u, 0.5 * st.dt);
      u = heat.apply(u);
      react_heun(problem, u, 0.5 * st.dt);
    }
    zero_dirichlet_faces(u);
    const double t = s * st.dt;
    monitor(out, u, t, options.overflow_guard, options.positivity_tol);
    if (s % every == 0 || s == st.steps) store(out, u, t);
  }
  return out;
}

namespace {

// Linear solve with absorption coefficient psi(t_k) frozen per step; psi must hold every step.
SpaceTimeField linear_solve(const SemilinearProblem& problem, const SpaceTimeField* psi, const Stepping& st,
                            const HeatPropagator& heat, const SolveOptions& options) {
  SpaceTimeField out;
  out.grid = problem.grid;
  out.dt = st.dt;
  out.solver = "picard";
  out.renormalization_constant = problem.renormalization_constant;
  Field u = problem.initial;
  const Field zero(problem.grid);
  store(out, u, 0.0);
  for (int s = 1; s <= st.steps; ++s) {
    react_euler(problem, u, psi ? psi->values[s - 1] : zero, st.dt, options.implicit_absorption);
    u = heat.apply(u);
    zero_dirichlet_faces(u);
    monitor(out, u, s * st.dt, options.overflow_guard, options.positivity_tol);
    store(out, u, s * st.dt);
  }
  return out;
}

double trajectory_distance(const SpaceTimeField& a, const SpaceTimeField& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) d = std::max(d, (a.values[k] - b.values[k]).max_abs());
  return d;
}

}  // namespace

PicardResult solve_picard(const SemilinearProblem& problem, int n_iterations, const SolveOptions& options,
                          double tolerance) {
  problem.validate();
  if (options.splitting != SplittingKind::lie) throw InvalidInputError("Picard iteration uses the lie scheme");
  const Stepping st = plan_steps(problem.horizon, options.dt);
  check_stability(problem, st.dt);
  const HeatPropagator heat(problem.grid, st.dt, options.diffusion);
  PicardResult out;
  out.solution = linear_solve(problem, nullptr, st, heat, options);
  int increases = 0;
  for (int it = 1; it <= n_iterations; ++it) {
    SpaceTimeField next = linear_solve(problem, &out.solution, st, heat, options);
    const double r = trajectory_distance(next, out.solution);
    const double scale = std::max(next.sup(), 1e-300);
    if (!out.residuals.empty() && r >= out.residuals.back() && r > tolerance * scale) {
      if (++increases >= 3)
        throw NonContractionError("Picard residual failed to decrease for 3 iterations at horizon " +
                                  std::to_string(problem.horizon));
    } else {
      increases = 0;
    }
    out.residuals.push_back(r);
    out.solution = std::move(next);
    out.iterations = it;
    if (r <= tolerance * scale) {
      out.converged = true;
      break;
    }
  }
  out.solution.solver = "picard";
  return out;
}

double localization_residual(const SemilinearProblem& problem, const SpaceTimeField& u, const Field& eta,
                             const SolveOptions& options) {
  problem.validate();
  require_same_grid(u.final_slice(), eta, "localization_residual");
  if (options.splitting != SplittingKind::lie) throw InvalidInputError("localization residual follows the lie scheme");
  const Stepping st = plan_steps(problem.horizon, options.dt);
  if (int(u.values.size()) != st.steps + 1) throw InvalidInputError("localization residual needs every time step");
  const HeatPropagator heat(problem.grid, st.dt, options.diffusion);
  const HeatPropagator half(problem.grid, 0.5 * st.dt, options.diffusion);
  const Field eta_x = spectral_derivative(eta, 0), eta_y = spectral_derivative(eta, 1);
  const Field lap_eta = spectral_laplacian(eta);
  const double half_kappa = 0.5 * problem.kappa;
  Field w = problem.initial * eta;
  double defect = 0.0;
  for (int s = 1; s <= st.steps; ++s) {
    const Field& us = u.values[s - 1];
    // reaction part: eta times the reacted state, written in terms of w
    Field reacted = us;
    react_euler(problem, reacted, us, st.dt, options.implicit_absorption);
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double v = potential_at(problem, k), f = forcing_at(problem, k);
      if (options.implicit_absorption)
        w[k] = (w[k] + st.dt * (v * w[k] + f * eta[k])) / (1.0 + st.dt * half_kappa * us[k]);
      else
        w[k] += st.dt * (v * w[k] - half_kappa * eta[k] * us[k] * us[k] + f * eta[k]);
    }
    // cutoff commutator, midpoint in time
    const Field mid = half.apply(reacted);
    const Field div = spectral_derivative(mid * eta_x, 0) + spectral_derivative(mid * eta_y, 1);
    Field drive(problem.grid);
    for (std::size_t k = 0; k < w.size(); ++k) drive[k] = -2.0 * div[k] + mid[k] * lap_eta[k];
    w = heat.apply(w) + st.dt * half.apply(drive);
    zero_dirichlet_faces(w);
    defect = std::max(defect, (w - u.values[s] * eta).max_abs());
  }
  return defect;
}

ParacontrolledDiagnostics paracontrolled_diagnostics(const Field& u, const Environment& env, int high_block) {
  require_same_grid(u, env.I_xi, "paracontrolled_diagnostics");
  const LPDecomposition lp(u.grid());
  ParacontrolledDiagnostics out;
  const Field lift = paraproduct(lp, u, env.I_xi, ProductMode::less);
  out.u_sharp = u - lift;
  const Field lifted = paraproduct(lp, lift, env.xi_alpha, ProductMode::resonant);
  const Field product = u * paraproduct(lp, env.I_xi, env.xi_alpha, ProductMode::resonant);
  out.commutator = lifted - product;
  out.sharp_norm = besov_norm(lp, out.u_sharp, 1.0 + 2.0 * env.epsilon);
  out.u_norm = besov_norm(lp, u, 1.0 - env.epsilon);
  out.commutator_sup = out.commutator.max_abs();
  out.lifted_resonant_sup = lifted.max_abs();
  out.product_resonant_sup = product.max_abs();
  auto high = [&](const Field& f) {
    const auto profile = besov_profile(lp, f, 0.0);
    double m = 0.0;
    for (std::size_t k = std::size_t(std::max(0, high_block + 1)); k < profile.size(); ++k) m = std::max(m, profile[k]);
    return m;
  };
  out.commutator_high = high(out.commutator);
  out.lifted_resonant_high = high(lifted);
  out.product_resonant_high = high(product);
  return out;
}

}  // namespace rsbm

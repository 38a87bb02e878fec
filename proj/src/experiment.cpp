#include "rsbm/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "rsbm/archive.hpp"
#include "rsbm/brwre.hpp"
#include "rsbm/cutoffs.hpp"
#include "rsbm/errors.hpp"
#include "rsbm/estimates.hpp"
#include "rsbm/norms.hpp"
#include "rsbm/pam_solver.hpp"

namespace rsbm {

using nlohmann::json;

std::vector<NormEquivalenceRow> norm_equivalence(const MollifierKit& kit, const std::vector<double>& exponents,
                                                 int samples, double noise_scale, const Box& region,
                                                 double pair_radius, std::uint64_t seed) {
  const LPDecomposition lp(kit.grid());
  std::vector<NormEquivalenceRow> rows(exponents.size());
  for (std::size_t e = 0; e < exponents.size(); ++e) {
    rows[e].exponent = exponents[e];
    rows[e].ratio_min = std::numeric_limits<double>::infinity();
  }
  for (int s = 0; s < samples; ++s) {
    const Field f = kit.mollify(sample_white_noise(kit.grid(), derive_seed(seed, std::uint64_t(s))), noise_scale);
    for (std::size_t e = 0; e < exponents.size(); ++e) {
      const double a = exponents[e];
      const double local = a < 0.0 ? neg_holder_seminorm(kit, f, a, region).value : holder_norm(f, a, region, pair_radius);
      const double ratio = besov_norm(lp, f, a) / local;
      auto& row = rows[e];
      row.ratios.push_back(ratio);
      row.ratio_min = std::min(row.ratio_min, ratio);
      row.ratio_max = std::max(row.ratio_max, ratio);
      row.K = std::max({row.K, ratio, 1.0 / ratio});
    }
  }
  return rows;
}

RenormalizationReport renormalization_sweep(const MollifierKit& kit, const Field& xi, const std::vector<double>& alphas,
                                            const Field& initial, const RenormalizationOptions& options) {
  RenormalizationReport out;
  std::vector<Field> ren, bare;
  for (double a : alphas) {
    RenormalizationRow row;
    row.alpha = a;
    for (int mode = 0; mode < 2; ++mode) {
      EnvironmentOptions eo;
      eo.alpha = a;
      eo.renormalize = mode == 0;
      const Environment env = make_environment_from_noise(kit, xi, 0, eo);
      if (mode == 0) row.constant = env.C_alpha;
      SemilinearProblem p = make_problem(env, options.kappa, initial, Field(), options.horizon);
      SolveOptions so;
      so.dt = std::min({options.dt_cap, options.dt_per_alpha2 * a * a, 0.9 / std::max(p.potential.max_abs(), 1e-12)});
      so.splitting = SplittingKind::strang;
      so.store_every = 1 << 30;
      row.dt = so.dt;
      Field u = solve_imex(p, so).final_slice();
      (mode == 0 ? row.sup_renormalized : row.sup_bare) = u.max_abs_on(options.region);
      (mode == 0 ? ren : bare).push_back(std::move(u));
    }
    out.rows.push_back(row);
  }
  auto rel = [&](const Field& a, const Field& b) { return (a - b).max_abs_on(options.region) / b.max_abs_on(options.region); };
  for (std::size_t k = 1; k < out.rows.size(); ++k) {
    auto& r = out.rows[k];
    r.step_renormalized = rel(ren[k], ren[k - 1]);
    r.step_bare = rel(bare[k], bare[k - 1]);
    r.drift_renormalized = rel(ren[k], ren[0]);
    r.drift_bare = rel(bare[k], bare[0]);
  }
  if (out.rows.size() >= 2) {
    out.renormalized_close = out.renormalized_shrinking = out.bare_drifts = true;
    for (std::size_t k = 1; k < out.rows.size(); ++k) {
      if (out.rows[k].step_renormalized >= 0.1) out.renormalized_close = false;
      if (k >= 2 && out.rows[k].step_renormalized >= out.rows[k - 1].step_renormalized) out.renormalized_shrinking = false;
      if (k >= 2 && out.rows[k].drift_bare <= out.rows[k - 1].drift_bare) out.bare_drifts = false;
    }
    if (out.rows.back().drift_bare <= 0.1) out.bare_drifts = false;
  }
  return out;
}

namespace {

std::vector<double> number_list(const json& j, const char* key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  const json& v = j.at(key);
  if (v.is_array())
    for (const auto& x : v) out.push_back(x.get<double>());
  else
    out.push_back(v.get<double>());
  return out;
}

json scalar_from_text(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  double d = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), d);
  if (res.ec == std::errc() && res.ptr == s.data() + s.size()) {
    if (s.find_first_of(".eE") == std::string::npos && std::abs(d) < 9e15) return static_cast<long long>(d);
    return d;
  }
  return s;
}

MollifierKit make_kit(const ExperimentConfig& c) {
  MollifierOptions mo;
  mo.j_max = c.delta_grid;
  return MollifierKit(c.grid, mo);
}

Environment load_or_make_environment(const MollifierKit& kit, const ExperimentConfig& c) {
  EnvironmentOptions eo;
  eo.alpha = c.alpha;
  eo.epsilon = c.epsilon;
  eo.renormalize = c.raw.value("renormalize", true);
  eo.constant_samples = c.raw.value("constant_samples", 0);
  if (c.raw.contains("env_file")) {
    FieldArchive a = load_fields(c.raw.at("env_file").get<std::string>());
    if (!(a.fields.front().grid() == kit.grid())) throw ShapeError("environment archive grid differs from the config grid");
    return make_environment_from_noise(kit, std::move(a.fields.front()), a.meta.value("seed", c.seed), eo);
  }
  return make_environment(kit, c.seed, eo);
}

Field gaussian_bump(const GridSpec& g, const json& spec) {
  const double amp = spec.value("amplitude", 1.0), w = spec.value("width", 0.5);
  const double cx = spec.value("x", 0.0), cy = spec.value("y", 0.0);
  return Field::from_function(g, [&](double x, double y) {
    return amp * std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2 * w * w));
  });
}

Field field_or_bump(const GridSpec& g, const json& raw, const char* file_key, const char* bump_key, bool zero_default) {
  if (raw.contains(file_key)) {
    FieldArchive a = load_fields(raw.at(file_key).get<std::string>());
    if (!(a.fields.front().grid() == g)) throw ShapeError(std::string(file_key) + " grid differs from the config grid");
    return a.fields.front();
  }
  if (raw.contains(bump_key)) return gaussian_bump(g, raw.at(bump_key));
  return zero_default ? Field(g) : gaussian_bump(g, json::object());
}

struct Run {
  const ExperimentConfig& config;
  std::filesystem::path dir;
  Provenance provenance;
  ExperimentResult result;

  std::filesystem::path file(const std::string& name) {
    result.files.push_back(name);
    return dir / name;
  }
  void csv(const std::string& name, const CsvTable& t) { t.write(file(name), provenance); }
};

void run_env(Run& run) {
  const auto& c = run.config;
  const MollifierKit kit = make_kit(c);
  EnvironmentOptions eo;
  eo.alpha = c.alpha;
  eo.epsilon = c.epsilon;
  eo.constant_samples = c.raw.value("constant_samples", 0);
  eo.certify_boxes = c.n_values;
  const Environment env = make_environment(kit, c.seed, eo);
  save_fields(run.file("env.bin"), {env.xi, env.xi_alpha, env.I_xi},
              {{"seed", c.seed}, {"alpha", c.alpha}, {"C_alpha", env.C_alpha}, {"layout", {"xi", "xi_alpha", "I_xi"}}});
  CsvTable t({"quantity", "value"});
  t.add_row({"alpha", CsvTable::num(c.alpha)});
  t.add_row({"C_alpha", CsvTable::num(env.C_alpha)});
  t.add_row({"J_xi_chi", CsvTable::num(env.J_xi_chi)});
  t.add_row({"xi_alpha_min", CsvTable::num(env.xi_alpha.min())});
  t.add_row({"xi_alpha_max", CsvTable::num(env.xi_alpha.max())});
  for (const auto& [k, v] : env.norm_certificates) t.add_row({k, CsvTable::num(v)});
  run.csv("env.csv", t);
  run.result.summary["C_alpha"] = env.C_alpha;
  run.result.summary["norm_certificates"] = env.norm_certificates;
}

void run_solve(Run& run) {
  const auto& c = run.config;
  const MollifierKit kit = make_kit(c);
  const Environment env = load_or_make_environment(kit, c);
  Field initial = field_or_bump(c.grid, c.raw, "phi0_file", "phi0", false);
  Field forcing(c.grid);
  if (c.raw.contains("forcing")) {
    const json& f = c.raw.at("forcing");
    forcing = annulus_forcing(c.grid, f.value("n", 2.0), f.value("m", 1e3));
  } else if (c.raw.contains("forcing_file")) {
    forcing = field_or_bump(c.grid, c.raw, "forcing_file", "", true);
  }
  SemilinearProblem p = make_problem(env, c.kappa, std::move(initial), std::move(forcing), c.horizon);
  SolveOptions so;
  so.dt = c.dt;
  so.implicit_absorption = c.raw.value("implicit_absorption", false);
  so.splitting = c.raw.value("splitting", std::string("lie")) == "strang" ? SplittingKind::strang : SplittingKind::lie;
  so.store_every = std::max(1, int(std::lround(c.horizon / c.dt)) / c.raw.value("slices", 20));
  const SpaceTimeField u = solve_imex(p, so);
  save_fields(run.file("trajectory.bin"), u.values,
              {{"times", u.times}, {"solver", u.solver}, {"C_alpha", u.renormalization_constant}, {"kappa", c.kappa}});
  CsvTable t({"time", "sup", "min", "integral"});
  for (std::size_t k = 0; k < u.values.size(); ++k)
    t.add_row({CsvTable::num(u.times[k]), CsvTable::num(u.values[k].max()), CsvTable::num(u.values[k].min()),
               CsvTable::num(u.values[k].integral())});
  run.csv("slices.csv", t);
  run.result.summary["max_negative_excursion"] = u.max_negative_excursion;
  run.result.summary["positivity_warning"] = u.positivity_warning;
  run.result.passed = !u.positivity_warning;
}

void run_norm(Run& run) {
  const auto& c = run.config;
  const MollifierKit kit = make_kit(c);
  const Environment env = load_or_make_environment(kit, c);
  const LPDecomposition lp(c.grid);
  CsvTable t({"symbol", "exponent", "region", "value", "argmax_scale", "argmax_x", "argmax_y"});
  const Weight w = Weight::parse(c.raw.value("weight", std::string("none")));
  for (double n : c.n_values) {
    const Box box{n};
    const NormReport r = neg_holder_seminorm(kit, env.xi_alpha, -1.0 - c.epsilon, box, w);
    t.add_row({"xi", CsvTable::num(r.alpha), box.describe(), CsvTable::num(r.value), CsvTable::num(r.argmax_scale),
               CsvTable::num(r.argmax_x), CsvTable::num(r.argmax_y)});
    const NoiseNorms nn = noise_norms(kit, env, n);
    t.add_row({"xiX", CsvTable::num(-c.epsilon), box.describe(), CsvTable::num(nn.xiX), "", "", ""});
    t.add_row({"IxiXi", CsvTable::num(-2 * c.epsilon), box.describe(), CsvTable::num(nn.IxiXi), "", "", ""});
  }
  t.add_row({"xi_besov", CsvTable::num(-1.0 - c.epsilon), "torus", CsvTable::num(besov_norm(lp, env.xi_alpha, -1.0 - c.epsilon, w)),
             "", "", ""});
  run.csv("norms.csv", t);
}

void run_verify(Run& run) {
  const auto& c = run.config;
  const std::string check = c.raw.value("check", std::string("barrier"));
  run.result.summary["check"] = check;
  if (check == "barrier") {
    const double n = c.n_values.empty() ? 4.0 : c.n_values.front();
    const int draws = c.raw.value("draws", 20);
    CsvTable t({"draw", "g_sup", "u_sup", "worst_ratio", "violations", "points"});
    long long total = 0;
    for (int d = 0; d < draws; ++d) {
      Field g = random_smooth_forcing(c.grid, n, derive_seed(c.seed, std::uint64_t(d)));
      SolveOptions so;
      so.dt = c.dt;
      so.store_every = std::max(1, int(std::lround(c.horizon / c.dt)) / 50);
      const SpaceTimeField u = solve_imex(make_free_problem(c.grid, 2.0, Field(c.grid), g, c.horizon), so);
      const BarrierReport r = barrier_check(u, g, n);
      total += r.violations;
      t.add_row({std::to_string(d), CsvTable::num(r.g_sup), CsvTable::num(r.u_sup), CsvTable::num(r.worst_ratio),
                 std::to_string(r.violations), std::to_string(r.points_checked)});
    }
    run.csv("barrier.csv", t);
    run.result.summary["violations"] = total;
    run.result.passed = total == 0;
  } else if (check == "interior" || check == "shrink") {
    const MollifierKit kit = make_kit(c);
    const double n = c.n_values.empty() ? 8.0 : c.n_values.front();
    InteriorOptions io;
    io.kappa = c.kappa;
    io.horizon = c.horizon;
    io.dt = c.dt;
    if (!c.l_values.empty()) io.l_values = c.l_values;
    if (!c.m_values.empty()) io.m_values = c.m_values;
    if (check == "interior") {
      const double K = c.raw.value("K", 28.0);
      CsvTable t({"noise", "m", "l", "box", "interior_sup", "rhs", "ratio"});
      bool ok = true;
      for (int noise = 0; noise < 2; ++noise) {
        std::optional<Environment> env;
        if (noise) env = load_or_make_environment(kit, c);
        const InteriorReport r = interior_bound_check(kit, noise ? &*env : nullptr, n, io);
        for (const auto& row : r.rows)
          t.add_row({std::to_string(noise), CsvTable::num(row.m), CsvTable::num(row.l), CsvTable::num(row.box_radius),
                     CsvTable::num(row.interior_sup), CsvTable::num(row.rhs), CsvTable::num(row.ratio)});
        const std::string key = noise ? "with_noise" : "without_noise";
        run.result.summary[key] = {{"slope", r.fitted_slope}, {"m_variation", r.m_variation},
                                   {"required_constant", r.required_constant}, {"noise_term", r.noise_term}};
        ok = ok && r.required_constant <= K && r.nested;
        if (!noise) ok = ok && r.fitted_slope <= -1.8 && r.m_variation < 0.05;
      }
      run.csv("interior.csv", t);
      run.result.passed = ok;
    } else {
      const double m = io.m_values.back();
      const double free_radius = n - 2.0;
      SemilinearProblem p =
          make_free_problem(c.grid, c.kappa, Field(c.grid), annulus_forcing(c.grid, free_radius, m), c.horizon);
      SolveOptions so;
      so.dt = c.dt;
      so.implicit_absorption = true;
      so.store_every = std::max(1, int(std::lround(c.horizon / c.dt)) / 40);
      const SpaceTimeField u = solve_imex(p, so);
      auto box_sup = [&](double R) { return u.sup_on(Box{free_radius - R}); };
      const double R0 = c.raw.value("R0", 0.5);
      const double C0 = fit_shrink_constant(box_sup, free_radius, R0, c.grid.spacing());
      const ShrinkTrace tr = shrink_iteration(box_sup, c.raw.value("c0", 0.0), C0, free_radius, R0);
      CsvTable t({"R", "sup", "sup_R2"});
      for (const auto& s : tr.steps) t.add_row({CsvTable::num(s.radius), CsvTable::num(s.sup), CsvTable::num(s.scaled)});
      run.csv("shrink.csv", t);
      run.result.summary["C0"] = C0;
      run.result.summary["worst_halving"] = tr.worst_halving;
      run.result.summary["scaled_range"] = {tr.scaled_min, tr.scaled_max};
      run.result.passed = tr.worst_halving <= 0.5 + 1e-2;
    }
  } else if (check == "ugrad") {
    const GradientReport r = heat_gradient_check(c.grid, c.raw.contains("radii") ? number_list(c.raw, "radii")
                                                                               : std::vector<double>{0.5, 1.0, 2.0},
                                                 c.raw.value("draws", 4), c.horizon, c.dt, c.seed);
    CsvTable t({"ball_radius", "gradient_sup", "oscillation", "constant"});
    for (const auto& k : r.cases)
      t.add_row({CsvTable::num(k.ball_radius), CsvTable::num(k.gradient_sup), CsvTable::num(k.oscillation),
                 CsvTable::num(k.constant)});
    run.csv("ugrad.csv", t);
    run.result.summary["k_range"] = {r.k_min, r.k_max};
    run.result.passed = r.k_max <= 2.0 * r.k_min;
  } else {
    throw UsageError("unknown verify check '" + check + "' (barrier, interior, shrink, ugrad)");
  }
}

DualitySetup duality_setup(const ExperimentConfig& c, const Environment& env) {
  DualitySetup s;
  s.potential = env.potential();
  const json phi = c.raw.value("phi0", json::object());
  const double amp = phi.value("amplitude", 3.0), w = phi.value("width", 0.25);
  s.phi0 = [amp, w](double x, double y) { return amp * std::exp(-(x * x + y * y) / (2 * w * w)); };
  s.initial_positions = {{0.0, 0.0}};
  s.mass_per_position = c.raw.value("initial_mass", 1.0);
  s.particles_per_mass = c.raw.value("particles_per_mass", 2.0);
  s.kappa = c.kappa;
  s.horizon = c.horizon;
  s.dual_dt = c.raw.value("dual_dt", 1e-3);
  s.continuum_dt = c.dt;
  return s;
}

void run_brwre(Run& run) {
  const auto& c = run.config;
  const MollifierKit kit = make_kit(c);
  const Environment env = load_or_make_environment(kit, c);
  const DualitySetup s = duality_setup(c, env);
  const int scale = c.raw.value("scale", 32);
  const BranchingRates rates = make_rates(s.potential, scale, s.kappa, s.particles_per_mass);
  const ParticleMeasure mu0 = ParticleMeasure::at_points(
      rates, s.initial_positions, int(std::lround(s.mass_per_position * s.particles_per_mass)));
  const Field phi = Field::from_function(rates.lattice, s.phi0);
  CsvTable t({"trial", "trial_seed", "final_mass", "support_radius", "laplace_weight", "truncated"});
  for (int k = 0; k < c.trials; ++k) {
    const std::uint64_t ts = derive_seed(c.seed, std::uint64_t(k));
    const Trajectory tr = simulate(rates, mu0, c.horizon, ts);
    t.add_row({std::to_string(k), std::to_string(ts), CsvTable::num(tr.final_state.mass()),
               CsvTable::num(tr.final_state.support_radius), CsvTable::num(std::exp(-tr.final_state.pairing(phi))),
               tr.truncated ? "1" : "0"});
  }
  run.csv("runs.csv", t);
}

void run_duality(Run& run) {
  const auto& c = run.config;
  const MollifierKit kit = make_kit(c);
  const Environment env = load_or_make_environment(kit, c);
  const DualitySetup s = duality_setup(c, env);
  std::vector<double> scales = number_list(c.raw, "scales");
  if (scales.empty()) scales = {32};
  CsvTable t({"scale", "trials", "mc_mean", "mc_se", "dual", "continuum", "gap_mc_dual", "gap_dual_continuum", "within_3se"});
  bool ok = true;
  double previous_gap = std::numeric_limits<double>::infinity();
  for (double sc : scales) {
    const LaplaceDualityReport r = laplace_duality_experiment(s, int(sc), c.trials, c.seed);
    t.add_row({CsvTable::num(sc), std::to_string(r.trials), CsvTable::num(r.mc_mean), CsvTable::num(r.mc_se),
               CsvTable::num(r.dual), CsvTable::num(r.continuum), CsvTable::num(r.gap_mc_dual),
               CsvTable::num(r.gap_dual_continuum), r.within_3se ? "1" : "0"});
    if (c.trials > 0 && !r.within_3se) ok = false;
    if (r.gap_dual_continuum >= previous_gap) ok = false;
    previous_gap = r.gap_dual_continuum;
  }
  run.csv("duality.csv", t);
  run.result.passed = ok;
}

void run_compact_support(Run& run) {
  const auto& c = run.config;
  const MollifierKit kit = make_kit(c);
  const Environment env = load_or_make_environment(kit, c);
  CompactSupportSetup s;
  s.potential = env.potential();
  s.initial_positions = {{0.0, 0.0}};
  s.mass_per_position = c.raw.value("initial_mass", 1.0);
  s.particles_per_mass = c.raw.value("particles_per_mass", 10.0);
  s.kappa = c.kappa;
  s.horizon = c.horizon;
  s.pde_dt = c.dt;
  s.dual_dt = c.raw.value("dual_dt", 1e-3);
  if (!c.n_values.empty()) s.n_values = c.n_values;
  if (!c.m_values.empty()) s.m_values = c.m_values;
  s.scale = c.raw.value("scale", 32);
  s.trials = c.trials;
  const CompactSupportReport r = compact_support_experiment(s, c.seed);
  CsvTable table({"n", "m", "pde_estimate"});
  for (const auto& row : r.table) table.add_row({CsvTable::num(row.n), CsvTable::num(row.m), CsvTable::num(row.pde)});
  run.csv("compact_support_table.csv", table);
  CsvTable sum({"n", "mc", "mc_se", "lattice_exact", "pde_stabilized", "m_change", "agrees"});
  bool ok = r.increasing_in_n;
  for (const auto& x : r.summary) {
    sum.add_row({CsvTable::num(x.n), CsvTable::num(x.mc), CsvTable::num(x.mc_se), CsvTable::num(x.lattice_exact),
                 CsvTable::num(x.pde_stabilized), CsvTable::num(x.m_change), x.agrees ? "1" : "0"});
    ok = ok && x.agrees && x.m_change < 0.02;
  }
  run.csv("compact_support_summary.csv", sum);
  run.result.summary["discarded"] = r.discarded;
  run.result.passed = ok;
}

void run_renormalization(Run& run) {
  const auto& c = run.config;
  const MollifierKit kit = make_kit(c);
  const Field xi = sample_white_noise(c.grid, c.seed);
  std::vector<double> alphas = number_list(c.raw, "alphas");
  if (alphas.empty()) alphas = {c.alpha, c.alpha / 2, c.alpha / 4};
  RenormalizationOptions ro;
  ro.kappa = c.kappa;
  ro.horizon = c.horizon;
  ro.dt_cap = c.dt;
  ro.region = Box{c.raw.value("region", 1.0)};
  const RenormalizationReport r =
      renormalization_sweep(kit, xi, alphas, field_or_bump(c.grid, c.raw, "phi0_file", "phi0", false), ro);
  CsvTable t({"alpha", "C_alpha", "dt", "step_renormalized", "step_bare", "drift_renormalized", "drift_bare"});
  for (const auto& row : r.rows)
    t.add_row({CsvTable::num(row.alpha), CsvTable::num(row.constant), CsvTable::num(row.dt),
               CsvTable::num(row.step_renormalized), CsvTable::num(row.step_bare), CsvTable::num(row.drift_renormalized),
               CsvTable::num(row.drift_bare)});
  run.csv("renormalization.csv", t);
  run.result.passed = r.renormalized_close && r.renormalized_shrinking && r.bare_drifts;
}

}  // namespace

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids{"env", "solve", "norm", "verify", "brwre", "duality", "compact-support",
                                            "renormalization"};
  return ids;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  c.raw = j;
  c.experiment = j.value("experiment", std::string());
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), c.experiment) == ids.end()) {
    std::string list;
    for (const auto& id : ids) list += (list.empty() ? "" : ", ") + id;
    throw UsageError("unknown experiment '" + c.experiment + "'; available: " + list);
  }
  if (j.contains("grid")) c.grid = grid_from_json(j.at("grid"));
  c.alpha = j.value("alpha", c.alpha);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.kappa = j.value("kappa", c.kappa);
  c.horizon = j.value("T", c.horizon);
  c.dt = j.value("dt", c.dt);
  c.delta_grid = j.value("delta_grid", c.delta_grid);
  c.n_values = number_list(j, "n_values");
  c.l_values = number_list(j, "l_values");
  c.m_values = number_list(j, "m_values");
  c.trials = j.value("trials", c.trials);
  c.seed = j.value("seed", c.seed);
  c.out = j.value("out", c.out);
  return c;
}

std::string ExperimentConfig::hash() const {
  json j = raw;
  j.erase("out");
  return fnv1a_hex(j.dump());
}

json read_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open config " + path.string());
  if (path.extension() == ".json") return json::parse(is);
  json out = json::object();
  for (const auto& item : CLI::ConfigTOML().from_config(is)) {
    if (item.name == "++" || item.name == "--") continue;
    json* node = &out;
    for (const auto& p : item.parents) node = &(*node)[p];
    if (item.inputs.size() == 1) {
      (*node)[item.name] = scalar_from_text(item.inputs.front());
    } else {
      json arr = json::array();
      for (const auto& s : item.inputs) arr.push_back(scalar_from_text(s));
      (*node)[item.name] = arr;
    }
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  Run run{config, out_dir.empty() ? std::filesystem::path(config.out) : out_dir, {}, {}};
  std::filesystem::create_directories(run.dir);
  run.provenance = {config.hash(), code_version(), config.grid.describe(), config.seed};
  run.result.directory = run.dir;
  const std::filesystem::path marker = run.dir / "INCOMPLETE";
  std::ofstream(marker) << config.experiment << '\n';
  try {
    const std::string& id = config.experiment;
    if (id == "env") run_env(run);
    else if (id == "solve") run_solve(run);
    else if (id == "norm") run_norm(run);
    else if (id == "verify") run_verify(run);
    else if (id == "brwre") run_brwre(run);
    else if (id == "duality") run_duality(run);
    else if (id == "compact-support") run_compact_support(run);
    else run_renormalization(run);
  } catch (const Error& e) {
    throw Error("experiment '" + config.experiment + "' failed: " + e.what());
  }
  json summary = {{"experiment", config.experiment}, {"config_hash", run.provenance.config_hash},
                  {"code_version", run.provenance.code_version}, {"grid", run.provenance.grid},
                  {"seed", config.seed}, {"passed", run.result.passed}, {"files", run.result.files},
                  {"metrics", run.result.summary}};
  std::ofstream(run.dir / "summary.json") << summary.dump(2) << '\n';
  std::filesystem::remove(marker);
  run.result.summary = summary;
  return run.result;
}

}  // namespace rsbm

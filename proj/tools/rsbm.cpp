// Command line front end for the experiment pipelines.
#include <charconv>
#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "rsbm/errors.hpp"
#include "rsbm/experiment.hpp"

namespace {

using nlohmann::json;

// "0.25", "1/16"
double parse_ratio(const std::string& s) {
  auto number = [&](std::string_view t) {
    double v = 0.0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size()) throw rsbm::UsageError("not a number: " + s);
    return v;
  };
  const auto slash = s.find('/');
  if (slash == std::string::npos) return number(s);
  return number(std::string_view(s).substr(0, slash)) / number(std::string_view(s).substr(slash + 1));
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> n;
  std::optional<double> side;
  std::string alpha;
  std::optional<double> epsilon, kappa, horizon, dt;
  std::optional<int> delta_grid, trials;
  std::vector<double> n_values, l_values, m_values;
  std::vector<std::string> set;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON or TOML config file");
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--n", c.n, "grid points per side");
  app->add_option("--L", c.side, "torus side length");
  app->add_option("--alpha", c.alpha, "mollification scale, e.g. 1/16");
  app->add_option("--epsilon", c.epsilon);
  app->add_option("--kappa", c.kappa);
  app->add_option("--T", c.horizon, "time horizon");
  app->add_option("--dt", c.dt);
  app->add_option("--delta-grid", c.delta_grid, "finest dyadic level j_max");
  app->add_option("--trials", c.trials);
  app->add_option("--n-values", c.n_values)->delimiter(',');
  app->add_option("--l-values", c.l_values)->delimiter(',');
  app->add_option("--m-values", c.m_values)->delimiter(',');
  app->add_option("--set", c.set, "extra key=value pairs (value parsed as JSON when possible)");
}

json build_config(const std::string& experiment, const Common& c) {
  json j = c.config.empty() ? json::object() : rsbm::read_config_file(c.config);
  j["experiment"] = experiment;
  if (c.seed) j["seed"] = *c.seed;
  if (c.n) j["grid"]["N"] = *c.n;
  if (c.side) j["grid"]["L"] = *c.side;
  if (!c.alpha.empty()) j["alpha"] = parse_ratio(c.alpha);
  if (c.epsilon) j["epsilon"] = *c.epsilon;
  if (c.kappa) j["kappa"] = *c.kappa;
  if (c.horizon) j["T"] = *c.horizon;
  if (c.dt) j["dt"] = *c.dt;
  if (c.delta_grid) j["delta_grid"] = *c.delta_grid;
  if (c.trials) j["trials"] = *c.trials;
  if (!c.n_values.empty()) j["n_values"] = c.n_values;
  if (!c.l_values.empty()) j["l_values"] = c.l_values;
  if (!c.m_values.empty()) j["m_values"] = c.m_values;
  for (const auto& kv : c.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw rsbm::UsageError("--set expects key=value, got " + kv);
    const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    j[key] = json::accept(value) ? json::parse(value) : json(value);
  }
  return j;
}

std::string output_dir(const Common& c, const json& j, const std::string& experiment) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv("RSBM_OUT_DIR")) return std::string(env) + "/" + experiment;
  return j.value("out", "runs/" + experiment);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rough super-Brownian motion experiments"};
  app.require_subcommand(1);
  Common common;
  std::string check;

  auto* env = app.add_subcommand("env", "generate and archive an environment");
  auto* gen = env->add_subcommand("gen", "same as env");
  add_common(env, common);
  add_common(gen, common);
  auto* verify = app.add_subcommand("verify", "check an estimate (barrier, interior, shrink, ugrad)");
  verify->add_option("check", check, "which check")->check(CLI::IsMember({"barrier", "interior", "shrink", "ugrad"}));
  add_common(verify, common);
  std::vector<std::pair<CLI::App*, std::string>> commands{{env, "env"}, {verify, "verify"}};
  for (const std::string id : {"solve", "norm", "brwre", "duality", "compact-support", "renormalization"}) {
    auto* sub = app.add_subcommand(id, "run the " + id + " pipeline");
    add_common(sub, common);
    commands.emplace_back(sub, id);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    std::string id;
    for (const auto& [sub, name] : commands)
      if (sub->parsed()) id = name;
    json j = build_config(id, common);
    if (id == "verify" && !check.empty()) j["check"] = check;
    const rsbm::ExperimentConfig config = rsbm::ExperimentConfig::from_json(j);
    const rsbm::ExperimentResult r = rsbm::run_experiment(config, output_dir(common, j, id));
    std::cout << r.summary.dump(2) << '\n';
    return r.passed ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

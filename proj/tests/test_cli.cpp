#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rsbm/archive.hpp"
#include "rsbm/cutoffs.hpp"
#include "rsbm/errors.hpp"
#include "rsbm/experiment.hpp"

using namespace rsbm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rsbm_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

nlohmann::json small_config(const std::string& id) {
  return {{"experiment", id}, {"grid", {{"L", 4.0}, {"N", 64}}}, {"alpha", 0.25}, {"seed", 3}};
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(RSBM_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("annulus forcing plateaus and range") {
  const double n = 2.0, m = 1e3;
  CHECK(annulus_forcing_value(0.0, n, m) == 0.0);
  CHECK(annulus_forcing_value(n, n, m) == 0.0);
  CHECK(annulus_forcing_value(n + 0.5, n, m) == m);
  CHECK(annulus_forcing_value(n + 2.0, n, m) == 0.0);
  CHECK(annulus_forcing_value(n + 5.0, n, m) == 0.0);
  const GridSpec g{8.0, 128, Boundary::periodic};
  const CutoffFamily c = build_cutoffs(g, n, m);
  CHECK(c.forcing.min() >= 0.0);
  CHECK(c.forcing.max() <= m);
  CHECK(c.forcing(64, 64) == 0.0);
  CHECK(c.forcing(64 + 40, 64) == m);  // x = 2.5
  CHECK_THROWS_AS(build_cutoffs(g, 2.5, m), DomainError);
}

TEST_CASE("localizer plateaus") {
  const GridSpec g{8.0, 128, Boundary::periodic};
  const Field eta = localizer(g, 3.0);
  CHECK(eta.min() >= 0.0);
  CHECK(eta.max() <= 1.0);
  for (int j = 0; j < 128; ++j)
    for (int i = 0; i < 128; ++i) {
      const double s = max_norm(g.coord(i), g.coord(j));
      if (s <= 1.0) CHECK(eta(i, j) == 1.0);
      if (s >= 2.0) CHECK(eta(i, j) == 0.0);
    }
}

TEST_CASE("field archive round trip") {
  const GridSpec g{4.0, 32, Boundary::periodic};
  const Field a = Field::from_function(g, [](double x, double y) { return x * y - 0.1; });
  const fs::path p = scratch("archive") / "f.bin";
  save_fields(p, {a, a * 2.0}, {{"seed", 9}});
  const FieldArchive r = load_fields(p);
  REQUIRE(r.fields.size() == 2);
  CHECK(r.fields[0].grid() == g);
  CHECK((r.fields[1] - a * 2.0).max_abs() == 0.0);
  CHECK(r.meta.at("seed") == 9);
}

TEST_CASE("csv rows carry provenance") {
  CsvTable t({"a", "b"});
  t.add_row({"1", CsvTable::num(0.1)});
  const fs::path p = scratch("csv") / "t.csv";
  fs::create_directories(p.parent_path());
  t.write(p, {"abc", "v", "grid", 7});
  const std::string text = slurp(p);
  CHECK(text.find("config_hash") != std::string::npos);
  CHECK(text.find("abc") != std::string::npos);
  CHECK(text.find("0.1") != std::string::npos);
  CHECK_THROWS(t.add_row({"only one"}));
}

TEST_CASE("unknown experiment lists the available ids") {
  try {
    ExperimentConfig::from_json({{"experiment", "nope"}});
    FAIL("expected a usage error");
  } catch (const UsageError& e) {
    const std::string what = e.what();
    for (const auto& id : experiment_ids()) CHECK(what.find(id) != std::string::npos);
  }
}

TEST_CASE("config hash ignores the output directory") {
  auto a = small_config("env"), b = small_config("env");
  b["out"] = "elsewhere";
  CHECK(ExperimentConfig::from_json(a).hash() == ExperimentConfig::from_json(b).hash());
  b["seed"] = 4;
  CHECK(ExperimentConfig::from_json(a).hash() != ExperimentConfig::from_json(b).hash());
}

TEST_CASE("toml config") {
  const fs::path p = scratch("toml") / "c.toml";
  fs::create_directories(p.parent_path());
  std::ofstream(p) << "experiment = \"norm\"\nalpha = 0.5\nn_values = [1, 2]\n[grid]\nL = 4.0\nN = 64\n";
  const auto j = read_config_file(p);
  const ExperimentConfig c = ExperimentConfig::from_json(j);
  CHECK(c.experiment == "norm");
  CHECK(c.alpha == 0.5);
  CHECK(c.grid.points_per_side == 64);
  CHECK(c.n_values == std::vector<double>{1, 2});
}

TEST_CASE("same config twice gives identical csv") {
  const ExperimentConfig c = ExperimentConfig::from_json(small_config("env"));
  const fs::path a = scratch("env_a"), b = scratch("env_b");
  const ExperimentResult ra = run_experiment(c, a);
  run_experiment(c, b);
  REQUIRE(!ra.files.empty());
  CHECK(!fs::exists(a / "INCOMPLETE"));
  CHECK(fs::exists(a / "summary.json"));
  for (const auto& f : ra.files) CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("compact-support pipeline emits the n by m table") {
  auto j = small_config("compact-support");
  j["grid"] = {{"L", 8.0}, {"N", 64}};
  j["alpha"] = 0.5;
  j["kappa"] = 1.0;
  j["T"] = 0.05;
  j["dt"] = 1e-3;
  j["scale"] = 8;
  j["trials"] = 20;
  j["particles_per_mass"] = 2.0;
  j["n_values"] = {1.0, 2.0};
  j["m_values"] = {1e2, 1e3};
  const fs::path out = scratch("cs");
  run_experiment(ExperimentConfig::from_json(j), out);
  std::ifstream is(out / "compact_support_table.csv");
  int lines = 0;
  for (std::string line; std::getline(is, line);) ++lines;
  CHECK(lines == 1 + 4);
}

TEST_CASE("failed pipeline leaves an incomplete marker") {
  auto j = small_config("solve");
  j["env_file"] = "/nonexistent/env.bin";
  const fs::path out = scratch("broken");
  CHECK_THROWS_AS(run_experiment(ExperimentConfig::from_json(j), out), Error);
  CHECK(fs::exists(out / "INCOMPLETE"));
}

TEST_CASE("command line exit codes") {
  const fs::path out = scratch("cli");
  CHECK(run_cli("env gen --n 64 --L 4 --alpha 1/4 --seed 5 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "env.bin"));
  CHECK(run_cli("bogus") == 1);
  CHECK(run_cli("solve --n 64 --L 4 --alpha 1/64 --out " + out.string()) == 1);
}

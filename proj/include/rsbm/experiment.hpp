#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "rsbm/environment.hpp"
#include "rsbm/grid.hpp"
#include "rsbm/littlewood_paley.hpp"
#include "rsbm/mollifier.hpp"

namespace rsbm {

struct NormEquivalenceRow {
  double exponent = 0.0;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  double K = 0.0;  // max over samples of max(ratio, 1/ratio)
  std::vector<double> ratios;
};

// Besov norm over local norm for mollified noise samples. Negative exponents
// use the local negative Holder seminorm, positive ones the Holder norm with
// pair distance `pair_radius`.
std::vector<NormEquivalenceRow> norm_equivalence(const MollifierKit& kit, const std::vector<double>& exponents,
                                                 int samples, double noise_scale, const Box& region,
                                                 double pair_radius, std::uint64_t seed);

struct RenormalizationRow {
  double alpha = 0.0;
  double constant = 0.0;
  double dt = 0.0;
  double sup_renormalized = 0.0;
  double sup_bare = 0.0;
  double step_renormalized = 0.0;  // relative to the previous alpha
  double step_bare = 0.0;
  double drift_renormalized = 0.0;  // relative to the first alpha
  double drift_bare = 0.0;
};

struct RenormalizationReport {
  std::vector<RenormalizationRow> rows;
  bool renormalized_close = false;   // every step below 10%
  bool renormalized_shrinking = false;
  bool bare_drifts = false;          // drift grows along the sequence and ends above 10%
};

struct RenormalizationOptions {
  double kappa = 1.0;
  double horizon = 0.5;
  double dt_cap = 1e-3;
  // dt = min(dt_cap, dt_per_alpha2 * alpha^2, 0.9 / ||V||)
  double dt_per_alpha2 = 0.025;
  Box region{1.0};
};

// Solutions on the same noise for each alpha, with and without C_alpha.
RenormalizationReport renormalization_sweep(const MollifierKit& kit, const Field& xi, const std::vector<double>& alphas,
                                            const Field& initial, const RenormalizationOptions& options);

// Parsed experiment configuration; `raw` keeps every key for the pipelines.
struct ExperimentConfig {
  std::string experiment;
  GridSpec grid{8.0, 256, Boundary::periodic};
  double alpha = 0.25;
  double epsilon = 0.1;
  double kappa = 1.0;
  double horizon = 0.5;
  double dt = 1e-3;
  int delta_grid = -1;
  std::vector<double> n_values;
  std::vector<double> l_values;
  std::vector<double> m_values;
  int trials = 200;
  std::uint64_t seed = 1;
  std::string out = "runs";
  nlohmann::json raw;

  static ExperimentConfig from_json(const nlohmann::json& j);
  // Hash of the configuration without the output directory.
  std::string hash() const;
};

const std::vector<std::string>& experiment_ids();

// JSON file, or a TOML/INI style key-value file with [sections].
nlohmann::json read_config_file(const std::filesystem::path& path);

struct ExperimentResult {
  bool passed = true;
  std::filesystem::path directory;
  std::vector<std::string> files;
  nlohmann::json summary;
};

// Writes CSV tables, archives and summary.json into out_dir (defaults to config.out).
ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir = {});

}  // namespace rsbm

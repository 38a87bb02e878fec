#include "rsbm/environment.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "rsbm/errors.hpp"
#include "rsbm/norms.hpp"
#include "rsbm/spectral.hpp"

namespace rsbm {
namespace {

constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

double smoothstep_c2(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

void require_periodic(const GridSpec& g, const char* where) {
  if (g.boundary != Boundary::periodic)
    throw DomainError(std::string(where) + ": only periodic grids are supported");
}

void require_resolved(const GridSpec& g, double alpha) {
  if (alpha < 4.0 * g.spacing() * (1.0 - 1e-12))
    throw ResolutionError("mollification scale " + std::to_string(alpha) + " is below 4h = " +
                          std::to_string(4.0 * g.spacing()));
}

int min_image(int d, int n) {
  d %= n;
  if (d >= n / 2) d -= n;
  if (d < -n / 2) d += n;
  return d;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::seed_seq seq{std::uint32_t(master), std::uint32_t(master >> 32), std::uint32_t(stream),
                    std::uint32_t(stream >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (std::uint64_t(out[0]) << 32) | out[1];
}

Field sample_white_noise(const GridSpec& grid, std::uint64_t seed) {
  Field out(grid);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / grid.spacing());
  for (auto& v : out.values()) v = normal(rng);
  return out;
}

double chi(double kx, double ky) {
  const double r = max_norm(kx, ky);
  return smoothstep_c2((r - 0.125) / 0.125);
}

Field compute_I_xi(const Field& xi) {
  require_periodic(xi.grid(), "compute_I_xi");
  return apply_multiplier(xi, [](double kx, double ky) {
    const double k2 = kx * kx + ky * ky;
    return k2 == 0.0 ? 0.0 : chi(kx, ky) / (kFourPiSq * k2);
  });
}

double low_frequency_sup(const Field& xi) {
  return apply_multiplier(xi, [](double kx, double ky) { return 1.0 - chi(kx, ky); }).max_abs();
}

ConstantEstimate renormalization_constant(const MollifierKit& kit, double alpha, int n_samples,
                                          std::uint64_t master_seed) {
  if (n_samples < 2) throw InvalidInputError("renormalization constant needs at least two samples");
  const GridSpec& g = kit.grid();
  require_periodic(g, "renormalization_constant");
  require_resolved(g, alpha);
  const LPDecomposition lp(g);
  ConstantEstimate out;
  out.samples = n_samples;
  for (int s = 0; s < n_samples; ++s) {
    const Field xa = kit.mollify(sample_white_noise(g, derive_seed(master_seed, s)), alpha);
    const Field res = paraproduct(lp, compute_I_xi(xa), xa, ProductMode::resonant);
    out.per_sample.push_back(res.sum() / double(res.size()));
  }
  double mean = 0.0;
  for (double v : out.per_sample) mean += v;
  mean /= n_samples;
  double var = 0.0;
  for (double v : out.per_sample) var += (v - mean) * (v - mean);
  var /= (n_samples - 1);
  out.value = mean;
  out.std_error = std::sqrt(var / n_samples);
  return out;
}

double expected_cross_covariance(const MollifierKit& kit, double alpha, double delta) {
  const GridSpec& g = kit.grid();
  const auto ma = kit.psi_factor(alpha).factor;
  std::vector<double> md(ma.size(), 1.0);
  if (delta > 0.0) md = kit.psi_factor(delta).factor;
  const int n = g.points_per_side;
  double acc = 0.0;
  for (int qy = 0; qy < n; ++qy)
    for (int qx = 0; qx < n; ++qx) {
      const double kx = frequency(qx, g), ky = frequency(qy, g);
      const double k2 = kx * kx + ky * ky;
      if (k2 == 0.0) continue;
      const double m = ma[qx] * ma[qy];
      acc += chi(kx, ky) * m * m * md[qx] * md[qy] / (kFourPiSq * k2);
    }
  return acc / (g.side_length * g.side_length);
}

double expected_renormalization_constant(const MollifierKit& kit, double alpha) {
  return expected_cross_covariance(kit, alpha, 0.0);
}

Field Environment::potential() const {
  Field v = xi_alpha;
  v += -C_alpha;
  return v;
}

Environment make_environment_from_noise(const MollifierKit& kit, Field xi, std::uint64_t seed,
                                        const EnvironmentOptions& options) {
  const GridSpec& g = kit.grid();
  require_periodic(g, "make_environment");
  require_resolved(g, options.alpha);
  Environment env;
  env.grid = g;
  env.seed = seed;
  env.alpha = options.alpha;
  env.epsilon = options.epsilon;
  env.xi = std::move(xi);
  env.xi_alpha = kit.mollify(env.xi, options.alpha);
  env.I_xi = compute_I_xi(env.xi_alpha);
  if (options.renormalize) {
    env.C_alpha = options.constant_samples > 0
                      ? renormalization_constant(kit, options.alpha, options.constant_samples, derive_seed(seed, 1u << 20)).value
                      : expected_renormalization_constant(kit, options.alpha);
  }
  env.J_xi_chi = low_frequency_sup(env.xi_alpha);
  for (double n : options.certify_boxes) {
    const NoiseNorms nn = noise_norms(kit, env, n);
    const std::string box = "P" + std::to_string(int(n));
    env.norm_certificates["xi/" + box] = nn.xi;
    env.norm_certificates["xiX/" + box] = nn.xiX;
    env.norm_certificates["IxiXi/" + box] = nn.IxiXi;
  }
  return env;
}

Environment make_environment(const MollifierKit& kit, std::uint64_t seed, const EnvironmentOptions& options) {
  return make_environment_from_noise(kit, sample_white_noise(kit.grid(), seed), seed, options);
}

Enhancements::Enhancements(const MollifierKit& kit, Field xi, Field I_xi, double C)
    : kit_(&kit), xi_(std::move(xi)), I_xi_(std::move(I_xi)), C_(C) {
  require_same_grid(xi_, I_xi_, "Enhancements");
  if (!(xi_.grid() == kit.grid())) throw ShapeError("Enhancements: kit grid differs from field grid");
}

std::array<double, 2> Enhancements::xiX(int i, int j, int ibar, int jbar) const {
  const int n = xi_.n();
  const double h = xi_.grid().spacing();
  const double v = xi_.wrapped(ibar, jbar);
  return {v * min_image(ibar - i, n) * h, v * min_image(jbar - j, n) * h};
}

double Enhancements::IxiXi(int i, int j, int ibar, int jbar) const {
  if (min_image(ibar - i, xi_.n()) == 0 && min_image(jbar - j, xi_.n()) == 0) return 0.0;
  return (I_xi_.wrapped(ibar, jbar) - I_xi_.wrapped(i, j)) * xi_.wrapped(ibar, jbar) - C_;
}

std::array<Field, 2> Enhancements::xiX_average(double delta) const {
  const Field psi = kit_->psi(delta);
  const GridSpec& g = psi.grid();
  Field kx(g), ky(g);
  for (int j = 0; j < g.points_per_side; ++j)
    for (int i = 0; i < g.points_per_side; ++i) {
      kx(i, j) = -g.coord(i) * psi(i, j);
      ky(i, j) = -g.coord(j) * psi(i, j);
    }
  return {convolve_centered(xi_, kx), convolve_centered(xi_, ky)};
}

Field Enhancements::IxiXi_average(double delta) const {
  Field out = kit_->mollify(I_xi_ * xi_, delta);
  out -= I_xi_ * kit_->mollify(xi_, delta);
  out += -C_;
  return out;
}

NoiseNorms noise_norms(const MollifierKit& kit, const Environment& env, double n) {
  const double eps = env.epsilon;
  const Box box{n};
  const Enhancements enh(kit, env.xi_alpha, env.I_xi, env.C_alpha);
  NoiseNorms out;
  out.xi = neg_holder_seminorm(kit, env.xi_alpha, -1.0 - eps, box).value;
  out.xiX = averaged_seminorm(
                kit,
                [&](double d) {
                  auto a = enh.xiX_average(d);
                  return std::vector<Field>{std::move(a[0]), std::move(a[1])};
                },
                -eps, box, Weight{}, "xiX")
                .value;
  out.IxiXi = averaged_seminorm(
                  kit, [&](double d) { return std::vector<Field>{enh.IxiXi_average(d)}; }, -2.0 * eps, box,
                  Weight{}, "IxiXi")
                  .value;
  return out;
}

AssumptionReport assumption_check(const MollifierKit& kit, const Field& xi, const std::vector<double>& alphas,
                                  double epsilon_prime, const Box& region, const Weight& weight) {
  const GridSpec& g = kit.grid();
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    require_resolved(g, alphas[k]);
    if (k > 0 && alphas[k] > alphas[k - 1]) throw InvalidInputError("alpha sequence must be non-increasing");
  }
  const LPDecomposition lp(g);
  struct Level {
    Field noise, resonant;
    double C;
  };
  std::vector<Level> levels;
  for (double a : alphas) {
    Field xa = kit.mollify(xi, a);
    Field res = paraproduct(lp, compute_I_xi(xa), xa, ProductMode::resonant);
    levels.push_back({std::move(xa), std::move(res), expected_renormalization_constant(kit, a)});
  }
  AssumptionReport out;
  out.epsilon_prime = epsilon_prime;
  for (const auto& l : levels) out.constants.push_back(l.C);
  auto renorm_diff = [&](const Level& a, const Level& b) {
    Field d = a.resonant - b.resonant;
    d += -(a.C - b.C);
    return d;
  };
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    const Level& a = levels[k];
    const Level& b = levels[k + 1];
    AssumptionStep s;
    s.alpha = alphas[k];
    s.alpha_next = alphas[k + 1];
    s.noise_difference = neg_holder_seminorm(kit, a.noise - b.noise, -1.0 - epsilon_prime, region, weight).value;
    s.renormalized_difference = neg_holder_seminorm(kit, renorm_diff(a, b), -2.0 * epsilon_prime, region, weight).value;
    s.bare_difference = neg_holder_seminorm(kit, a.resonant - b.resonant, -2.0 * epsilon_prime, region, weight).value;
    s.bare_cumulative = neg_holder_seminorm(kit, levels[0].resonant - b.resonant, -2.0 * epsilon_prime, region, weight).value;
    s.renormalized_cumulative = neg_holder_seminorm(kit, renorm_diff(levels[0], b), -2.0 * epsilon_prime, region, weight).value;
    out.steps.push_back(s);
  }
  out.cauchy = true;
  for (std::size_t k = 1; k < out.steps.size(); ++k)
    if (!(out.steps[k].renormalized_difference < out.steps[k - 1].renormalized_difference &&
          out.steps[k].noise_difference < out.steps[k - 1].noise_difference))
      out.cauchy = false;
  return out;
}

}  // namespace rsbm

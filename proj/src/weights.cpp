#include "rsbm/weights.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "rsbm/errors.hpp"
#include "rsbm/grid.hpp"

namespace rsbm {

Weight Weight::parse(const std::string& spec) {
  if (spec.empty() || spec == "none" || spec == "1") return unit();
  std::istringstream is(spec);
  std::string kind, a, s;
  std::getline(is, kind, ':');
  std::getline(is, a, ':');
  std::getline(is, s, ':');
  try {
    if (kind == "p") return polynomial(std::stod(a));
    if (kind == "e") return exponential(std::stod(a), s.empty() ? 0.5 : std::stod(s));
  } catch (const std::invalid_argument&) {
  }
  throw UsageError("cannot parse weight '" + spec + "' (expected none, p:a or e:l[:sigma])");
}

double Weight::operator()(double x, double y) const {
  const double r = max_norm(x, y);
  switch (kind) {
    case WeightKind::unit: return 1.0;
    case WeightKind::polynomial: return std::pow(1.0 + r, parameter);
    case WeightKind::exponential: return std::exp(parameter * std::pow(r, sigma));
  }
  return 1.0;
}

double Weight::lambda() const {
  switch (kind) {
    case WeightKind::unit: return 0.0;
    case WeightKind::polynomial: return std::abs(parameter);
    case WeightKind::exponential: return std::abs(parameter);
  }
  return 0.0;
}

double Weight::omega(double x, double y) const {
  const double r = max_norm(x, y);
  return kind == WeightKind::exponential ? std::pow(r, sigma) : std::log1p(r);
}

std::string Weight::describe() const {
  std::ostringstream os;
  switch (kind) {
    case WeightKind::unit: os << "none"; break;
    case WeightKind::polynomial: os << "p:" << parameter; break;
    case WeightKind::exponential: os << "e:" << parameter << ":" << sigma; break;
  }
  return os.str();
}

AdmissibilityReport check_admissibility(const Weight& w, double radius, int pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-radius, radius);
  AdmissibilityReport out;
  out.pairs = pairs;
  for (int k = 0; k < pairs; ++k) {
    const double x0 = u(rng), x1 = u(rng), y0 = u(rng), y1 = u(rng);
    const double ratio = w(x0, x1) / (w(y0, y1) * std::exp(w.lambda() * w.omega(x0 - y0, x1 - y1)));
    out.worst_ratio = std::max(out.worst_ratio, ratio);
  }
  out.admissible = out.worst_ratio <= 1.0 + 1e-12;
  return out;
}

}  // namespace rsbm

#pragma once

#include <cstdint>
#include <string>

namespace rsbm {

enum class WeightKind { unit, polynomial, exponential };

// p(a)(x) = (1 + |x|)^a or e(l)(x) = exp(l |x|^sigma), |x| the max norm.
struct Weight {
  WeightKind kind = WeightKind::unit;
  double parameter = 0.0;
  double sigma = 0.5;

  static Weight unit() { return {}; }
  static Weight polynomial(double a) { return {WeightKind::polynomial, a, 0.5}; }
  static Weight exponential(double l, double sigma = 0.5) { return {WeightKind::exponential, l, sigma}; }
  // "p:2", "e:-1.5", "e:-1.5:0.5", "none"
  static Weight parse(const std::string& spec);

  double operator()(double x, double y) const;
  // lambda in theta(x) <= theta(y) exp(lambda omega(x - y))
  double lambda() const;
  double omega(double x, double y) const;
  std::string describe() const;
};

struct AdmissibilityReport {
  double worst_ratio = 0.0;  // max of theta(x) / (theta(y) e^{lambda omega(x-y)})
  int pairs = 0;
  bool admissible = false;
};

// Checks the admissibility inequality with K = 1 on sampled pairs in [-R, R]^2.
AdmissibilityReport check_admissibility(const Weight& w, double radius, int pairs, std::uint64_t seed);

}  // namespace rsbm

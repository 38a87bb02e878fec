#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rsbm/grid.hpp"
#include "rsbm/littlewood_paley.hpp"
#include "rsbm/mollifier.hpp"
#include "rsbm/weights.hpp"

namespace rsbm {

struct NormReport {
  std::string symbol;
  double alpha = 0.0;
  Box region{};
  Weight weight{};
  double value = 0.0;
  double argmax_scale = 0.0;  // delta for distributional norms, pair distance for Holder norms
  double argmax_x = 0.0;
  double argmax_y = 0.0;
};

// max over the delta grid of delta^{-alpha} sup_region |f_delta| / theta.
NormReport neg_holder_seminorm(const MollifierKit& kit, const Field& f, double alpha, const Box& region,
                               const Weight& weight = {});

// Same sup for a family of delta-averages x -> A_delta(x) (two-point objects).
// Vector-valued averages use the max over components.
using AverageFamily = std::function<std::vector<Field>(double delta)>;
NormReport averaged_seminorm(const MollifierKit& kit, const AverageFamily& averages, double alpha,
                             const Box& region, const Weight& weight, const std::string& symbol);

struct PairStencil {
  std::vector<std::array<int, 2>> offsets;  // half-plane, excludes (0, 0)
  bool exhaustive = false;
};
// Offsets with |offset|_inf h <= r. Exhaustive when region points * offsets
// fits in the budget; otherwise all short offsets plus dyadic rings.
PairStencil make_pair_stencil(const GridSpec& grid, const Box& region, double r, std::size_t budget = 40'000'000);

// sup over pairs in the region within distance r of |f(x) - f(y)| / (theta |x - y|^alpha).
NormReport holder_seminorm(const Field& f, double alpha, const Box& region, double r, const Weight& weight = {});
// sup |f| / theta + seminorm
double holder_norm(const Field& f, double alpha, const Box& region, double r, const Weight& weight = {});

// max_j 2^{j alpha} || Delta_j f / theta ||_inf over the whole torus.
double besov_norm(const LPDecomposition& lp, const Field& f, double alpha, const Weight& weight = {});
std::vector<double> besov_profile(const LPDecomposition& lp, const Field& f, double alpha, const Weight& weight = {});

// U(x, xbar) on base points times a shared stencil of offsets.
struct TwoVariableField {
  GridSpec grid;
  std::vector<std::array<int, 2>> base_points;   // grid indices
  std::vector<std::array<int, 2>> offsets;       // includes (0,0) and the four unit offsets
  std::vector<double> values;                    // base-major
  std::vector<std::array<double, 2>> gradient;   // nu at each base point
  double at(std::size_t b, std::size_t s) const { return values[b * offsets.size() + s]; }
};

// Central-difference gradient of U(x, .) at xbar = x.
void compute_gradient(TwoVariableField& u);
// Stencil of all offsets with |offset|_inf h <= r (strided beyond `dense` cells).
std::vector<std::array<int, 2>> full_stencil(const GridSpec& grid, double r, int dense = 16);

// sup over base points and partners within r of |U - nu (xbar - x)| / |xbar - x|^alpha.
NormReport two_variable_holder(const TwoVariableField& u, double alpha, double r);

// Spatial Holder norm plus time-Holder(alpha/2) part, on the region.
struct SpaceTimeNorm {
  double spatial = 0.0;
  double temporal = 0.0;
  double total() const { return spatial + temporal; }
};
SpaceTimeNorm space_time_norm(std::span<const Field> slices, std::span<const double> times, double alpha,
                              const Box& region, double r, const std::function<Weight(double)>& weight_at);

}  // namespace rsbm

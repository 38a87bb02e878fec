#pragma once

#include <vector>

#include "rsbm/grid.hpp"

namespace rsbm {

// Smooth radial dyadic partition of unity. rho_{-1} = f(|k|) and
// rho_j = f(2^{-j-1}|k|) - f(2^{-j}|k|), where f is 1 below 3/4 and 0 above 4/3.
// The last block absorbs everything above it so the blocks sum to one exactly.
class LPDecomposition {
 public:
  explicit LPDecomposition(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  int j_max() const { return j_max_; }
  double rho(int j, double k) const;
  // Blocks for j = -1..j_max; element 0 holds j = -1.
  std::vector<Field> blocks(const Field& f) const;
  Field block(const Field& f, int j) const;

  static double cutoff(double r);

 private:
  GridSpec grid_;
  int j_max_ = 0;
};

enum class ProductMode { less, resonant };

// less: sum_{i < j-1} D_i f D_j g. resonant: sum_{|i-j| <= 1} D_i f D_j g.
Field paraproduct(const LPDecomposition& lp, const Field& f, const Field& g, ProductMode mode);

}  // namespace rsbm

#pragma once

#include "rsbm/grid.hpp"

namespace rsbm {

// C^2 step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);

// Annulus forcing in the max-norm radius s: 0 on P_n and outside P_{n+2},
// m on n + 1/m <= s <= n + 1, smooth ramps in between.
double annulus_forcing_value(double s, double n, double m);
Field annulus_forcing(const GridSpec& grid, double n, double m);

// 1 on P_{r-2}, 0 off P_{r-1}.
Field localizer(const GridSpec& grid, double r);

struct CutoffFamily {
  GridSpec grid;
  double n = 0.0;
  double m = 0.0;
  Box box{};
  Field forcing;    // phi_n^m
  Field localizer;  // eta_n
};

// Throws DomainError when P_{n+2} does not fit inside the grid.
CutoffFamily build_cutoffs(const GridSpec& grid, double n, double m);

}  // namespace rsbm

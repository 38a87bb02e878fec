#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rsbm {

enum class Boundary { periodic, dirichlet };

// Square grid centred at the origin. Index i along an axis sits at (i - N/2) h,
// so the origin is a grid point. On dirichlet grids index 0 is the boundary
// x = -L/2 (held at zero) and the opposite face coincides with it after wrap.
struct GridSpec {
  double side_length = 1.0;
  int points_per_side = 64;
  Boundary boundary = Boundary::periodic;

  double spacing() const { return side_length / points_per_side; }
  double coord(int i) const { return (i - points_per_side / 2) * spacing(); }
  std::size_t size() const { return std::size_t(points_per_side) * std::size_t(points_per_side); }
  // Largest |x|_inf representable without crossing the seam.
  double half_width() const { return 0.5 * side_length; }
  void validate() const;
  std::string describe() const;

  bool operator==(const GridSpec&) const = default;
};

// Closed box [-r, r]^2 in the max norm.
struct Box {
  double radius = 1.0;
  bool contains(double x, double y) const;
  std::string describe() const;
};

inline double max_norm(double x, double y) { return std::max(std::abs(x), std::abs(y)); }

class Field {
 public:
  Field() = default;
  explicit Field(const GridSpec& grid, double fill = 0.0);

  static Field from_function(const GridSpec& grid, const std::function<double(double, double)>& f);

  const GridSpec& grid() const { return grid_; }
  int n() const { return grid_.points_per_side; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // i indexes x (fastest), j indexes y.
  double& operator()(int i, int j) { return data_[std::size_t(j) * n() + i]; }
  double operator()(int i, int j) const { return data_[std::size_t(j) * n() + i]; }
  double& operator[](std::size_t k) { return data_[k]; }
  double operator[](std::size_t k) const { return data_[k]; }
  // Periodic access with wrapped indices.
  double wrapped(int i, int j) const;

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(const Field& o);
  Field& operator*=(double s);
  Field& operator+=(double s);

  double sum() const;
  double integral() const { return sum() * grid_.spacing() * grid_.spacing(); }
  double min() const;
  double max() const;
  double max_abs() const;
  // Sup of |f| over grid points of the box.
  double max_abs_on(const Box& box) const;

 private:
  GridSpec grid_{};
  std::vector<double> data_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(Field a, const Field& b);
Field operator*(Field a, double s);
Field operator*(double s, Field a);

void require_same_grid(const Field& a, const Field& b, const char* where);

// Index range [lo, hi] along an axis covering coordinates in [-r, r].
struct IndexRange {
  int lo = 0;
  int hi = -1;
  int count() const { return hi - lo + 1; }
};
IndexRange box_indices(const GridSpec& grid, double r);

// Discrete delta of unit mass at the origin.
Field point_mass(const GridSpec& grid);

bool is_power_of_two(int n);

}  // namespace rsbm

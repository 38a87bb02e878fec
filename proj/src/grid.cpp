#include "rsbm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rsbm/errors.hpp"

namespace rsbm {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void GridSpec::validate() const {
  if (!(side_length > 0.0)) throw DomainError("grid side length must be positive");
  if (!is_power_of_two(points_per_side) || points_per_side < 4)
    throw DomainError("points per side must be a power of two >= 4, got " +
                      std::to_string(points_per_side));
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  os << points_per_side << "x" << points_per_side << "/L=" << side_length
     << (boundary == Boundary::periodic ? "/periodic" : "/dirichlet");
  return os.str();
}

bool Box::contains(double x, double y) const {
  return max_norm(x, y) <= radius + 1e-12 * std::max(1.0, radius);
}

std::string Box::describe() const {
  std::ostringstream os;
  os << "P" << radius;
  return os.str();
}

Field::Field(const GridSpec& grid, double fill) : grid_(grid) {
  grid_.validate();
  data_.assign(grid_.size(), fill);
}

Field Field::from_function(const GridSpec& grid, const std::function<double(double, double)>& f) {
  Field out(grid);
  const int n = grid.points_per_side;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) out(i, j) = f(grid.coord(i), grid.coord(j));
  return out;
}

double Field::wrapped(int i, int j) const {
  const int m = n();
  i %= m;
  j %= m;
  if (i < 0) i += m;
  if (j < 0) j += m;
  return (*this)(i, j);
}

void require_same_grid(const Field& a, const Field& b, const char* where) {
  if (!(a.grid() == b.grid()) || a.size() != b.size())
    throw ShapeError(std::string(where) + ": fields live on different grids (" +
                     a.grid().describe() + " vs " + b.grid().describe() + ")");
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(*this, o, "operator+=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(*this, o, "operator-=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

Field& Field::operator*=(const Field& o) {
  require_same_grid(*this, o, "operator*=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] *= o.data_[k];
  return *this;
}

Field& Field::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

Field& Field::operator+=(double s) {
  for (auto& v : data_) v += s;
  return *this;
}

double Field::sum() const {
  double s = 0.0;
  for (double v : data_) s += v;
  return s;
}

double Field::min() const { return *std::min_element(data_.begin(), data_.end()); }
double Field::max() const { return *std::max_element(data_.begin(), data_.end()); }

double Field::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Field::max_abs_on(const Box& box) const {
  const auto r = box_indices(grid_, box.radius);
  double m = 0.0;
  for (int j = r.lo; j <= r.hi; ++j)
    for (int i = r.lo; i <= r.hi; ++i) m = std::max(m, std::abs((*this)(i, j)));
  return m;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(Field a, const Field& b) { return a *= b; }
Field operator*(Field a, double s) { return a *= s; }
Field operator*(double s, Field a) { return a *= s; }

IndexRange box_indices(const GridSpec& grid, double r) {
  const double h = grid.spacing();
  const int half = grid.points_per_side / 2;
  // points with |(i - half) h| <= r, with a little slack for round-off
  const int k = int(std::floor(r / h + 1e-9));
  IndexRange out{half - k, half + k};
  if (out.lo < 0 || out.hi >= grid.points_per_side)
    throw DomainError("box of radius " + std::to_string(r) + " exceeds grid " + grid.describe());
  return out;
}

Field point_mass(const GridSpec& grid) {
  Field out(grid);
  const double h = grid.spacing();
  out(grid.points_per_side / 2, grid.points_per_side / 2) = 1.0 / (h * h);
  return out;
}

}  // namespace rsbm

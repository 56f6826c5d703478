#include "radtrans/field.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace radtrans {

CartesianGrid::CartesianGrid(std::size_t n, double half_width)
    : n_(n), half_width_(half_width), spacing_(0.0) {
  if (n < 8 || n % 2 != 0) {
    throw std::invalid_argument("grid size n must be even and at least 8, got " + std::to_string(n));
  }
  if (!(half_width > 0.0)) throw std::invalid_argument("grid half width L must be positive");
  spacing_ = 2.0 * half_width / static_cast<double>(n - 1);
}

ScalarField::ScalarField(const CartesianGrid& grid, double fill)
    : grid_(grid), values_(grid.node_count(), fill) {}

ScalarField::ScalarField(const CartesianGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.node_count()) {
    throw std::invalid_argument("field has " + std::to_string(values_.size()) +
                                " values, grid needs " + std::to_string(grid_.node_count()));
  }
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double interpolate_bilinear(const ScalarField& field, Vec2 y) {
  const CartesianGrid& g = field.grid();
  const double fx = (y.x + g.half_width()) / g.spacing();
  const double fy = (y.y + g.half_width()) / g.spacing();
  const double last = static_cast<double>(g.size() - 1);
  if (fx < 0.0 || fy < 0.0 || fx > last || fy > last) return 0.0;
  const auto i = std::min(static_cast<std::size_t>(fx), g.size() - 2);
  const auto j = std::min(static_cast<std::size_t>(fy), g.size() - 2);
  const double ax = fx - static_cast<double>(i);
  const double ay = fy - static_cast<double>(j);
  return (1.0 - ax) * (1.0 - ay) * field(i, j) + ax * (1.0 - ay) * field(i + 1, j) +
         (1.0 - ax) * ay * field(i, j + 1) + ax * ay * field(i + 1, j + 1);
}

}  // namespace radtrans

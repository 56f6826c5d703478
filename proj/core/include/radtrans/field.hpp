#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace radtrans {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm_squared(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Vertex-centred uniform square mesh on [-L, L]^2 with n nodes per side.
///
/// Node (i, j) sits at (-L + i h, -L + j h) with h = 2L / (n - 1); i indexes x
/// and j indexes y. Storage everywhere in the library is row-major in j.
class CartesianGrid {
 public:
  CartesianGrid(std::size_t n, double half_width);

  std::size_t size() const { return n_; }
  std::size_t node_count() const { return n_ * n_; }
  double half_width() const { return half_width_; }
  double spacing() const { return spacing_; }

  double coordinate(std::size_t i) const {
    return -half_width_ + static_cast<double>(i) * spacing_;
  }
  Vec2 node(std::size_t i, std::size_t j) const { return {coordinate(i), coordinate(j)}; }
  std::size_t index(std::size_t i, std::size_t j) const { return j * n_ + i; }

  friend bool operator==(const CartesianGrid&, const CartesianGrid&) = default;

 private:
  std::size_t n_;
  double half_width_;
  double spacing_;
};

/// Nodal values on a CartesianGrid.
class ScalarField {
 public:
  explicit ScalarField(const CartesianGrid& grid, double fill = 0.0);
  ScalarField(const CartesianGrid& grid, std::vector<double> values);

  const CartesianGrid& grid() const { return grid_; }

  double& operator()(std::size_t i, std::size_t j) { return values_[grid_.index(i, j)]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[grid_.index(i, j)]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double max_abs() const;

 private:
  CartesianGrid grid_;
  std::vector<double> values_;
};

/// Bilinear interpolation of nodal values at an arbitrary point; zero outside
/// the grid square.
double interpolate_bilinear(const ScalarField& field, Vec2 y);

}  // namespace radtrans

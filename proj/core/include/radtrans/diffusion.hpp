#pragma once

// Stationary thermal diffusion in the atmosphere ring,
//   -kappa_T Laplacian T + P(T) = Jbar,   T = T_E on the planet surface,
// where P is the emitted power law (sigma T^4 in the grey case). Discretised
// by second-order finite differences on a uniform polar grid and solved by
// Picard linearisation of P.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "radtrans/field.hpp"
#include "radtrans/geometry.hpp"
#include "radtrans/spectral.hpp"

namespace radtrans {

/// n_r radii spanning [R, R + H] (both ends included) times n_theta periodic
/// angles theta_j = 2 pi j / n_theta.
class PolarGrid {
 public:
  PolarGrid(const AnnulusDomain& domain, std::size_t n_r, std::size_t n_theta);

  const AnnulusDomain& domain() const { return domain_; }
  std::size_t radial_count() const { return n_r_; }
  std::size_t angular_count() const { return n_theta_; }
  std::size_t node_count() const { return n_r_ * n_theta_; }
  double radial_spacing() const { return dr_; }
  double angular_spacing() const { return dtheta_; }

  double radius(std::size_t i) const { return domain_.inner_radius() + static_cast<double>(i) * dr_; }
  double angle(std::size_t j) const { return static_cast<double>(j) * dtheta_; }
  Vec2 node(std::size_t i, std::size_t j) const;
  std::size_t index(std::size_t i, std::size_t j) const { return i * n_theta_ + j; }

 private:
  AnnulusDomain domain_;
  std::size_t n_r_;
  std::size_t n_theta_;
  double dr_;
  double dtheta_;
};

class PolarField {
 public:
  explicit PolarField(const PolarGrid& grid, double fill = 0.0)
      : grid_(grid), values_(grid.node_count(), fill) {}

  const PolarGrid& grid() const { return grid_; }
  double& operator()(std::size_t i, std::size_t j) { return values_[grid_.index(i, j)]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[grid_.index(i, j)]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

 private:
  PolarGrid grid_;
  std::vector<double> values_;
};

enum class Linearization {
  kLagged,  ///< T^4 -> T_m^3 T_{m+1}
  kNewton,  ///< T^4 -> T_m^4 + 4 T_m^3 (T_{m+1} - T_m)
};

enum class OuterBoundary {
  kNeumann,    ///< zero flux at r = R + H
  kDirichlet,  ///< T = T_E at r = R + H as well
};

struct DiffusionConfig {
  double kappa_T = 0.01 * kSigma;
  double T_E = 0.06;
  int max_picard = 50;
  double picard_tol = 1e-8;
  OuterBoundary outer = OuterBoundary::kNeumann;
  Linearization linearization = Linearization::kLagged;
  /// Solve -kappa_T Laplacian T + T = P^{-1}(Jbar) once instead, the
  /// relaxation used by the original finite-element script.
  bool relaxation_variant = false;

  void validate() const;
};

/// Emitted power P(T), its derivative, and its inverse.
struct EmissionLaw {
  std::function<double(double)> power;
  std::function<double(double)> derivative;
  std::function<double(double)> inverse;

  static EmissionLaw grey();
  static EmissionLaw spectral(const SpectralModel& model, RescaledTemperature T_max);
};

struct DiffusionReport {
  int iterations = 0;
  bool converged = false;
  bool residuals_nonincreasing = true;
  bool switched_to_newton = false;
  std::vector<double> residuals;
  std::vector<std::string> warnings;
};

struct DiffusionResult {
  PolarField temperature;
  DiffusionReport report;
};

/// Picard iteration for the nonlinear diffusion balance. With kappa_T = 0 the
/// balance is algebraic and P^{-1}(Jbar) is returned at every node. If the
/// lagged iteration is seen to diverge (residual growing twice in a row) it
/// continues with Newton linearisation and records a warning.
DiffusionResult solve_diffusion(const PolarField& source, const DiffusionConfig& cfg,
                                const PolarField& T_init,
                                const EmissionLaw& law = EmissionLaw::grey());

/// Bilinear interpolation of a Cartesian field at the polar nodes.
PolarField to_polar(const ScalarField& field, const PolarGrid& grid);

/// Bilinear interpolation in (r, theta) at Cartesian nodes; nodes outside the
/// closed annulus get 0.
ScalarField to_cartesian(const PolarField& field, const CartesianGrid& grid);

}  // namespace radtrans

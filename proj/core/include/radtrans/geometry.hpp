#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "radtrans/field.hpp"
#include "radtrans/spectral.hpp"

namespace radtrans {

/// The atmosphere {R < |x| < R + H} around a planet of radius R.
class AnnulusDomain {
 public:
  AnnulusDomain(double inner_radius, double thickness);

  double inner_radius() const { return inner_; }
  double thickness() const { return thickness_; }
  double outer_radius() const { return inner_ + thickness_; }

  /// Open annulus; grid nodes strictly inside carry the physical fields.
  bool contains(Vec2 x) const;
  /// Closed annulus with a relative slack of 1e-12 on both radii.
  bool contains_closure(Vec2 x) const;

 private:
  double inner_;
  double thickness_;
};

/// Light arriving on the planet surface: Q_nu = Q0 B_nu(T_s) x_E^+. The
/// surface x-coordinate enters without the 1/R normalisation, as in the
/// reference computations.
struct BoundaryIllumination {
  double q0 = 0.0;
  RescaledTemperature source_temperature{1.0};

  void validate() const;
};

/// Unit direction of the k-th of n midpoint angles theta_k = (k + 1/2) 2 pi / n.
Vec2 quadrature_direction(std::size_t k, std::size_t n_theta);

/// Distance s >= 0 along the backward ray x - s omega to the circle |y| = R, or
/// nullopt when the ray misses. Throws std::domain_error if omega is not a unit
/// vector or |x| < R.
std::optional<double> exit_time(Vec2 x, Vec2 omega, double radius);

/// Distance along x - s omega at which the ray leaves the disc |y| < radius,
/// for x inside that disc.
double outer_exit_distance(Vec2 x, Vec2 omega, double radius);

/// Frequency-integrated boundary source for constant absorption kappa,
/// (Q0 sigma T_s^4 / 2 pi) int (x - tau cos theta)^+ exp(-kappa tau) dtheta.
/// Points outside the closed annulus evaluate to 0.
double boundary_source_grey(Vec2 x, const AnnulusDomain& domain,
                            const BoundaryIllumination& illum, double kappa,
                            std::size_t n_theta = 60);

/// kappa-weighted boundary source
/// (Q0 / 2 pi) int (x - tau cos theta)^+ sum_nu B_nu(T_s) kappa_nu exp(-kappa_nu tau) dnu dtheta
/// using the model's frequency grid.
double boundary_source_spectral(Vec2 x, const AnnulusDomain& domain,
                                const BoundaryIllumination& illum, const SpectralModel& model,
                                std::size_t n_theta = 60);

/// Unweighted per-frequency boundary source S^E_nu at each frequency node of the
/// model, needed when scattering couples the frequencies to their own J_nu.
std::vector<double> boundary_source_per_frequency(Vec2 x, const AnnulusDomain& domain,
                                                  const BoundaryIllumination& illum,
                                                  const SpectralModel& model,
                                                  std::size_t n_theta = 60);

ScalarField sample_boundary_source_grey(const CartesianGrid& grid, const AnnulusDomain& domain,
                                        const BoundaryIllumination& illum, double kappa,
                                        std::size_t n_theta = 60);
ScalarField sample_boundary_source_spectral(const CartesianGrid& grid,
                                            const AnnulusDomain& domain,
                                            const BoundaryIllumination& illum,
                                            const SpectralModel& model,
                                            std::size_t n_theta = 60);

}  // namespace radtrans

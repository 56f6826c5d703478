#pragma once

// Brute-force evaluation of the mean-intensity operator by the method of
// characteristics: for every direction march the backward ray to the planet or
// to the top of the atmosphere, attenuating the isotropic source on the way.
// Slow by construction; it is the reference the convolution path is checked
// against.

#include <cstddef>
#include <functional>

#include "radtrans/field.hpp"
#include "radtrans/geometry.hpp"

namespace radtrans {

struct RayQuadrature {
  std::size_t n_theta = 60;
  double h_ray = 0.006;

  /// 60 directions and a marching step of H / 50.
  static RayQuadrature defaults(const AnnulusDomain& domain);
  void validate(const AnnulusDomain& domain) const;
};

/// Isotropic source S(y) evaluated anywhere in the plane.
using SourceFunction = std::function<double(Vec2)>;

/// Incoming intensity at the point where the backward ray leaves the
/// atmosphere, travelling in direction omega. on_planet distinguishes the
/// planet surface from the outer circle.
using BoundaryIntensity = std::function<double(Vec2 exit_point, Vec2 omega, bool on_planet)>;

/// Bilinear interpolation of a grid field; zero outside the grid square.
SourceFunction bilinear_source(const ScalarField& field);

/// Frequency-integrated planet illumination Q0 sigma T_s^4 x_E^+, dark sky.
BoundaryIntensity planet_illumination(const BoundaryIllumination& illum);

/// Q(x - tau omega) e^{-kappa tau} + int_0^tau kappa e^{-kappa s} S(x - s omega) ds
/// along one direction. Each marching segment weights the midpoint source by
/// the exact attenuation e^{-kappa s0} - e^{-kappa s1}, so a constant source is
/// integrated to round-off.
double intensity_along_ray(Vec2 x, Vec2 omega, const SourceFunction& source,
                           const BoundaryIntensity& boundary, double kappa,
                           const AnnulusDomain& domain, double h_ray);

/// Angular average of intensity_along_ray at every grid node inside the
/// annulus; zero elsewhere.
ScalarField mean_intensity_direct(const CartesianGrid& grid, const SourceFunction& source,
                                  const BoundaryIntensity& boundary, double kappa,
                                  const AnnulusDomain& domain, const RayQuadrature& quad);

}  // namespace radtrans

#include "radtrans/transport_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace radtrans {

RayQuadrature RayQuadrature::defaults(const AnnulusDomain& domain) {
  return RayQuadrature{60, domain.thickness() / 50.0};
}

void RayQuadrature::validate(const AnnulusDomain& domain) const {
  if (n_theta < 4) throw std::invalid_argument("ray quadrature: n_theta must be at least 4");
  if (!(h_ray > 0.0 && h_ray < domain.thickness())) {
    throw std::invalid_argument("ray quadrature: h_ray must lie in (0, H)");
  }
}

SourceFunction bilinear_source(const ScalarField& field) {
  return [field](Vec2 y) { return interpolate_bilinear(field, y); };
}

BoundaryIntensity planet_illumination(const BoundaryIllumination& illum) {
  const double ts = illum.source_temperature.value();
  const double scale = illum.q0 * sigma() * ts * ts * ts * ts;
  return [scale](Vec2 exit_point, Vec2, bool on_planet) {
    return on_planet ? scale * std::max(exit_point.x, 0.0) : 0.0;
  };
}

double intensity_along_ray(Vec2 x, Vec2 omega, const SourceFunction& source,
                           const BoundaryIntensity& boundary, double kappa,
                           const AnnulusDomain& domain, double h_ray) {
  const auto tau = exit_time(x, omega, domain.inner_radius());
  const bool on_planet = tau.has_value();
  const double length = on_planet ? *tau : outer_exit_distance(x, omega, domain.outer_radius());

  const Vec2 exit_point = x - length * omega;
  double value = boundary(exit_point, omega, on_planet) * std::exp(-kappa * length);
  if (length == 0.0) return value;

  const auto segments = static_cast<std::size_t>(std::max(1.0, std::ceil(length / h_ray)));
  const double ds = length / static_cast<double>(segments);
  double attenuation_start = 1.0;
  for (std::size_t k = 0; k < segments; ++k) {
    const double s0 = static_cast<double>(k) * ds;
    const double s1 = k + 1 == segments ? length : s0 + ds;
    const double attenuation_end = std::exp(-kappa * s1);
    value += (attenuation_start - attenuation_end) * source(x - (0.5 * (s0 + s1)) * omega);
    attenuation_start = attenuation_end;
  }
  return value;
}

ScalarField mean_intensity_direct(const CartesianGrid& grid, const SourceFunction& source,
                                  const BoundaryIntensity& boundary, double kappa,
                                  const AnnulusDomain& domain, const RayQuadrature& quad) {
  quad.validate(domain);
  ScalarField out(grid);
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t sj = 0; sj < n; ++sj) {
    const auto j = static_cast<std::size_t>(sj);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Vec2 x = grid.node(i, j);
      if (!domain.contains(x)) continue;
      double sum = 0.0;
      for (std::size_t k = 0; k < quad.n_theta; ++k) {
        sum += intensity_along_ray(x, quadrature_direction(k, quad.n_theta), source, boundary,
                                   kappa, domain, quad.h_ray);
      }
      out(i, j) = sum / static_cast<double>(quad.n_theta);
    }
  }
  return out;
}

}  // namespace radtrans

#include "radtrans/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace radtrans {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_unit(Vec2 omega) {
  if (std::abs(norm_squared(omega) - 1.0) > 2e-12) {
    throw std::domain_error("direction must be a unit vector");
  }
}

// Calls visit(tau, surface_x) for every quadrature direction whose backward
// ray reaches the planet, with dtheta already folded into the caller.
template <typename Visit>
void for_each_planet_ray(Vec2 x, double radius, std::size_t n_theta, Visit&& visit) {
  for (std::size_t k = 0; k < n_theta; ++k) {
    const Vec2 omega = quadrature_direction(k, n_theta);
    const auto tau = exit_time(x, omega, radius);
    if (!tau) continue;
    const double surface_x = x.x - *tau * omega.x;
    if (surface_x <= 0.0) continue;
    visit(*tau, surface_x);
  }
}

}  // namespace

AnnulusDomain::AnnulusDomain(double inner_radius, double thickness)
    : inner_(inner_radius), thickness_(thickness) {
  if (!(inner_radius > 0.0)) throw std::invalid_argument("R must be positive");
  if (!(thickness > 0.0)) throw std::invalid_argument("H must be positive");
}

bool AnnulusDomain::contains(Vec2 x) const {
  const double r2 = norm_squared(x);
  return r2 > inner_ * inner_ && r2 < outer_radius() * outer_radius();
}

bool AnnulusDomain::contains_closure(Vec2 x) const {
  const double r = norm(x);
  return r >= inner_ * (1.0 - 1e-12) && r <= outer_radius() * (1.0 + 1e-12);
}

void BoundaryIllumination::validate() const {
  if (!(q0 >= 0.0)) throw std::invalid_argument("Q0 must be nonnegative");
  if (!(source_temperature.value() > 0.0)) throw std::invalid_argument("T_s must be positive");
}

Vec2 quadrature_direction(std::size_t k, std::size_t n_theta) {
  const double theta = (static_cast<double>(k) + 0.5) * kTwoPi / static_cast<double>(n_theta);
  return {std::cos(theta), std::sin(theta)};
}

std::optional<double> exit_time(Vec2 x, Vec2 omega, double radius) {
  require_unit(omega);
  const double r2 = norm_squared(x);
  const double excess = r2 - radius * radius;
  if (excess < -1e-12 * radius * radius) {
    throw std::domain_error("exit_time: point lies inside the planet");
  }
  const double p = dot(x, omega);
  const double disc = p * p - excess;
  if (disc < 0.0 || p <= 0.0) return std::nullopt;
  // p - sqrt(disc), written without cancellation.
  const double s = std::max(excess, 0.0) / (p + std::sqrt(disc));
  if (s < 0.0) return std::nullopt;
  return s;
}

double outer_exit_distance(Vec2 x, Vec2 omega, double radius) {
  const double p = dot(x, omega);
  const double disc = p * p - norm_squared(x) + radius * radius;
  return std::max(0.0, p + std::sqrt(std::max(disc, 0.0)));
}

double boundary_source_grey(Vec2 x, const AnnulusDomain& domain,
                            const BoundaryIllumination& illum, double kappa,
                            std::size_t n_theta) {
  if (n_theta < 4) throw std::invalid_argument("n_theta must be at least 4");
  if (!domain.contains_closure(x) || illum.q0 == 0.0) return 0.0;
  const double ts = illum.source_temperature.value();
  double sum = 0.0;
  for_each_planet_ray(x, domain.inner_radius(), n_theta, [&](double tau, double surface_x) {
    sum += surface_x * std::exp(-kappa * tau);
  });
  const double dtheta = kTwoPi / static_cast<double>(n_theta);
  return illum.q0 * sigma() * ts * ts * ts * ts / kTwoPi * dtheta * sum;
}

double boundary_source_spectral(Vec2 x, const AnnulusDomain& domain,
                                const BoundaryIllumination& illum, const SpectralModel& model,
                                std::size_t n_theta) {
  if (n_theta < 4) throw std::invalid_argument("n_theta must be at least 4");
  if (!domain.contains_closure(x) || illum.q0 == 0.0) return 0.0;
  const auto nus = model.frequencies();
  std::vector<double> emission(nus.size());
  std::vector<double> kappas(nus.size());
  for (std::size_t i = 0; i < nus.size(); ++i) {
    emission[i] = planck(nus[i], illum.source_temperature);
    kappas[i] = model.kappa(nus[i]);
  }
  double sum = 0.0;
  for_each_planet_ray(x, domain.inner_radius(), n_theta, [&](double tau, double surface_x) {
    double inner = 0.0;
    for (std::size_t i = 0; i < nus.size(); ++i) {
      inner += emission[i] * kappas[i] * std::exp(-kappas[i] * tau);
    }
    sum += surface_x * inner * model.frequency_weight();
  });
  const double dtheta = kTwoPi / static_cast<double>(n_theta);
  return illum.q0 / kTwoPi * dtheta * sum;
}

std::vector<double> boundary_source_per_frequency(Vec2 x, const AnnulusDomain& domain,
                                                  const BoundaryIllumination& illum,
                                                  const SpectralModel& model,
                                                  std::size_t n_theta) {
  if (n_theta < 4) throw std::invalid_argument("n_theta must be at least 4");
  const auto nus = model.frequencies();
  std::vector<double> out(nus.size(), 0.0);
  if (!domain.contains_closure(x) || illum.q0 == 0.0) return out;
  for_each_planet_ray(x, domain.inner_radius(), n_theta, [&](double tau, double surface_x) {
    for (std::size_t i = 0; i < nus.size(); ++i) {
      out[i] += surface_x * std::exp(-model.kappa(nus[i]) * tau);
    }
  });
  const double scale = illum.q0 / kTwoPi * kTwoPi / static_cast<double>(n_theta);
  for (std::size_t i = 0; i < nus.size(); ++i) {
    out[i] *= scale * planck(nus[i], illum.source_temperature);
  }
  return out;
}

ScalarField sample_boundary_source_grey(const CartesianGrid& grid, const AnnulusDomain& domain,
                                        const BoundaryIllumination& illum, double kappa,
                                        std::size_t n_theta) {
  ScalarField out(grid);
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Vec2 x = grid.node(i, static_cast<std::size_t>(j));
      if (domain.contains(x)) {
        out(i, static_cast<std::size_t>(j)) = boundary_source_grey(x, domain, illum, kappa, n_theta);
      }
    }
  }
  return out;
}

ScalarField sample_boundary_source_spectral(const CartesianGrid& grid,
                                            const AnnulusDomain& domain,
                                            const BoundaryIllumination& illum,
                                            const SpectralModel& model, std::size_t n_theta) {
  ScalarField out(grid);
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Vec2 x = grid.node(i, static_cast<std::size_t>(j));
      if (domain.contains(x)) {
        out(i, static_cast<std::size_t>(j)) =
            boundary_source_spectral(x, domain, illum, model, n_theta);
      }
    }
  }
  return out;
}

}  // namespace radtrans

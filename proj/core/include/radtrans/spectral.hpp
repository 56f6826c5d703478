#pragma once

// Rescaled blackbody physics. Temperatures are Kelvin / 4780 so that the
// Planck function reads nu^3 / (exp(nu / T) - 1) and its integral over all
// frequencies is sigma T^4 with sigma = pi^4 / 15.

#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace radtrans {

inline constexpr double kTemperatureScaleKelvin = 4780.0;
inline constexpr double kCelsiusOffset = 273.0;
inline constexpr double kSigma =
    std::numbers::pi * std::numbers::pi * std::numbers::pi * std::numbers::pi / 15.0;

class RescaledTemperature {
 public:
  constexpr RescaledTemperature() = default;
  explicit RescaledTemperature(double value);

  constexpr double value() const { return value_; }

  friend constexpr auto operator<=>(RescaledTemperature, RescaledTemperature) = default;

 private:
  double value_ = 0.0;
};

/// Raised when the emitted power needed at a node exceeds what the ceiling
/// temperature can supply, i.e. T_max was chosen too small.
class OutOfBracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Which values to use for the frequency moments int nu^k B_nu(T) dnu.
enum class MomentConstants {
  kPublished,  ///< 24.886, 122.081, 726.012, 5060.55
  kExact,      ///< Gamma(k + 4) zeta(k + 4)
};

/// Rescaled Planck function. Zero at T = 0; throws std::domain_error for nu <= 0.
double planck(double nu, RescaledTemperature T);

/// dB_nu / dT, used by Newton updates.
double planck_temperature_derivative(double nu, RescaledTemperature T);

/// Stefan-Boltzmann constant in rescaled units, pi^4 / 15.
double sigma();

/// c_k with int_0^inf nu^k B_nu(T) dnu = c_k T^(k+4), for k in 0..4.
double moment_coefficient(int k, MomentConstants constants = MomentConstants::kPublished);

/// Absorption law kappa_nu = sum_k kappa_k nu^k, constant albedo, and the
/// midpoint frequency grid used for every nu-quadrature in the solver.
class SpectralModel {
 public:
  static constexpr std::size_t kMaxCoefficients = 5;

  SpectralModel(std::vector<double> kappa_coeffs, double albedo, double nu_min, double nu_max,
                std::size_t n_nu = 100, MomentConstants constants = MomentConstants::kPublished);

  /// Constant absorption kappa with the default frequency grid.
  static SpectralModel grey(double kappa, double albedo = 0.0);

  double kappa(double nu) const;
  std::span<const double> kappa_coeffs() const { return kappa_coeffs_; }
  bool is_grey() const;

  double albedo() const { return albedo_; }
  double nu_min() const { return nu_min_; }
  double nu_max() const { return nu_max_; }
  std::size_t frequency_count() const { return nodes_.size(); }
  std::span<const double> frequencies() const { return nodes_; }
  double frequency_weight() const { return weight_; }
  MomentConstants moment_constants() const { return constants_; }

 private:
  std::vector<double> kappa_coeffs_;
  double albedo_;
  double nu_min_;
  double nu_max_;
  double weight_;
  std::vector<double> nodes_;
  MomentConstants constants_;
};

/// (1 - a) sum_k kappa_k c_k T^(k+4): the closed-form absorbed/emitted power.
double emitted_power(RescaledTemperature T, const SpectralModel& model);
double emitted_power_derivative(RescaledTemperature T, const SpectralModel& model);

/// True when emitted_power has a positive derivative on (0, T_max]. Checked on
/// a fine sample; the power is a polynomial of degree <= 8 so this is reliable.
bool emitted_power_is_increasing(const SpectralModel& model, RescaledTemperature T_max);

/// Unique T in [0, T_max] with emitted_power(T) = rhs, to 1e-12 absolute.
///
/// Bisection keeps a bracket while Newton steps do the work. Throws
/// std::domain_error for rhs < 0 and OutOfBracketError when rhs exceeds
/// emitted_power(T_max).
RescaledTemperature invert_emitted_power(double rhs, const SpectralModel& model,
                                         RescaledTemperature T_max);

/// One lagged update T = (rhs / sum_k (1-a) kappa_k c_k T_prev^k)^(1/4), the
/// scheme used by the original reference script. Falls back to the exact
/// inversion when the lagged denominator is not positive.
RescaledTemperature invert_emitted_power_lagged(double rhs, const SpectralModel& model,
                                                RescaledTemperature T_prev,
                                                RescaledTemperature T_max);

double to_celsius(RescaledTemperature T);

}  // namespace radtrans

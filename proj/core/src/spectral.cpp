#include "radtrans/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace radtrans {

RescaledTemperature::RescaledTemperature(double value) : value_(value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw std::domain_error("rescaled temperature must be finite and nonnegative, got " +
                            std::to_string(value));
  }
}

double planck(double nu, RescaledTemperature T) {
  if (!(nu > 0.0)) throw std::domain_error("planck: frequency must be positive");
  if (T.value() == 0.0) return 0.0;
  const double x = nu / T.value();
  if (x > 700.0) return 0.0;
  return nu * nu * nu / std::expm1(x);
}

double planck_temperature_derivative(double nu, RescaledTemperature T) {
  if (!(nu > 0.0)) throw std::domain_error("planck: frequency must be positive");
  if (T.value() == 0.0) return 0.0;
  const double x = nu / T.value();
  if (x > 350.0) return 0.0;
  const double em1 = std::expm1(x);
  // d/dT nu^3/(e^x - 1) = nu^3 e^x x / (T (e^x - 1)^2)
  return nu * nu * nu * (em1 + 1.0) * x / (T.value() * em1 * em1);
}

double sigma() { return kSigma; }

double moment_coefficient(int k, MomentConstants constants) {
  if (k < 0 || k > 4) {
    throw std::domain_error("moment_coefficient: k must be in 0..4, got " + std::to_string(k));
  }
  if (k == 0) return sigma();
  if (constants == MomentConstants::kPublished) {
    static constexpr std::array<double, 5> kPublished{0.0, 24.886, 122.081, 726.012, 5060.55};
    return kPublished[static_cast<std::size_t>(k)];
  }
  return std::tgamma(k + 4.0) * std::riemann_zeta(k + 4.0);
}

SpectralModel::SpectralModel(std::vector<double> kappa_coeffs, double albedo, double nu_min,
                             double nu_max, std::size_t n_nu, MomentConstants constants)
    : kappa_coeffs_(std::move(kappa_coeffs)),
      albedo_(albedo),
      nu_min_(nu_min),
      nu_max_(nu_max),
      weight_(0.0),
      constants_(constants) {
  if (kappa_coeffs_.empty() || kappa_coeffs_.size() > kMaxCoefficients) {
    throw std::invalid_argument("kappa: between 1 and 5 polynomial coefficients are required");
  }
  for (double c : kappa_coeffs_) {
    if (!std::isfinite(c)) throw std::invalid_argument("kappa: coefficients must be finite");
  }
  if (!(albedo >= 0.0 && albedo < 1.0)) {
    throw std::invalid_argument("albedo must lie in [0, 1), got " + std::to_string(albedo));
  }
  if (!(nu_min > 0.0)) throw std::invalid_argument("nu_min must be positive");
  if (!(nu_max > nu_min)) throw std::invalid_argument("nu_max must exceed nu_min");
  if (n_nu < 2) throw std::invalid_argument("n_nu must be at least 2");

  weight_ = (nu_max - nu_min) / static_cast<double>(n_nu);
  nodes_.resize(n_nu);
  for (std::size_t i = 0; i < n_nu; ++i) {
    nodes_[i] = nu_min + (static_cast<double>(i) + 0.5) * weight_;
  }
  for (double nu : nodes_) {
    if (kappa(nu) < 0.0) {
      std::ostringstream msg;
      msg << "kappa: absorption is negative (" << kappa(nu) << ") at nu = " << nu;
      throw std::invalid_argument(msg.str());
    }
  }
}

SpectralModel SpectralModel::grey(double kappa, double albedo) {
  return SpectralModel({kappa}, albedo, 0.01, 15.0);
}

double SpectralModel::kappa(double nu) const {
  double value = 0.0;
  for (auto it = kappa_coeffs_.rbegin(); it != kappa_coeffs_.rend(); ++it) value = value * nu + *it;
  return value;
}

bool SpectralModel::is_grey() const {
  return std::all_of(kappa_coeffs_.begin() + 1, kappa_coeffs_.end(),
                     [](double c) { return c == 0.0; });
}

double emitted_power(RescaledTemperature T, const SpectralModel& model) {
  const double t = T.value();
  const double t4 = t * t * t * t;
  double sum = 0.0;
  double tk = 1.0;
  const auto coeffs = model.kappa_coeffs();
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    sum += coeffs[k] * moment_coefficient(static_cast<int>(k), model.moment_constants()) * tk;
    tk *= t;
  }
  return (1.0 - model.albedo()) * sum * t4;
}

double emitted_power_derivative(RescaledTemperature T, const SpectralModel& model) {
  const double t = T.value();
  double sum = 0.0;
  double tk = t * t * t;  // d/dT T^(k+4) = (k+4) T^(k+3)
  const auto coeffs = model.kappa_coeffs();
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    sum += coeffs[k] * moment_coefficient(static_cast<int>(k), model.moment_constants()) *
           static_cast<double>(k + 4) * tk;
    tk *= t;
  }
  return (1.0 - model.albedo()) * sum;
}

bool emitted_power_is_increasing(const SpectralModel& model, RescaledTemperature T_max) {
  constexpr int kSamples = 4096;
  for (int s = 1; s <= kSamples; ++s) {
    const RescaledTemperature t(T_max.value() * s / kSamples);
    if (!(emitted_power_derivative(t, model) > 0.0)) return false;
  }
  return true;
}

RescaledTemperature invert_emitted_power(double rhs, const SpectralModel& model,
                                         RescaledTemperature T_max) {
  if (!(rhs >= 0.0)) throw std::domain_error("invert_emitted_power: rhs must be nonnegative");
  if (rhs == 0.0) return RescaledTemperature(0.0);
  const double top = emitted_power(T_max, model);
  if (rhs > top) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "emitted power " << rhs << " exceeds the ceiling value " << top << " at T_max = "
        << T_max.value();
    throw OutOfBracketError(msg.str());
  }

  double lo = 0.0;
  double hi = T_max.value();
  // Leading-order guess from the quartic term, or the bracket midpoint.
  const double lead = (1.0 - model.albedo()) * model.kappa_coeffs()[0] * sigma();
  double t = lead > 0.0 ? std::pow(rhs / lead, 0.25) : 0.5 * hi;
  if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);

  for (int iter = 0; iter < 200; ++iter) {
    const double f = emitted_power(RescaledTemperature(t), model) - rhs;
    if (f == 0.0) return RescaledTemperature(t);
    if (f > 0.0) {
      hi = t;
    } else {
      lo = t;
    }
    const double df = emitted_power_derivative(RescaledTemperature(t), model);
    double next = df > 0.0 ? t - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - t);
    t = next;
    if (step <= 1e-15 * std::max(1.0, t) || hi - lo <= 1e-14) break;
  }
  return RescaledTemperature(std::clamp(t, 0.0, T_max.value()));
}

RescaledTemperature invert_emitted_power_lagged(double rhs, const SpectralModel& model,
                                                RescaledTemperature T_prev,
                                                RescaledTemperature T_max) {
  if (!(rhs >= 0.0)) throw std::domain_error("invert_emitted_power: rhs must be nonnegative");
  double denom = 0.0;
  double tk = 1.0;
  const auto coeffs = model.kappa_coeffs();
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    denom += coeffs[k] * moment_coefficient(static_cast<int>(k), model.moment_constants()) * tk;
    tk *= T_prev.value();
  }
  denom *= 1.0 - model.albedo();
  if (!(denom > 0.0)) return invert_emitted_power(rhs, model, T_max);
  return RescaledTemperature(std::sqrt(std::sqrt(rhs / denom)));
}

double to_celsius(RescaledTemperature T) {
  return T.value() * kTemperatureScaleKelvin - kCelsiusOffset;
}

}  // namespace radtrans

#include "radtrans/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

namespace radtrans {

namespace {

std::vector<char> domain_mask(const CartesianGrid& grid, const AnnulusDomain& domain) {
  std::vector<char> mask(grid.node_count(), 0);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      mask[grid.index(i, j)] = domain.contains(grid.node(i, j)) ? 1 : 0;
    }
  }
  return mask;
}

std::string describe_node(const CartesianGrid& grid, std::size_t k) {
  const std::size_t i = k % grid.size();
  const std::size_t j = k / grid.size();
  const Vec2 x = grid.node(i, j);
  std::ostringstream out;
  out << "node (" << i << ", " << j << ") at (" << x.x << ", " << x.y << ")";
  return out.str();
}

// Rejects a mean intensity that is negative beyond round-off.
void require_nonnegative(const ScalarField& J, const char* what) {
  const double scale = std::max(1.0, J.max_abs());
  for (std::size_t k = 0; k < J.values().size(); ++k) {
    if (J[k] < -1e-12 * scale) {
      std::ostringstream msg;
      msg << what << " is negative (" << J[k] << ") at "
          << describe_node(J.grid(), k);
      throw InvariantViolation(msg.str());
    }
  }
}

double clamp_temperature(double raw, double t_max, double& excess) {
  if (raw > t_max) excess = std::max(excess, raw - t_max);
  return std::clamp(raw, 0.0, t_max);
}

std::vector<double> frequency_kappas(const SpectralModel& model) {
  std::vector<double> out;
  for (double nu : model.frequencies()) out.push_back(model.kappa(nu));
  return out;
}

}  // namespace

double ProblemConfig::cutoff_radius() const {
  return options.r_cut.value_or(0.25 * domain.inner_radius());
}

KernelSpec ProblemConfig::kernel_for(double kappa) const {
  return KernelSpec{kappa, 2, cutoff_radius(), options.origin};
}

void ProblemConfig::validate() const {
  if (grid.half_width() < domain.outer_radius()) {
    std::ostringstream msg;
    msg << "L = " << grid.half_width() << " must be at least R + H = " << domain.outer_radius();
    throw std::invalid_argument(msg.str());
  }
  illum.validate();
  if (!(T0 >= 0.0 && T0 <= T_max.value())) {
    throw std::invalid_argument("T0 must lie in [0, T_max]");
  }
  if (!(T_max.value() > 0.0)) throw std::invalid_argument("T_max must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (options.n_theta < 4) throw std::invalid_argument("n_theta must be at least 4");
  if (!(cutoff_radius() >= 0.0)) throw std::invalid_argument("r_cut must be nonnegative");

  // The boundary data carry the surface x-coordinate without 1/R, so bound
  // it by max(1, R) to cover both conventions.
  const double factor = illum.q0 * std::max(1.0, domain.inner_radius());
  for (double nu : model.frequencies()) {
    const double incoming = factor * planck(nu, illum.source_temperature);
    const double ceiling = planck(nu, T_max);
    if (incoming > ceiling * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "T_max = " << T_max.value() << " is below the illumination at nu = " << nu
          << " (" << incoming << " > " << ceiling << ")";
      throw std::invalid_argument(msg.str());
    }
  }
  if (!emitted_power_is_increasing(model, T_max)) {
    throw std::invalid_argument("kappa: emitted power is not increasing on [0, T_max]");
  }
}

ScalarField restrict_to_domain(const ScalarField& field, const AnnulusDomain& domain) {
  const CartesianGrid& grid = field.grid();
  ScalarField out(grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (domain.contains(grid.node(i, j))) out(i, j) = field(i, j);
    }
  }
  return out;
}

ScalarField initial_temperature(const ProblemConfig& config, double T0) {
  return restrict_to_domain(ScalarField(config.grid, T0), config.domain);
}

ScalarField assemble_source_grey(const ScalarField& J, const ScalarField& T, double albedo,
                                 const AnnulusDomain& domain) {
  const CartesianGrid& grid = T.grid();
  ScalarField out(grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!domain.contains(grid.node(i, j))) continue;
      const double t = T(i, j);
      out(i, j) = albedo * J(i, j) + (1.0 - albedo) * kSigma * t * t * t * t;
    }
  }
  return out;
}

std::vector<ScalarField> assemble_source(const std::vector<ScalarField>& J_nu,
                                         const ScalarField& T, const SpectralModel& model,
                                         const AnnulusDomain& domain) {
  const auto nus = model.frequencies();
  if (!J_nu.empty() && J_nu.size() != nus.size()) {
    throw std::invalid_argument("assemble_source: one J field per frequency is required");
  }
  const double a = model.albedo();
  const auto mask = domain_mask(T.grid(), domain);
  std::vector<ScalarField> out(nus.size(), ScalarField(T.grid()));
  const auto count = static_cast<std::ptrdiff_t>(nus.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t f = 0; f < count; ++f) {
    const auto fi = static_cast<std::size_t>(f);
    auto& s = out[fi];
    for (std::size_t k = 0; k < mask.size(); ++k) {
      if (!mask[k]) continue;
      const double b = planck(nus[fi], RescaledTemperature(std::max(T[k], 0.0)));
      s[k] = (1.0 - a) * b + (J_nu.empty() ? 0.0 : a * J_nu[fi][k]);
    }
  }
  return out;
}

GreyOperator::GreyOperator(const ProblemConfig& config)
    : GreyOperator(config,
                   sample_boundary_source_grey(config.grid, config.domain, config.illum,
                                               config.model.kappa_coeffs()[0],
                                               config.options.n_theta)) {}

GreyOperator::GreyOperator(const ProblemConfig& config, ScalarField boundary_source)
    : config_(config),
      kappa_(config.model.kappa_coeffs()[0]),
      boundary_(std::move(boundary_source)),
      convolver_(config.grid, config.options.layout) {
  if (!config.model.is_grey()) {
    throw std::invalid_argument("kappa: grey mode needs kappa1 .. kappa4 = 0");
  }
  if (!(boundary_.grid() == config.grid)) {
    throw std::domain_error("boundary source lives on a different grid");
  }
  kernel_ = convolver_.transform_kernel(config.kernel_for(kappa_));
}

StepResult GreyOperator::step(const ScalarField& T, const ScalarField& J_prev) const {
  const double a = config_.model.albedo();
  const ScalarField source = assemble_source_grey(J_prev, T, a, config_.domain);
  StepResult out{convolver_.apply(source, kernel_), ScalarField(config_.grid),
                 ScalarField(config_.grid), {}, 0.0};
  const auto mask = domain_mask(config_.grid, config_.domain);
  const double t_max = config_.T_max.value();
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (!mask[k]) continue;
    out.J[k] = boundary_[k] + out.interior[k];
  }
  require_nonnegative(out.J, "mean intensity");
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (!mask[k]) continue;
    const double raw = std::sqrt(std::sqrt(std::max(out.J[k], 0.0) / kSigma));
    out.T[k] = clamp_temperature(raw, t_max, out.clamp_excess);
  }
  return out;
}

SpectralOperator::SpectralOperator(const ProblemConfig& config)
    : SpectralOperator(config,
                       sample_boundary_source_spectral(config.grid, config.domain, config.illum,
                                                       config.model, config.options.n_theta)) {}

SpectralOperator::SpectralOperator(const ProblemConfig& config, ScalarField boundary_source)
    : config_(config),
      boundary_(std::move(boundary_source)),
      kappas_(frequency_kappas(config.model)),
      convolver_(config.grid, config.options.layout) {
  if (!(boundary_.grid() == config.grid)) {
    throw std::domain_error("boundary source lives on a different grid");
  }
  kernels_.resize(kappas_.size());
  const auto count = static_cast<std::ptrdiff_t>(kappas_.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t f = 0; f < count; ++f) {
    const auto fi = static_cast<std::size_t>(f);
    if (kappas_[fi] > 0.0) kernels_[fi] = convolver_.transform_kernel(config.kernel_for(kappas_[fi]));
  }

  if (config.model.albedo() > 0.0) {
    // Scattering feeds each J_nu back into its own source, so the
    // unweighted boundary source is needed per frequency.
    const CartesianGrid& grid = config.grid;
    const auto mask = domain_mask(grid, config.domain);
    boundary_per_frequency_.assign(kappas_.size(), ScalarField(grid));
    const auto nodes = static_cast<std::ptrdiff_t>(grid.node_count());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < nodes; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      if (!mask[kk]) continue;
      const Vec2 x = grid.node(kk % grid.size(), kk / grid.size());
      const auto values = boundary_source_per_frequency(x, config.domain, config.illum,
                                                        config.model, config.options.n_theta);
      for (std::size_t f = 0; f < values.size(); ++f) boundary_per_frequency_[f][kk] = values[f];
    }
  }
}

StepResult SpectralOperator::step(const ScalarField& T,
                                  const std::vector<ScalarField>& J_prev) const {
  const SpectralModel& model = config_.model;
  const double a = model.albedo();
  const double dnu = model.frequency_weight();
  const CartesianGrid& grid = config_.grid;
  const auto mask = domain_mask(grid, config_.domain);
  const std::vector<ScalarField> sources =
      assemble_source(a > 0.0 ? J_prev : std::vector<ScalarField>{}, T, model, config_.domain);

  std::vector<ScalarField> convolved(kappas_.size(), ScalarField(grid));
  const auto count = static_cast<std::ptrdiff_t>(kappas_.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t f = 0; f < count; ++f) {
    const auto fi = static_cast<std::size_t>(f);
    if (kappas_[fi] > 0.0) convolved[fi] = convolver_.apply(sources[fi], kernels_[fi]);
  }

  StepResult out{ScalarField(grid), ScalarField(grid), ScalarField(grid), {}, 0.0};
  // Summed in frequency order so results do not depend on the thread count.
  for (std::size_t f = 0; f < kappas_.size(); ++f) {
    const double w = (1.0 - a) * dnu * kappas_[f];
    if (w == 0.0) continue;
    for (std::size_t k = 0; k < mask.size(); ++k) out.interior[k] += w * convolved[f][k];
  }
  if (a > 0.0) {
    out.J_nu.assign(kappas_.size(), ScalarField(grid));
    for (std::size_t f = 0; f < kappas_.size(); ++f) {
      for (std::size_t k = 0; k < mask.size(); ++k) {
        if (mask[k]) out.J_nu[f][k] = boundary_per_frequency_[f][k] + convolved[f][k];
      }
    }
  }
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (mask[k]) out.J[k] = (1.0 - a) * boundary_[k] + out.interior[k];
  }
  require_nonnegative(out.J, "frequency-integrated intensity");

  const double t_max = config_.T_max.value();
  const bool lagged = config_.options.inversion == InversionScheme::kLagged;
  std::exception_ptr failure;
  std::size_t failed_node = 0;
  std::vector<double> raw(mask.size(), 0.0);
  const auto nodes = static_cast<std::ptrdiff_t>(mask.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < nodes; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    if (!mask[kk]) continue;
    try {
      const double rhs = std::max(out.J[kk], 0.0);
      raw[kk] = lagged ? invert_emitted_power_lagged(rhs, model,
                                                     RescaledTemperature(std::max(T[kk], 0.0)),
                                                     config_.T_max)
                             .value()
                       : invert_emitted_power(rhs, model, config_.T_max).value();
    } catch (...) {
#pragma omp critical(radtrans_inversion_failure)
      if (!failure || kk < failed_node) {
        failure = std::current_exception();
        failed_node = kk;
      }
    }
  }
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const OutOfBracketError& e) {
      throw OutOfBracketError(std::string(e.what()) + " at " + describe_node(grid, failed_node));
    }
  }
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (mask[k]) out.T[k] = clamp_temperature(raw[k], t_max, out.clamp_excess);
  }
  return out;
}

StepResult grey_step(const ScalarField& T, const ScalarField& SE, const ProblemConfig& config) {
  const GreyOperator op(config, SE);
  return op.step(T, ScalarField(config.grid));
}

StepResult spectral_step(const ScalarField& T, const ScalarField& SE_bar,
                         const ProblemConfig& config) {
  const SpectralOperator op(config, SE_bar);
  return op.step(T, {});
}

bool IterationReport::all_monotone_up() const {
  return std::all_of(records.begin(), records.end(),
                     [](const IterationRecord& r) { return r.monotone_up; });
}

bool IterationReport::all_monotone_down() const {
  return std::all_of(records.begin(), records.end(),
                     [](const IterationRecord& r) { return r.monotone_down; });
}

namespace {

// Everything the loop needs from the two modes.
class StepDriver {
 public:
  StepDriver(const ProblemConfig& config, Mode mode) : config_(config), mode_(mode) {
    if (mode == Mode::kGrey) {
      grey_.emplace(config);
    } else {
      spectral_.emplace(config);
    }
  }

  const ScalarField& boundary_source() const {
    return grey_ ? grey_->boundary_source() : spectral_->boundary_source();
  }

  // Scale applied to the boundary source in the temperature balance.
  double boundary_scale() const {
    return mode_ == Mode::kSpectral ? 1.0 - config_.model.albedo() : 1.0;
  }

  void reset(const ScalarField& T) {
    const double a = config_.model.albedo();
    if (grey_) {
      J_grey_ = assemble_source_grey(ScalarField(config_.grid), T, 0.0, config_.domain);
    } else if (a > 0.0) {
      J_nu_ = assemble_source({}, T, config_.model, config_.domain);
      // assemble_source scales by (1 - a); undo it to get B_nu(T).
      for (auto& f : J_nu_) {
        for (double& v : f.values()) v /= 1.0 - a;
      }
    } else {
      J_nu_.clear();
    }
  }

  StepResult step(const ScalarField& T) {
    if (grey_) {
      StepResult r = grey_->step(T, J_grey_ ? *J_grey_ : ScalarField(config_.grid));
      J_grey_ = r.J;
      return r;
    }
    StepResult r = spectral_->step(T, J_nu_);
    J_nu_ = r.J_nu;
    return r;
  }

 private:
  const ProblemConfig& config_;
  Mode mode_;
  std::optional<GreyOperator> grey_;
  std::optional<SpectralOperator> spectral_;
  std::optional<ScalarField> J_grey_;
  std::vector<ScalarField> J_nu_;
};

struct DiffusionStage {
  PolarGrid grid;
  DiffusionConfig config;
  EmissionLaw law;
  PolarField boundary;
  PolarField temperature;
};

DiffusionStage make_diffusion_stage(const ProblemConfig& config, Mode mode,
                                    const DiffusionConfig& cfg, double scale) {
  cfg.validate();
  PolarGrid grid(config.domain, config.options.polar_radial, config.options.polar_angular);
  PolarField boundary(grid);
  // The boundary source is evaluated at the polar nodes directly; only the
  // smooth kernel part is interpolated from the Cartesian grid.
  for (std::size_t i = 0; i < grid.radial_count(); ++i) {
    for (std::size_t j = 0; j < grid.angular_count(); ++j) {
      const Vec2 x = grid.node(i, j);
      const double se =
          mode == Mode::kGrey
              ? boundary_source_grey(x, config.domain, config.illum,
                                     config.model.kappa_coeffs()[0], config.options.n_theta)
              : boundary_source_spectral(x, config.domain, config.illum, config.model,
                                         config.options.n_theta);
      boundary(i, j) = scale * se;
    }
  }
  EmissionLaw law =
      mode == Mode::kGrey ? EmissionLaw::grey() : EmissionLaw::spectral(config.model, config.T_max);
  PolarField start(grid, config.T0);
  return DiffusionStage{grid, cfg, std::move(law), std::move(boundary), std::move(start)};
}

}  // namespace

SolveResult solve(const ProblemConfig& config, Mode mode,
                  const std::optional<DiffusionConfig>& diffusion) {
  config.validate();
  StepDriver driver(config, mode);
  const auto mask = domain_mask(config.grid, config.domain);
  const double t_max = config.T_max.value();

  std::optional<DiffusionStage> stage;
  if (diffusion) stage = make_diffusion_stage(config, mode, *diffusion, driver.boundary_scale());

  SolveResult result{initial_temperature(config, config.T0), ScalarField(config.grid),
                     driver.boundary_source(), {}, std::nullopt};
  driver.reset(result.T);
  auto& report = result.report;
  ScalarField& T = result.T;

  for (int it = 1; it <= config.max_iters; ++it) {
    const auto start = std::chrono::steady_clock::now();
    StepResult step = driver.step(T);
    ScalarField next = std::move(step.T);
    double excess = step.clamp_excess;

    if (stage) {
      PolarField source = to_polar(step.interior, stage->grid);
      for (std::size_t k = 0; k < source.values().size(); ++k) {
        source.values()[k] = std::max(0.0, source.values()[k] + stage->boundary.values()[k]);
      }
      DiffusionResult d = solve_diffusion(source, stage->config, stage->temperature, stage->law);
      for (double& t : d.temperature.values()) t = clamp_temperature(t, t_max, excess);
      stage->temperature = d.temperature;
      next = restrict_to_domain(to_cartesian(stage->temperature, config.grid), config.domain);
      for (const auto& w : d.report.warnings) {
        report.warnings.push_back("iteration " + std::to_string(it) + ": " + w);
      }
      report.last_diffusion = std::move(d.report);
    }
    if (excess > 1e-9) {
      std::ostringstream msg;
      msg << "iteration " << it << ": temperature exceeded T_max by " << excess
          << " and was clamped";
      report.warnings.push_back(msg.str());
    }

    IterationRecord rec;
    rec.iter = it;
    rec.tmin = std::numeric_limits<double>::infinity();
    rec.tmax = -std::numeric_limits<double>::infinity();
    rec.jmin = std::numeric_limits<double>::infinity();
    rec.jmax = -std::numeric_limits<double>::infinity();
    double lowest_change = std::numeric_limits<double>::infinity();
    double highest_change = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t k = 0; k < mask.size(); ++k) {
      if (!mask[k]) continue;
      any = true;
      const double change = next[k] - T[k];
      rec.residual = std::max(rec.residual, std::abs(change));
      lowest_change = std::min(lowest_change, change);
      highest_change = std::max(highest_change, change);
      rec.tmin = std::min(rec.tmin, next[k]);
      rec.tmax = std::max(rec.tmax, next[k]);
      rec.jmin = std::min(rec.jmin, step.J[k]);
      rec.jmax = std::max(rec.jmax, step.J[k]);
    }
    if (!any) {
      rec.tmin = rec.tmax = rec.jmin = rec.jmax = 0.0;
      lowest_change = highest_change = 0.0;
    }
    rec.monotone_up = lowest_change >= -1e-12;
    rec.monotone_down = highest_change <= 1e-12;
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    report.records.push_back(rec);
    report.iterations = it;

    T = std::move(next);
    result.J = std::move(step.J);
    if (rec.residual <= config.tol) {
      report.converged = true;
      break;
    }
  }
  if (!report.converged) {
    std::ostringstream msg;
    msg << "no convergence to tol = " << config.tol << " in " << config.max_iters
        << " iterations";
    report.warnings.push_back(msg.str());
  }
  if (stage) result.polar_temperature = stage->temperature;
  return result;
}

BracketResult solve_bracketed(const ProblemConfig& config, Mode mode) {
  ProblemConfig low_cfg = config;
  low_cfg.T0 = 0.0;
  ProblemConfig high_cfg = config;
  high_cfg.T0 = config.T_max.value();
  BracketResult out{solve(low_cfg, mode), solve(high_cfg, mode), 0.0};
  const auto& lo = out.low.T;
  const auto& hi = out.high.T;
  for (std::size_t k = 0; k < lo.values().size(); ++k) {
    if (lo[k] > hi[k] + 1e-12) {
      std::ostringstream msg;
      msg << "bracket violated: lower run " << lo[k] << " above upper run " << hi[k] << " at "
          << describe_node(config.grid, k);
      throw InvariantViolation(msg.str());
    }
    out.gap = std::max(out.gap, hi[k] - lo[k]);
  }
  return out;
}

}  // namespace radtrans

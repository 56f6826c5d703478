#pragma once

// Fixed-point iteration for the radiative temperature balance on the
// Cartesian grid. Each step evaluates the mean intensity of the current
// emission by convolution with the transport kernel, adds the boundary
// source, and inverts the emitted-power law nodewise.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "radtrans/diffusion.hpp"
#include "radtrans/field.hpp"
#include "radtrans/geometry.hpp"
#include "radtrans/kernel.hpp"
#include "radtrans/spectral.hpp"

namespace radtrans {

/// A property the iteration guarantees was observed to fail.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Mode { kGrey, kSpectral };

enum class InversionScheme {
  kNewton,  ///< exact root of the emitted-power law
  kLagged,  ///< one lagged update per iteration
};

struct SolverOptions {
  std::size_t n_theta = 60;
  OriginTreatment origin = OriginTreatment::kCutoff;
  /// Kernel cutoff radius; R / 4 when unset.
  std::optional<double> r_cut;
  ConvolutionLayout layout = ConvolutionLayout::kLinear;
  InversionScheme inversion = InversionScheme::kNewton;
  std::size_t polar_radial = 36;
  std::size_t polar_angular = 120;
};

struct ProblemConfig {
  AnnulusDomain domain{0.4, 0.3};
  CartesianGrid grid{64, 1.0};
  SpectralModel model = SpectralModel::grey(0.5);
  BoundaryIllumination illum{5.74e-5, RescaledTemperature(1.209)};
  double T0 = 0.01;
  RescaledTemperature T_max{1.209};
  int max_iters = 50;
  double tol = 1e-4;
  SolverOptions options;

  double cutoff_radius() const;
  KernelSpec kernel_for(double kappa) const;

  /// Throws std::invalid_argument naming the offending parameter.
  void validate() const;
};

/// Values of field at the nodes strictly inside the annulus; zero elsewhere.
ScalarField restrict_to_domain(const ScalarField& field, const AnnulusDomain& domain);

/// T0 inside the annulus, zero outside.
ScalarField initial_temperature(const ProblemConfig& config, double T0);

/// a J + (1 - a) sigma T^4 nodewise, zero outside the annulus.
ScalarField assemble_source_grey(const ScalarField& J, const ScalarField& T, double albedo,
                                 const AnnulusDomain& domain);

/// S_nu = a J_nu + (1 - a) B_nu(T) at every frequency node of the model. J_nu
/// may be empty, meaning J = 0.
std::vector<ScalarField> assemble_source(const std::vector<ScalarField>& J_nu,
                                         const ScalarField& T, const SpectralModel& model,
                                         const AnnulusDomain& domain);

struct StepResult {
  /// Kernel part of the mean intensity before restriction to the annulus.
  ScalarField interior;
  /// Boundary source plus interior, restricted to the annulus.
  ScalarField J;
  ScalarField T;
  /// Per-frequency mean intensities, kept only when the albedo is nonzero.
  std::vector<ScalarField> J_nu;
  /// Largest amount by which the raw temperature exceeded T_max.
  double clamp_excess = 0.0;
};

class GreyOperator {
 public:
  explicit GreyOperator(const ProblemConfig& config);
  GreyOperator(const ProblemConfig& config, ScalarField boundary_source);

  const ScalarField& boundary_source() const { return boundary_; }

  /// One update. J_prev only matters when the albedo is nonzero.
  StepResult step(const ScalarField& T, const ScalarField& J_prev) const;

 private:
  ProblemConfig config_;
  double kappa_;
  ScalarField boundary_;
  Convolver convolver_;
  Spectrum kernel_;
};

class SpectralOperator {
 public:
  explicit SpectralOperator(const ProblemConfig& config);
  SpectralOperator(const ProblemConfig& config, ScalarField boundary_source);

  /// kappa-weighted, frequency-integrated boundary source.
  const ScalarField& boundary_source() const { return boundary_; }

  /// rhs = SE_bar + sum_nu dnu kappa_nu (Y_nu * B_nu(T)), scaled by (1 - a)
  /// with scattering, then T = P^{-1}(rhs). J_prev is the per-frequency J of
  /// the previous step (unused without scattering).
  StepResult step(const ScalarField& T, const std::vector<ScalarField>& J_prev) const;

 private:
  ProblemConfig config_;
  ScalarField boundary_;
  std::vector<ScalarField> boundary_per_frequency_;
  std::vector<double> kappas_;
  Convolver convolver_;
  std::vector<Spectrum> kernels_;
};

/// Single grey update with a given boundary source.
StepResult grey_step(const ScalarField& T, const ScalarField& SE, const ProblemConfig& config);

/// Single spectral update with a given kappa-weighted boundary source.
StepResult spectral_step(const ScalarField& T, const ScalarField& SE_bar,
                         const ProblemConfig& config);

struct IterationRecord {
  int iter = 0;
  double residual = 0.0;
  double tmin = 0.0;
  double tmax = 0.0;
  double jmin = 0.0;
  double jmax = 0.0;
  bool monotone_up = true;
  bool monotone_down = true;
  double wall_ms = 0.0;
};

struct IterationReport {
  std::vector<IterationRecord> records;
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> warnings;
  std::optional<DiffusionReport> last_diffusion;

  bool all_monotone_up() const;
  bool all_monotone_down() const;
};

struct SolveResult {
  ScalarField T;
  ScalarField J;
  ScalarField SE;
  IterationReport report;
  std::optional<PolarField> polar_temperature;
};

/// Iterates from T0 = config.T0 until the max-norm change of T over the
/// annulus drops to config.tol or max_iters is reached. With a diffusion
/// configuration every temperature update is the diffusion solve on the polar
/// grid instead of the algebraic inversion.
SolveResult solve(const ProblemConfig& config, Mode mode,
                  const std::optional<DiffusionConfig>& diffusion = std::nullopt);

struct BracketResult {
  SolveResult low;
  SolveResult high;
  double gap = 0.0;
};

/// Runs from T0 = 0 and from T0 = T_max. Throws InvariantViolation if the
/// lower run ends above the upper one anywhere.
BracketResult solve_bracketed(const ProblemConfig& config, Mode mode);

}  // namespace radtrans

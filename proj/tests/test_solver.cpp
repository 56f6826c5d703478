#include <gtest/gtest.h>

#include <cmath>

#include "radtrans/parallel.hpp"
#include "radtrans/solver.hpp"
#include "radtrans/transport_oracle.hpp"

using namespace radtrans;

namespace {

ProblemConfig reference_grey(std::size_t n = 64) {
  ProblemConfig c;
  c.grid = CartesianGrid(n, 1.0);
  return c;
}

ProblemConfig reference_spectral(double kappa1, std::size_t n = 64) {
  ProblemConfig c = reference_grey(n);
  c.model = SpectralModel({0.5, kappa1}, 0.0, 0.01, 15.0);
  return c;
}

double mean_over_domain(const ScalarField& f, const AnnulusDomain& d) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t j = 0; j < f.grid().size(); ++j) {
    for (std::size_t i = 0; i < f.grid().size(); ++i) {
      if (!d.contains(f.grid().node(i, j))) continue;
      sum += f(i, j);
      ++count;
    }
  }
  return sum / count;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

TEST(ProblemConfig, Validation) {
  EXPECT_NO_THROW(reference_grey().validate());

  ProblemConfig small = reference_grey();
  small.grid = CartesianGrid(64, 0.6);
  EXPECT_THROW(small.validate(), std::invalid_argument);

  ProblemConfig hot = reference_grey();
  hot.T0 = 2.0;
  EXPECT_THROW(hot.validate(), std::invalid_argument);

  ProblemConfig low_ceiling = reference_grey();
  low_ceiling.T_max = RescaledTemperature(0.05);
  low_ceiling.T0 = 0.0;
  EXPECT_THROW(low_ceiling.validate(), std::invalid_argument);

  ProblemConfig no_tol = reference_grey();
  no_tol.tol = 0.0;
  EXPECT_THROW(no_tol.validate(), std::invalid_argument);

  EXPECT_NEAR(reference_grey().cutoff_radius(), 0.1, 1e-15);
}

TEST(AssembleSource, NoScatteringGivesPlanck) {
  const ProblemConfig c = reference_spectral(0.03, 16);
  const ScalarField T = initial_temperature(c, 0.3);
  const auto S = assemble_source({}, T, c.model, c.domain);
  ASSERT_EQ(S.size(), c.model.frequency_count());
  for (std::size_t f = 0; f < S.size(); f += 17) {
    for (std::size_t k = 0; k < T.values().size(); ++k) {
      EXPECT_DOUBLE_EQ(S[f][k], T[k] > 0 ? planck(c.model.frequencies()[f], RescaledTemperature(T[k])) : 0.0);
    }
  }
}

TEST(AssembleSource, DarkFieldsGiveZero) {
  const ProblemConfig c = reference_spectral(0.03, 16);
  const auto S = assemble_source({}, ScalarField(c.grid), c.model, c.domain);
  for (const auto& s : S) EXPECT_EQ(s.max_abs(), 0.0);
  EXPECT_EQ(assemble_source_grey(ScalarField(c.grid), ScalarField(c.grid), 0.3, c.domain).max_abs(), 0.0);
}

TEST(AssembleSource, ConvexCombinationFixedPoint) {
  ProblemConfig c = reference_spectral(0.03, 16);
  c.model = SpectralModel({0.5, 0.03}, 0.3, 0.01, 15.0);
  const ScalarField T = initial_temperature(c, 0.4);
  const auto B = assemble_source({}, T, SpectralModel({0.5, 0.03}, 0.0, 0.01, 15.0), c.domain);
  const auto S = assemble_source(B, T, c.model, c.domain);
  for (std::size_t f = 0; f < S.size(); ++f) {
    for (std::size_t k = 0; k < T.values().size(); ++k) EXPECT_NEAR(S[f][k], B[f][k], 1e-14);
  }
  const ScalarField J = assemble_source_grey(ScalarField(c.grid), T, 0.0, c.domain);
  const ScalarField Sg = assemble_source_grey(J, T, 0.3, c.domain);
  EXPECT_LE(max_abs_diff(Sg, J), 1e-15);
}

TEST(GreyStep, DarkFixedPoint) {
  const ProblemConfig c = reference_grey(16);
  const StepResult r = grey_step(ScalarField(c.grid), ScalarField(c.grid), c);
  EXPECT_EQ(r.J.max_abs(), 0.0);
  EXPECT_EQ(r.T.max_abs(), 0.0);
}

TEST(GreyStep, CeilingIsRespected) {
  // Boundary term of a medium bathed in B(T_max) from every side.
  const ProblemConfig c = reference_grey(32);
  const double t_max = c.T_max.value();
  const double ceiling = sigma() * std::pow(t_max, 4);
  const ScalarField se = mean_intensity_direct(
      c.grid, [](Vec2) { return 0.0; }, [&](Vec2, Vec2, bool) { return ceiling; }, 0.5, c.domain,
      RayQuadrature::defaults(c.domain));
  const StepResult r = grey_step(initial_temperature(c, t_max), se, c);
  // Sampling the kernel near the outer rim overshoots the continuum identity by
  // a fraction of a percent; the clamp absorbs it.
  EXPECT_LE(r.clamp_excess, 0.01 * t_max);
  EXPECT_LE(r.T.max_abs(), t_max);
  EXPECT_GT(r.T.max_abs(), 0.9 * t_max);
}

TEST(SpectralStep, DarkFixedPoint) {
  const ProblemConfig c = reference_spectral(0.03, 16);
  const StepResult r = spectral_step(ScalarField(c.grid), ScalarField(c.grid), c);
  EXPECT_EQ(r.J.max_abs(), 0.0);
  EXPECT_EQ(r.T.max_abs(), 0.0);
}

TEST(SpectralStep, ConstantKappaReducesToGrey) {
  // The emission at T ~ 0.07 peaks near nu = 0.2, so the frequency grid must
  // be fine enough to resolve it.
  ProblemConfig grey = reference_grey(32);
  const SolveResult base = solve(grey, Mode::kGrey);
  ProblemConfig spectral = grey;
  spectral.model = SpectralModel({0.5}, 0.0, 0.01, 15.0, 2000);
  const StepResult g = grey_step(base.T, base.SE, grey);
  const SpectralOperator op(spectral);
  const StepResult s = op.step(base.T, {});
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < g.J.values().size(); ++k) {
    num += (s.J[k] - 0.5 * g.J[k]) * (s.J[k] - 0.5 * g.J[k]);
    den += 0.25 * g.J[k] * g.J[k];
  }
  EXPECT_LE(std::sqrt(num / den), 0.005);
  EXPECT_LE(max_abs_diff(s.T, g.T), 0.005 * g.T.max_abs());
}

TEST(SpectralStep, OutOfBracketNamesTheNode) {
  const ProblemConfig c = reference_spectral(0.03, 16);
  ScalarField huge(c.grid);
  for (std::size_t k = 0; k < huge.values().size(); ++k) huge[k] = 1e6;
  huge = restrict_to_domain(huge, c.domain);
  try {
    spectral_step(ScalarField(c.grid), huge, c);
    FAIL() << "expected OutOfBracketError";
  } catch (const OutOfBracketError& e) {
    EXPECT_NE(std::string(e.what()).find("node ("), std::string::npos);
  }
}

TEST(Solve, DarkProblemConvergesImmediately) {
  ProblemConfig c = reference_grey(16);
  c.illum.q0 = 0.0;
  c.T0 = 0.0;
  const SolveResult r = solve(c, Mode::kGrey);
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 1);
  EXPECT_EQ(r.T.max_abs(), 0.0);
}

TEST(Solve, ReferenceGreyConvergesQuickly) {
  const SolveResult r = solve(reference_grey(), Mode::kGrey);
  EXPECT_TRUE(r.report.converged);
  EXPECT_LE(r.report.iterations, 10);
  EXPECT_LE(r.report.records.back().residual, 1e-4);
}

TEST(Solve, MonotoneFromZero) {
  ProblemConfig c = reference_grey();
  c.T0 = 0.0;
  const SolveResult r = solve(c, Mode::kGrey);
  EXPECT_TRUE(r.report.all_monotone_up());
  c = reference_spectral(0.03);
  c.T0 = 0.0;
  EXPECT_TRUE(solve(c, Mode::kSpectral).report.all_monotone_up());
}

TEST(Solve, MaximumPrinciple) {
  for (double t0 : {0.0, 0.01, 1.209}) {
    ProblemConfig c = reference_grey();
    c.T0 = t0;
    const SolveResult r = solve(c, Mode::kGrey);
    for (const auto& rec : r.report.records) {
      EXPECT_GE(rec.tmin, 0.0);
      EXPECT_LE(rec.tmax, c.T_max.value());
      EXPECT_GE(rec.jmin, -1e-9);
    }
    for (const auto& w : r.report.warnings) EXPECT_EQ(w.find("clamped"), std::string::npos) << w;
  }
}

TEST(Solve, ComparisonUnderBrighterIllumination) {
  ProblemConfig c = reference_grey();
  const SolveResult a = solve(c, Mode::kGrey);
  c.illum.q0 *= 2.0;
  const SolveResult b = solve(c, Mode::kGrey);
  for (std::size_t k = 0; k < a.T.values().size(); ++k) EXPECT_GE(b.T[k], a.T[k] - 1e-12);
}

TEST(Solve, IdempotentAtConvergence) {
  const ProblemConfig c = reference_grey();
  const SolveResult r = solve(c, Mode::kGrey);
  const StepResult again = GreyOperator(c).step(r.T, r.J);
  EXPECT_LE(max_abs_diff(again.T, r.T), c.tol);
}

TEST(Solve, NonConvergenceIsReported) {
  ProblemConfig c = reference_grey();
  c.max_iters = 2;
  const SolveResult r = solve(c, Mode::kGrey);
  EXPECT_FALSE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 2);
  EXPECT_FALSE(r.report.warnings.empty());
}

TEST(Solve, GreyModeRejectsFrequencyDependentKappa) {
  EXPECT_THROW(solve(reference_spectral(0.03), Mode::kGrey), std::invalid_argument);
}

TEST(Solve, SpectralSignOfKappa1ShiftsTemperature) {
  const SolveResult grey = solve(reference_grey(), Mode::kGrey);
  const SolveResult plus = solve(reference_spectral(0.03), Mode::kSpectral);
  const SolveResult minus = solve(reference_spectral(-0.03), Mode::kSpectral);
  ASSERT_TRUE(plus.report.converged);
  ASSERT_TRUE(minus.report.converged);
  const AnnulusDomain& d = reference_grey().domain;
  EXPECT_GT(mean_over_domain(plus.T, d), mean_over_domain(grey.T, d));
  EXPECT_GT(mean_over_domain(grey.T, d), mean_over_domain(minus.T, d));
  EXPECT_GT(max_abs_diff(plus.T, minus.T), 1e-3);
}

TEST(Solve, LaggedInversionReachesSameTemperature) {
  ProblemConfig c = reference_spectral(0.03);
  const SolveResult exact = solve(c, Mode::kSpectral);
  c.options.inversion = InversionScheme::kLagged;
  const SolveResult lagged = solve(c, Mode::kSpectral);
  EXPECT_TRUE(lagged.report.converged);
  EXPECT_LE(max_abs_diff(exact.T, lagged.T), 5 * c.tol);
}

TEST(Solve, GreyScatteringKeepsTheFixedPoint) {
  ProblemConfig c = reference_grey();
  c.tol = 1e-8;
  const SolveResult dry = solve(c, Mode::kGrey);
  c.model = SpectralModel::grey(0.5, 0.3);
  const SolveResult wet = solve(c, Mode::kGrey);
  EXPECT_TRUE(wet.report.converged);
  EXPECT_LE(max_abs_diff(dry.T, wet.T), 1e-6);
}

TEST(Solve, SpectralScatteringConvergesMonotonically) {
  ProblemConfig c = reference_spectral(0.03, 32);
  c.model = SpectralModel({0.5, 0.03}, 0.2, 0.01, 15.0);
  c.T0 = 0.0;
  const SolveResult r = solve(c, Mode::kSpectral);
  EXPECT_TRUE(r.report.converged);
  EXPECT_TRUE(r.report.all_monotone_up());
}

TEST(Solve, CircularLayoutAndCellAverageRun) {
  ProblemConfig c = reference_grey();
  c.options.layout = ConvolutionLayout::kCircular;
  EXPECT_TRUE(solve(c, Mode::kGrey).report.converged);
  c = reference_grey();
  c.options.origin = OriginTreatment::kCellAverage;
  EXPECT_TRUE(solve(c, Mode::kGrey).report.converged);
}

TEST(Solve, DeterministicAcrossThreadCounts) {
  const ProblemConfig c = reference_spectral(0.03, 32);
  set_thread_limit(1);
  const SolveResult one = solve(c, Mode::kSpectral);
  set_thread_limit(0);
  const SolveResult many = solve(c, Mode::kSpectral);
  ASSERT_EQ(one.T.values().size(), many.T.values().size());
  for (std::size_t k = 0; k < one.T.values().size(); ++k) EXPECT_EQ(one.T[k], many.T[k]);
}

TEST(Solve, WithDiffusion) {
  ProblemConfig c = reference_grey();
  const SolveResult r = solve(c, Mode::kGrey, DiffusionConfig{});
  EXPECT_TRUE(r.report.converged);
  ASSERT_TRUE(r.polar_temperature);
  const PolarField& tp = *r.polar_temperature;
  for (std::size_t j = 0; j < tp.grid().angular_count(); ++j) EXPECT_EQ(tp(0, j), 0.06);
  ASSERT_TRUE(r.report.last_diffusion);
  EXPECT_TRUE(r.report.last_diffusion->converged);

  const SolveResult s = solve(reference_spectral(0.03), Mode::kSpectral, DiffusionConfig{});
  EXPECT_TRUE(s.report.converged);
}

TEST(SolveBracketed, DarkProblem) {
  ProblemConfig c = reference_grey(16);
  c.illum.q0 = 0.0;
  const BracketResult b = solve_bracketed(c, Mode::kGrey);
  // The lower run stays at zero; the upper one decays towards it until the
  // step size falls below tol.
  EXPECT_EQ(b.low.T.max_abs(), 0.0);
  EXPECT_TRUE(b.high.report.converged);
  EXPECT_TRUE(b.high.report.all_monotone_down());
  EXPECT_LE(b.gap, 10 * c.tol);
}

TEST(SolveBracketed, ReferenceGrey) {
  const ProblemConfig c = reference_grey();
  const BracketResult b = solve_bracketed(c, Mode::kGrey);
  EXPECT_TRUE(b.low.report.all_monotone_up());
  EXPECT_TRUE(b.high.report.all_monotone_down());
  EXPECT_TRUE(b.low.report.converged);
  EXPECT_TRUE(b.high.report.converged);
  EXPECT_LE(b.gap, 10 * c.tol);
}

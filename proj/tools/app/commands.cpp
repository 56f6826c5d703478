#include "app/commands.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>

#include "app/output.hpp"
#include "app/run_config.hpp"
#include "radtrans/transport_oracle.hpp"

namespace radtrans::app {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-13);
}

nlohmann::json to_json(const IterationRecord& r) {
  return {{"iter", r.iter},         {"residual", r.residual},  {"tmin", r.tmin},
          {"tmax", r.tmax},         {"jmin", r.jmin},          {"jmax", r.jmax},
          {"monotone_up", r.monotone_up}, {"monotone_down", r.monotone_down},
          {"wall_ms", r.wall_ms}};
}

void write_report(const std::filesystem::path& path, const RunConfig& cfg,
                  const SolveResult& result) {
  nlohmann::json j;
  nlohmann::json config = nlohmann::json::object();
  for (const auto& [k, v] : cfg.effective) config[k] = v;
  j["config"] = config;
  j["converged"] = result.report.converged;
  j["iterations"] = result.report.iterations;
  j["records"] = nlohmann::json::array();
  for (const auto& r : result.report.records) j["records"].push_back(to_json(r));
  j["warnings"] = result.report.warnings;
  if (!result.report.records.empty()) {
    const auto& last = result.report.records.back();
    j["tmin_celsius"] = to_celsius(RescaledTemperature(std::max(last.tmin, 0.0)));
    j["tmax_celsius"] = to_celsius(RescaledTemperature(std::max(last.tmax, 0.0)));
  }
  if (result.report.last_diffusion) {
    const auto& d = *result.report.last_diffusion;
    j["diffusion"] = {{"picard_iterations", d.iterations},
                      {"converged", d.converged},
                      {"residuals_nonincreasing", d.residuals_nonincreasing},
                      {"switched_to_newton", d.switched_to_newton},
                      {"residuals", d.residuals}};
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

struct CheckLine {
  std::ostream& out;
  bool all_ok = true;

  void report(const std::string& name, const std::string& measured, const std::string& expected,
              bool ok) {
    out << name << ": " << measured << " vs " << expected << (ok ? " OK" : " FAIL") << "\n";
    all_ok = all_ok && ok;
  }
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

ProblemConfig reference_grey(std::size_t n) {
  ProblemConfig c;
  c.grid = CartesianGrid(n, 1.0);
  return c;
}

}  // namespace

int run_command(const std::filesystem::path& config_path,
                const std::optional<std::filesystem::path>& out, std::ostream& log,
                std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_run_config(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  if (out) cfg.out_dir = *out;

  std::optional<SolveResult> solved;
  try {
    solved = solve(cfg.problem, cfg.mode, cfg.diffusion);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  const SolveResult& result = *solved;

  try {
    std::filesystem::create_directories(cfg.out_dir);
    const auto& dir = cfg.out_dir;
    write_csv(dir / "temperature.csv", result.T);
    write_csv(dir / "mean_intensity.csv", result.J);
    write_csv(dir / "boundary_source.csv", result.SE);
    write_image(dir / "temperature.pgm", result.T);
    write_image(dir / "mean_intensity.pgm", result.J);
    write_image(dir / "boundary_source.pgm", result.SE);
    if (result.polar_temperature) write_csv(dir / "temperature_polar.csv", *result.polar_temperature);
    {
      std::ofstream log_file(dir / "convergence.log");
      write_log(log_file, result.report);
    }
    write_report(dir / "report.json", cfg, result);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  write_log(log, result.report);
  for (const auto& w : result.report.warnings) err << "warning: " << w << "\n";
  if (!result.report.converged) {
    log << "not converged after " << result.report.iterations << " iterations\n";
    return kExitNotConverged;
  }
  log << "converged in " << result.report.iterations << " iterations; outputs in "
      << cfg.out_dir.string() << "\n";
  return kExitConverged;
}

double oracle_discrepancy(const ProblemConfig& config, const ScalarField& T) {
  const GreyOperator op(config);
  const double kappa = config.model.kappa_coeffs()[0];
  const StepResult step = op.step(T, ScalarField(config.grid));
  const ScalarField source = assemble_source_grey(ScalarField(config.grid), T, 0.0, config.domain);
  RayQuadrature quad = RayQuadrature::defaults(config.domain);
  quad.n_theta = config.options.n_theta;
  const ScalarField direct =
      mean_intensity_direct(config.grid, bilinear_source(source),
                            planet_illumination(config.illum), kappa, config.domain, quad);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < direct.values().size(); ++k) {
    const Vec2 x = config.grid.node(k % config.grid.size(), k / config.grid.size());
    if (!config.domain.contains(x)) continue;
    num += (step.J[k] - direct[k]) * (step.J[k] - direct[k]);
    den += direct[k] * direct[k];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

int check_command(std::ostream& out) {
  CheckLine c{out};

  const double s = integrate([](double nu) { return planck(nu, RescaledTemperature(1.0)); }, 0.01, 15.0);
  c.report("sigma quadrature", fmt("%.6f", s), fmt("%.6f", sigma()),
           std::abs(s / sigma() - 1.0) <= 1e-3);

  for (int k = 1; k <= 4; ++k) {
    const double m = integrate(
        [k](double nu) { return std::pow(nu, k) * planck(nu, RescaledTemperature(1.0)); }, 0.001,
        60.0);
    const double published = moment_coefficient(k);
    const int digits = k == 4 ? 2 : 3;
    char name[32];
    std::snprintf(name, sizeof name, "moment c%d", k);
    char measured[32];
    char expected[32];
    std::snprintf(measured, sizeof measured, "%.*f", digits, m);
    std::snprintf(expected, sizeof expected, "%.*f", digits, published);
    c.report(name, measured, expected, std::abs(m / published - 1.0) <= 1e-3);
  }

  {
    const CartesianGrid grid(16, 1.0);
    const KernelSpec spec{0.5, 2, 0.1, OriginTreatment::kCutoff};
    ScalarField delta(grid);
    const double h = grid.spacing();
    delta(5, 9) = 1.0 / (h * h);
    const ScalarField conv = convolve(delta, spec);
    double err = 0.0;
    for (std::size_t j = 0; j < 16; ++j) {
      for (std::size_t i = 0; i < 16; ++i) {
        const double expect = kernel_sample(static_cast<std::ptrdiff_t>(i) - 5,
                                            static_cast<std::ptrdiff_t>(j) - 9, h, spec);
        err = std::max(err, std::abs(conv(i, j) - expect));
      }
    }
    c.report("kernel delta identity", fmt("%.2e", err), "<= 1e-12", err <= 1e-12);
  }

  {
    const ProblemConfig cfg = reference_grey(64);
    const double mass = sample_kernel(cfg.kernel_for(0.5), cfg.grid).mass();
    c.report("kernel mass", fmt("%.6f", mass), "<= 1", mass <= 1.0 && mass > 0.0);
  }

  {
    const ProblemConfig cfg = reference_grey(16);
    const double value = 0.37;
    const double kappa = 0.5;
    const ScalarField J = mean_intensity_direct(
        cfg.grid, [&](Vec2 y) { return cfg.domain.contains_closure(y) ? value : 0.0; },
        [&](Vec2, Vec2, bool) { return value; }, kappa, cfg.domain,
        RayQuadrature::defaults(cfg.domain));
    double err = 0.0;
    for (std::size_t k = 0; k < J.values().size(); ++k) {
      const Vec2 x = cfg.grid.node(k % 16, k / 16);
      if (cfg.domain.contains(x)) err = std::max(err, std::abs(J[k] - value));
    }
    c.report("constant-source ceiling", fmt("%.2e", err), "<= 1e-10", err <= 1e-10);
  }

  {
    const ProblemConfig cfg = reference_grey(16);
    const SolveResult r = solve(cfg, Mode::kGrey);
    const double d = oracle_discrepancy(cfg, r.T);
    c.report("oracle vs FFT (16x16, rel L2)", fmt("%.4f", d), "<= 0.05", d <= 0.05);
  }

  {
    ProblemConfig cfg = reference_grey(64);
    const BracketResult b = solve_bracketed(cfg, Mode::kGrey);
    c.report("monotone from T0 = 0", b.low.report.all_monotone_up() ? "yes" : "no", "yes",
             b.low.report.all_monotone_up() && b.low.report.converged);
    c.report("monotone from T0 = T_max", b.high.report.all_monotone_down() ? "yes" : "no", "yes",
             b.high.report.all_monotone_down() && b.high.report.converged);
    c.report("bracket gap", fmt("%.2e", b.gap), fmt("<= %.0e", 10 * cfg.tol),
             b.gap <= 10 * cfg.tol);
  }

  out << (c.all_ok ? "all checks passed" : "some checks FAILED") << "\n";
  return c.all_ok ? 0 : 1;
}

BenchReport run_bench(const std::vector<std::size_t>& sizes) {
  BenchReport report;
  for (std::size_t n : sizes) {
    ProblemConfig cfg = reference_grey(n);
    const SolveResult converged = solve(cfg, Mode::kGrey);
    const GreyOperator op(cfg);
    const ScalarField zero(cfg.grid);

    BenchRow row;
    row.n = n;
    double best = 1e300;
    double total = 0.0;
    for (int rep = 0; rep < 3 || (total < 200.0 && rep < 1000); ++rep) {
      const auto start = Clock::now();
      const StepResult step = op.step(converged.T, zero);
      static_cast<void>(step);
      const double ms = elapsed_ms(start);
      best = std::min(best, ms);
      total += ms;
    }
    row.t_fft_ms = best;

    const auto start = Clock::now();
    row.rel_l2 = oracle_discrepancy(cfg, converged.T);
    row.t_direct_ms = elapsed_ms(start);
    row.speedup = row.t_direct_ms / row.t_fft_ms;
    report.rows.push_back(row);
  }

  if (report.rows.size() >= 2) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(report.rows.size());
    for (const auto& r : report.rows) {
      const double x = std::log(static_cast<double>(r.n));
      const double y = std::log(r.t_fft_ms);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double denom = m * sxx - sx * sx;
    if (denom > 0.0) {
      report.exponent = (m * sxy - sx * sy) / denom;
      report.scaling_ok = *report.exponent >= 1.8 && *report.exponent <= 2.6;
    }
  }
  return report;
}

int bench_command(const std::vector<std::size_t>& sizes, std::ostream& out) {
  const BenchReport report = run_bench(sizes);
  out << "size t_fft_ms t_direct_ms speedup rel_l2\n";
  char buf[160];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%zu %.4f %.2f %.1f %.4f\n", r.n, r.t_fft_ms, r.t_direct_ms,
                  r.speedup, r.rel_l2);
    out << buf;
  }
  if (report.exponent) {
    std::snprintf(buf, sizeof buf, "t_fft ~ n^%.2f (expected 1.8 .. 2.6) %s\n", *report.exponent,
                  report.scaling_ok ? "OK" : "FAIL");
    out << buf;
  }
  return report.scaling_ok ? 0 : kExitNotConverged;
}

std::vector<std::size_t> parse_sizes(std::string_view text) {
  std::vector<std::size_t> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc{} || ptr != item.data() + item.size()) {
      throw ConfigError("--sizes: invalid grid size '" + std::string(item) + "'");
    }
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace radtrans::app

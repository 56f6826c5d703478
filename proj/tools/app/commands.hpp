#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "radtrans/solver.hpp"

namespace radtrans::app {

inline constexpr int kExitConverged = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitNotConverged = 2;

/// Solves the configured problem and writes fields, images, the convergence
/// log and report.json into the output directory.
int run_command(const std::filesystem::path& config, const std::optional<std::filesystem::path>& out,
                std::ostream& log, std::ostream& err);

/// Invariant suite; one line per check, exit 0 iff all pass.
int check_command(std::ostream& out);

/// Relative L2 difference over the annulus between the convolution mean
/// intensity and the ray-marching oracle for the source sigma T^4.
double oracle_discrepancy(const ProblemConfig& config, const ScalarField& T);

struct BenchRow {
  std::size_t n = 0;
  double t_fft_ms = 0.0;
  double t_direct_ms = 0.0;
  double speedup = 0.0;
  double rel_l2 = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  /// Least-squares slope of log t_fft against log n, with two or more sizes.
  std::optional<double> exponent;
  bool scaling_ok = true;
};

BenchReport run_bench(const std::vector<std::size_t>& sizes);

/// Prints the table; exit 0, or 2 when the fitted exponent leaves [1.8, 2.6].
int bench_command(const std::vector<std::size_t>& sizes, std::ostream& out);

/// "16,32,64" -> {16, 32, 64}; the empty string gives an empty list.
std::vector<std::size_t> parse_sizes(std::string_view text);

}  // namespace radtrans::app

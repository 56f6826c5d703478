#include "radtrans/kernel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace radtrans {

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t period_for(const CartesianGrid& grid, ConvolutionLayout layout) {
  return layout == ConvolutionLayout::kLinear ? 2 * grid.size() : grid.size();
}

// Signed node offset stored at periodic index m, or nullopt for the unused
// Nyquist slot of the padded layout.
std::optional<std::ptrdiff_t> wrapped_offset(std::size_t m, std::size_t n,
                                             ConvolutionLayout layout) {
  const auto sm = static_cast<std::ptrdiff_t>(m);
  const auto sn = static_cast<std::ptrdiff_t>(n);
  if (layout == ConvolutionLayout::kLinear) {
    if (sm < sn) return sm;
    if (sm == sn) return std::nullopt;
    return sm - 2 * sn;
  }
  return sm < sn / 2 ? sm : sm - sn;
}

}  // namespace

void KernelSpec::validate() const {
  if (!(kappa > 0.0)) throw std::invalid_argument("kernel: kappa must be positive");
  if (dim != 2 && dim != 3) throw std::invalid_argument("kernel: dim must be 2 or 3");
  if (!(r_cut >= 0.0)) throw std::invalid_argument("kernel: r_cut must be nonnegative");
}

double kernel_value(double r, const KernelSpec& spec) {
  if (r <= spec.r_cut || r == 0.0) return 0.0;
  const double decay = spec.kappa * std::exp(-spec.kappa * r);
  if (spec.dim == 3) return decay / (4.0 * kPi * r * r);
  return decay / (2.0 * kPi * r);
}

double kernel_value(Vec2 x, const KernelSpec& spec) { return kernel_value(norm(x), spec); }

double kernel_cell_average(double kappa, double spacing) {
  // In polar coordinates the radial integral of kappa e^{-kappa s} is
  // elementary; the square cell is eight copies of theta in [0, pi/4] with
  // boundary radius (h/2)/cos(theta). Composite Simpson on the smooth remainder.
  constexpr int kIntervals = 512;
  const double half = 0.5 * spacing;
  const double width = 0.25 * kPi / kIntervals;
  auto f = [&](double theta) { return -std::expm1(-kappa * half / std::cos(theta)); };
  double sum = f(0.0) + f(0.25 * kPi);
  for (int i = 1; i < kIntervals; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(i * width);
  const double octant = sum * width / 3.0;
  return 8.0 * octant / (2.0 * kPi) / (spacing * spacing);
}

double kernel_sample(std::ptrdiff_t di, std::ptrdiff_t dj, double spacing,
                     const KernelSpec& spec) {
  if (di == 0 && dj == 0) {
    return spec.origin == OriginTreatment::kCellAverage ? kernel_cell_average(spec.kappa, spacing)
                                                        : 0.0;
  }
  const double r = spacing * std::hypot(static_cast<double>(di), static_cast<double>(dj));
  if (spec.origin == OriginTreatment::kCellAverage) {
    return kernel_value(r, KernelSpec{spec.kappa, spec.dim, 0.0, spec.origin});
  }
  return kernel_value(r, spec);
}

double KernelSamples::mass() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return spacing * spacing * sum;
}

KernelSamples sample_kernel(const KernelSpec& spec, const CartesianGrid& grid,
                            ConvolutionLayout layout) {
  spec.validate();
  if (spec.dim != 2) throw std::invalid_argument("sample_kernel: only the 2-D kernel is gridded");
  KernelSamples out;
  out.period = period_for(grid, layout);
  out.spacing = grid.spacing();
  out.values.assign(out.period * out.period, 0.0);
  for (std::size_t mj = 0; mj < out.period; ++mj) {
    const auto dj = wrapped_offset(mj, grid.size(), layout);
    if (!dj) continue;
    for (std::size_t mi = 0; mi < out.period; ++mi) {
      const auto di = wrapped_offset(mi, grid.size(), layout);
      if (!di) continue;
      out.values[mj * out.period + mi] = kernel_sample(*di, *dj, grid.spacing(), spec);
    }
  }
  return out;
}

struct Convolver::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

Convolver::Convolver(const CartesianGrid& grid, ConvolutionLayout layout)
    : grid_(grid), layout_(layout), period_(period_for(grid, layout)), plans_(new Plans) {
  const int n = static_cast<int>(period_);
  std::vector<double> real(period_ * period_);
  Spectrum spec(spectrum_size());
  auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());
  // ESTIMATE keeps plans, and therefore results, identical from run to run.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  plans_->forward = fftw_plan_dft_r2c_2d(n, n, real.data(), cplx, flags);
  plans_->backward = fftw_plan_dft_c2r_2d(n, n, cplx, real.data(), flags);
  if (!plans_->forward || !plans_->backward) throw std::runtime_error("FFTW planning failed");
}

Convolver::~Convolver() = default;
Convolver::Convolver(Convolver&&) noexcept = default;
Convolver& Convolver::operator=(Convolver&&) noexcept = default;

Spectrum Convolver::transform_kernel(const KernelSpec& spec) const {
  const KernelSamples samples = sample_kernel(spec, grid_, layout_);
  std::vector<double> real = samples.values;
  Spectrum out(spectrum_size());
  fftw_execute_dft_r2c(plans_->forward, real.data(), reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = grid_.spacing() * grid_.spacing() / static_cast<double>(period_ * period_);
  for (auto& c : out) c *= scale;
  return out;
}

Spectrum Convolver::forward(const ScalarField& field) const {
  if (!(field.grid() == grid_)) throw std::domain_error("convolve: field lives on a different grid");
  const std::size_t n = grid_.size();
  std::vector<double> real(period_ * period_, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::copy_n(field.values().begin() + static_cast<std::ptrdiff_t>(j * n), n,
                real.begin() + static_cast<std::ptrdiff_t>(j * period_));
  }
  Spectrum out(spectrum_size());
  fftw_execute_dft_r2c(plans_->forward, real.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

ScalarField Convolver::inverse(const Spectrum& spectrum) const {
  if (spectrum.size() != spectrum_size()) {
    throw std::domain_error("convolve: spectrum size does not match the grid");
  }
  Spectrum scratch = spectrum;  // c2r overwrites its input
  std::vector<double> real(period_ * period_);
  fftw_execute_dft_c2r(plans_->backward, reinterpret_cast<fftw_complex*>(scratch.data()),
                       real.data());
  const std::size_t n = grid_.size();
  ScalarField out(grid_);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) out(i, j) = real[j * period_ + i];
  }
  return out;
}

ScalarField Convolver::apply(const ScalarField& field, const Spectrum& kernel) const {
  if (kernel.size() != spectrum_size()) {
    throw std::domain_error("convolve: kernel spectrum does not match the grid");
  }
  Spectrum product = forward(field);
  for (std::size_t k = 0; k < product.size(); ++k) product[k] *= kernel[k];
  return inverse(product);
}

ScalarField convolve(const ScalarField& field, const KernelSpec& spec, ConvolutionLayout layout) {
  const Convolver convolver(field.grid(), layout);
  return convolver.apply(field, convolver.transform_kernel(spec));
}

ScalarField direct_convolve(const ScalarField& field, const KernelSpec& spec) {
  spec.validate();
  const CartesianGrid& grid = field.grid();
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  const double h = grid.spacing();
  // Tabulate weights by offset so the quadruple loop only multiplies and adds.
  const std::ptrdiff_t span = 2 * n - 1;
  std::vector<double> weight(static_cast<std::size_t>(span * span));
  for (std::ptrdiff_t dj = -(n - 1); dj < n; ++dj) {
    for (std::ptrdiff_t di = -(n - 1); di < n; ++di) {
      weight[static_cast<std::size_t>((dj + n - 1) * span + (di + n - 1))] =
          kernel_sample(di, dj, h, spec);
    }
  }
  ScalarField out(grid);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t pj = 0; pj < n; ++pj) {
    for (std::ptrdiff_t pi = 0; pi < n; ++pi) {
      double acc = 0.0;
      for (std::ptrdiff_t qj = 0; qj < n; ++qj) {
        for (std::ptrdiff_t qi = 0; qi < n; ++qi) {
          const double f = field(static_cast<std::size_t>(qi), static_cast<std::size_t>(qj));
          if (f == 0.0) continue;
          acc += weight[static_cast<std::size_t>((pj - qj + n - 1) * span + (pi - qi + n - 1))] * f;
        }
      }
      out(static_cast<std::size_t>(pi), static_cast<std::size_t>(pj)) = h * h * acc;
    }
  }
  return out;
}

}  // namespace radtrans

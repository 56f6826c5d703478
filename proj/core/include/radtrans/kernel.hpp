#pragma once

// Exponential transport kernel Y_kappa(x) = kappa exp(-kappa |x|) / (pi |2x|^(d-1))
// and its discrete convolution with zero-extended grid fields.

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "radtrans/field.hpp"

namespace radtrans {

/// How the kernel is sampled at and near the origin.
enum class OriginTreatment {
  kCutoff,       ///< zero for |x| <= r_cut
  kCellAverage,  ///< point values off the origin, exact cell integral at offset 0
};

struct KernelSpec {
  double kappa = 1.0;
  int dim = 2;
  double r_cut = 0.0;
  OriginTreatment origin = OriginTreatment::kCutoff;

  void validate() const;
};

enum class ConvolutionLayout {
  kLinear,    ///< zero-padded to 2n per side, no wrap-around
  kCircular,  ///< unpadded n x n periodic transform
};

/// Point value of Y_kappa at distance r (0 inside the cutoff disc).
double kernel_value(double r, const KernelSpec& spec);
double kernel_value(Vec2 x, const KernelSpec& spec);

/// (1/h^2) times the integral of the 2-D kernel over the h x h cell centred at 0.
double kernel_cell_average(double kappa, double spacing);

/// Kernel weight the discrete convolution applies to the node offset (di, dj).
double kernel_sample(std::ptrdiff_t di, std::ptrdiff_t dj, double spacing, const KernelSpec& spec);

/// Kernel samples arranged for an N x N periodic transform: offset 0 at index 0,
/// negative offsets wrapped to the top of each axis.
struct KernelSamples {
  std::size_t period = 0;
  double spacing = 0.0;
  std::vector<double> values;

  /// h^2 times the sum of all samples.
  double mass() const;
};

KernelSamples sample_kernel(const KernelSpec& spec, const CartesianGrid& grid,
                            ConvolutionLayout layout = ConvolutionLayout::kLinear);

/// Half-spectrum of a real periodic array, as produced by a real-to-complex DFT.
using Spectrum = std::vector<std::complex<double>>;

/// Precomputed transforms for convolving fields on one grid. Const member
/// functions are safe to call concurrently.
class Convolver {
 public:
  explicit Convolver(const CartesianGrid& grid,
                     ConvolutionLayout layout = ConvolutionLayout::kLinear);
  ~Convolver();
  Convolver(Convolver&&) noexcept;
  Convolver& operator=(Convolver&&) noexcept;

  const CartesianGrid& grid() const { return grid_; }
  ConvolutionLayout layout() const { return layout_; }
  std::size_t period() const { return period_; }
  std::size_t spectrum_size() const { return period_ * (period_ / 2 + 1); }

  /// Kernel spectrum with the h^2 quadrature weight and the inverse-DFT
  /// normalisation folded in.
  Spectrum transform_kernel(const KernelSpec& spec) const;

  Spectrum forward(const ScalarField& field) const;
  /// Inverse transform cropped to the grid.
  ScalarField inverse(const Spectrum& spectrum) const;

  /// h^2 sum_q Y(x_p - x_q) f(x_q) for every node p.
  ScalarField apply(const ScalarField& field, const Spectrum& kernel) const;

 private:
  struct Plans;

  CartesianGrid grid_;
  ConvolutionLayout layout_;
  std::size_t period_;
  std::unique_ptr<Plans> plans_;
};

/// Convenience wrapper building a Convolver for a single product.
ScalarField convolve(const ScalarField& field, const KernelSpec& spec,
                     ConvolutionLayout layout = ConvolutionLayout::kLinear);

/// O(n^4) reference sum with the same kernel weights as convolve.
ScalarField direct_convolve(const ScalarField& field, const KernelSpec& spec);

}  // namespace radtrans

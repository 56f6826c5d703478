#include "radtrans/diffusion.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace radtrans {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Unknowns are the non-Dirichlet rings, numbered ring by ring.
class RingSystem {
 public:
  RingSystem(const PolarGrid& grid, const DiffusionConfig& cfg)
      : grid_(grid),
        cfg_(cfg),
        first_(1),
        last_(cfg.outer == OuterBoundary::kDirichlet ? grid.radial_count() - 2
                                                     : grid.radial_count() - 1) {}

  std::size_t first_ring() const { return first_; }
  std::size_t last_ring() const { return last_; }
  std::size_t size() const { return (last_ - first_ + 1) * grid_.angular_count(); }
  Eigen::Index unknown(std::size_t i, std::size_t j) const {
    return static_cast<Eigen::Index>((i - first_) * grid_.angular_count() + j);
  }
  bool is_dirichlet(std::size_t i) const { return i < first_ || i > last_; }

  // Assembles kappa_T (-Laplacian) + diag(reaction) and moves Dirichlet
  // neighbours to the right-hand side.
  SparseMatrix assemble(const std::vector<double>& reaction, Eigen::VectorXd& rhs) const {
    const std::size_t n_th = grid_.angular_count();
    const double dr = grid_.radial_spacing();
    const double dth = grid_.angular_spacing();
    const double k = cfg_.kappa_T;
    std::vector<Triplet> triplets;
    triplets.reserve(size() * 5);
    for (std::size_t i = first_; i <= last_; ++i) {
      const double r = grid_.radius(i);
      const bool outer_neumann = i == grid_.radial_count() - 1;
      const double up = outer_neumann ? 0.0 : 1.0 / (dr * dr) + 1.0 / (2.0 * r * dr);
      const double down = outer_neumann ? 2.0 / (dr * dr) : 1.0 / (dr * dr) - 1.0 / (2.0 * r * dr);
      const double around = 1.0 / (r * r * dth * dth);
      const double centre = 2.0 / (dr * dr) + 2.0 * around;
      for (std::size_t j = 0; j < n_th; ++j) {
        const Eigen::Index row = unknown(i, j);
        triplets.emplace_back(row, row, k * centre + reaction[grid_.index(i, j)]);
        triplets.emplace_back(row, unknown(i, (j + 1) % n_th), -k * around);
        triplets.emplace_back(row, unknown(i, (j + n_th - 1) % n_th), -k * around);
        auto couple = [&](std::size_t ni, double weight) {
          if (weight == 0.0) return;
          if (is_dirichlet(ni)) {
            rhs[row] += k * weight * cfg_.T_E;
          } else {
            triplets.emplace_back(row, unknown(ni, j), -k * weight);
          }
        };
        couple(i - 1, down);
        if (!outer_neumann) couple(i + 1, up);
      }
    }
    SparseMatrix a(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(size()));
    a.setFromTriplets(triplets.begin(), triplets.end());
    a.makeCompressed();
    return a;
  }

 private:
  const PolarGrid& grid_;
  const DiffusionConfig& cfg_;
  std::size_t first_;
  std::size_t last_;
};

double max_abs_difference(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

PolarGrid::PolarGrid(const AnnulusDomain& domain, std::size_t n_r, std::size_t n_theta)
    : domain_(domain), n_r_(n_r), n_theta_(n_theta), dr_(0.0), dtheta_(0.0) {
  if (n_r < 4) throw std::invalid_argument("polar grid needs at least 4 radial nodes");
  if (n_theta < 8) throw std::invalid_argument("polar grid needs at least 8 angular nodes");
  dr_ = domain.thickness() / static_cast<double>(n_r - 1);
  dtheta_ = kTwoPi / static_cast<double>(n_theta);
}

Vec2 PolarGrid::node(std::size_t i, std::size_t j) const {
  const double r = radius(i);
  const double t = angle(j);
  return {r * std::cos(t), r * std::sin(t)};
}

void DiffusionConfig::validate() const {
  if (!(kappa_T >= 0.0)) throw std::invalid_argument("kappa_T must be nonnegative");
  if (!(T_E >= 0.0)) throw std::invalid_argument("T_E must be nonnegative");
  if (max_picard < 1) throw std::invalid_argument("max_picard must be at least 1");
  if (!(picard_tol > 0.0)) throw std::invalid_argument("picard_tol must be positive");
}

EmissionLaw EmissionLaw::grey() {
  return EmissionLaw{
      [](double t) { return kSigma * t * t * t * t; },
      [](double t) { return 4.0 * kSigma * t * t * t; },
      [](double j) { return std::sqrt(std::sqrt(std::max(j, 0.0) / kSigma)); },
  };
}

EmissionLaw EmissionLaw::spectral(const SpectralModel& model, RescaledTemperature T_max) {
  return EmissionLaw{
      [model](double t) { return emitted_power(RescaledTemperature(std::max(t, 0.0)), model); },
      [model](double t) {
        return emitted_power_derivative(RescaledTemperature(std::max(t, 0.0)), model);
      },
      [model, T_max](double j) {
        return invert_emitted_power(std::max(j, 0.0), model, T_max).value();
      },
  };
}

DiffusionResult solve_diffusion(const PolarField& source, const DiffusionConfig& cfg,
                                const PolarField& T_init, const EmissionLaw& law) {
  cfg.validate();
  const PolarGrid& grid = source.grid();
  if (T_init.values().size() != source.values().size()) {
    throw std::invalid_argument("solve_diffusion: source and initial field differ in size");
  }
  for (double j : source.values()) {
    if (!(j >= 0.0)) throw std::invalid_argument("solve_diffusion: source must be nonnegative");
  }

  DiffusionResult result{PolarField(grid), {}};
  auto& report = result.report;

  if (cfg.kappa_T == 0.0) {
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
      result.temperature.values()[k] = law.inverse(source.values()[k]);
    }
    report.converged = true;
    return result;
  }

  const RingSystem system(grid, cfg);
  std::vector<double> current = T_init.values();
  for (double& t : current) t = std::max(t, 0.0);
  for (std::size_t i = 0; i < grid.radial_count(); ++i) {
    if (!system.is_dirichlet(i)) continue;
    for (std::size_t j = 0; j < grid.angular_count(); ++j) current[grid.index(i, j)] = cfg.T_E;
  }

  std::vector<double> algebraic;
  if (cfg.relaxation_variant) {
    algebraic.resize(grid.node_count());
    for (std::size_t k = 0; k < grid.node_count(); ++k) algebraic[k] = law.inverse(source.values()[k]);
  }

  Eigen::SparseLU<SparseMatrix> lu;
  bool pattern_ready = false;
  Linearization scheme = cfg.linearization;
  int growth_streak = 0;

  const int max_iter = cfg.relaxation_variant ? 1 : cfg.max_picard;
  for (int m = 0; m < max_iter; ++m) {
    std::vector<double> reaction(grid.node_count(), 0.0);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(system.size()));
    for (std::size_t i = system.first_ring(); i <= system.last_ring(); ++i) {
      for (std::size_t j = 0; j < grid.angular_count(); ++j) {
        const std::size_t k = grid.index(i, j);
        const Eigen::Index row = system.unknown(i, j);
        const double t = current[k];
        if (cfg.relaxation_variant) {
          reaction[k] = 1.0;
          rhs[row] = algebraic[k];
        } else if (scheme == Linearization::kLagged) {
          reaction[k] = t > 0.0 ? law.power(t) / t : 0.0;
          rhs[row] = source.values()[k];
        } else {
          const double dp = law.derivative(t);
          reaction[k] = dp;
          rhs[row] = source.values()[k] - law.power(t) + dp * t;
        }
      }
    }
    const SparseMatrix a = system.assemble(reaction, rhs);
    if (!pattern_ready) {
      lu.analyzePattern(a);
      pattern_ready = true;
    }
    lu.factorize(a);
    if (lu.info() != Eigen::Success) {
      throw std::runtime_error("solve_diffusion: linear system is singular");
    }
    const Eigen::VectorXd solution = lu.solve(rhs);

    std::vector<double> next = current;
    for (std::size_t i = system.first_ring(); i <= system.last_ring(); ++i) {
      for (std::size_t j = 0; j < grid.angular_count(); ++j) {
        next[grid.index(i, j)] = std::max(0.0, solution[system.unknown(i, j)]);
      }
    }
    const double residual = max_abs_difference(next, current);
    if (!report.residuals.empty() && residual > report.residuals.back()) {
      report.residuals_nonincreasing = false;
      ++growth_streak;
    } else {
      growth_streak = 0;
    }
    report.residuals.push_back(residual);
    current = std::move(next);
    report.iterations = m + 1;

    if (cfg.relaxation_variant || residual <= cfg.picard_tol) {
      report.converged = true;
      break;
    }
    if (scheme == Linearization::kLagged && growth_streak >= 2) {
      scheme = Linearization::kNewton;
      report.switched_to_newton = true;
      std::ostringstream msg;
      msg << "lagged linearisation diverging at Picard step " << m + 1
          << " (residual " << residual << "); switched to Newton";
      report.warnings.push_back(msg.str());
    }
  }
  if (!report.residuals_nonincreasing) {
    report.warnings.emplace_back("Picard residuals were not monotonically nonincreasing");
  }
  if (!report.converged) {
    std::ostringstream msg;
    msg << "Picard iteration did not reach " << cfg.picard_tol << " in " << cfg.max_picard
        << " steps";
    report.warnings.push_back(msg.str());
  }
  result.temperature.values() = std::move(current);
  return result;
}

PolarField to_polar(const ScalarField& field, const PolarGrid& grid) {
  PolarField out(grid);
  for (std::size_t i = 0; i < grid.radial_count(); ++i) {
    for (std::size_t j = 0; j < grid.angular_count(); ++j) {
      out(i, j) = interpolate_bilinear(field, grid.node(i, j));
    }
  }
  return out;
}

ScalarField to_cartesian(const PolarField& field, const CartesianGrid& grid) {
  const PolarGrid& polar = field.grid();
  const AnnulusDomain& domain = polar.domain();
  ScalarField out(grid);
  const std::size_t n_th = polar.angular_count();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Vec2 x = grid.node(i, j);
      if (!domain.contains_closure(x)) continue;
      const double fr = std::clamp((norm(x) - domain.inner_radius()) / polar.radial_spacing(), 0.0,
                                   static_cast<double>(polar.radial_count() - 1));
      double theta = std::atan2(x.y, x.x);
      if (theta < 0.0) theta += kTwoPi;
      const double ft = theta / polar.angular_spacing();
      const auto ir = std::min(static_cast<std::size_t>(fr), polar.radial_count() - 2);
      const auto it = static_cast<std::size_t>(ft) % n_th;
      const double ar = fr - static_cast<double>(ir);
      const double at = ft - std::floor(ft);
      const std::size_t it1 = (it + 1) % n_th;
      out(i, j) = (1.0 - ar) * (1.0 - at) * field(ir, it) + ar * (1.0 - at) * field(ir + 1, it) +
                  (1.0 - ar) * at * field(ir, it1) + ar * at * field(ir + 1, it1);
    }
  }
  return out;
}

}  // namespace radtrans

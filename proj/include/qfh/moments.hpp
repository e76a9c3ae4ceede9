#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qfh {

/// Quadrature nodes and weights along one velocity axis.
struct Axis {
  std::vector<double> nodes;
  std::vector<double> weights;

  /// Uniform trapezoid rule on [lo, hi] with `count` nodes.
  static Axis uniform(double lo, double hi, std::size_t count);

  /// Trapezoid weights for user-supplied (possibly non-uniform) nodes.
  static Axis from_nodes(std::vector<double> nodes);

  /// Gauss–Hermite rule for integrands that look like exp(-((v-center)/scale)^2)
  /// times a smooth factor. The Gaussian weight is folded back into the
  /// weights, so they apply to the full tabulated integrand.
  static Axis gauss_hermite(std::size_t count, double center, double scale);

  std::size_t size() const { return nodes.size(); }
};

/// Tensor-product velocity grid in one or three dimensions. Tabulated
/// distributions are flattened row-major (last axis fastest).
class VelocityGrid {
 public:
  static constexpr std::size_t min_nodes = 8;

  /// Throws InvalidArgument unless dim ∈ {1, 3}, each axis has at least
  /// min_nodes strictly increasing nodes and positive weights.
  explicit VelocityGrid(std::vector<Axis> axes);

  int dim() const { return static_cast<int>(axes_.size()); }
  const Axis& axis(int i) const { return axes_.at(static_cast<std::size_t>(i)); }
  std::size_t size() const;

  /// Multi-index of flat position `flat`.
  void unflatten(std::size_t flat, std::size_t* idx) const;

 private:
  std::vector<Axis> axes_;
};

/// Dense rank-r tensor over a d-dimensional index space.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int dim, int rank);

  int dim() const { return dim_; }
  int rank() const { return rank_; }
  std::size_t size() const { return data_.size(); }

  double& at(std::span<const int> idx) { return data_[offset(idx)]; }
  double at(std::span<const int> idx) const { return data_[offset(idx)]; }

  template <class... I>
  double operator()(I... idx) const {
    const int ids[] = {static_cast<int>(idx)...};
    return at(std::span<const int>(ids, sizeof...(I)));
  }

  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t offset(std::span<const int> idx) const;

  int dim_ = 0;
  int rank_ = 0;
  std::vector<double> data_;
};

/// Density, mean velocity and central moments P, Q, R (mass-weighted).
struct MomentSet {
  int dim = 0;
  double n = 0.0;
  std::vector<double> u;
  Tensor P;  // rank 2
  Tensor Q;  // rank 3
  Tensor R;  // rank 4
  double p = 0.0;
  std::vector<double> q;
  /// Set when the tabulated f is not small on the grid boundary.
  bool boundary_decay_violated = false;
  double boundary_ratio = 0.0;
};

struct MomentOptions {
  double mass = 1.0;
  /// Boundary max|f| must stay below this fraction of the overall max|f|.
  double decay_threshold = 1e-10;
};

/// Moments of a tabulated (possibly negative) distribution. Throws
/// NumericalError when the density is not positive.
MomentSet compute_moments(std::span<const double> f, const VelocityGrid& grid,
                          const MomentOptions& opts = {});

struct ScalarReductions {
  double p = 0.0;
  std::vector<double> q;
};

/// p = tr(P)/3 in 3D (P_xx in 1D); q_i = Q_jji / 2.
ScalarReductions scalar_reductions(const MomentSet& mset);

struct TabulatedDistribution {
  VelocityGrid grid;
  std::vector<double> f;
};

/// Long-format CSV: a header `v,f` (1D) or `vx,vy,vz,f` (3D), then one row
/// per node. Rows may come in any order but must cover the full tensor
/// product of the distinct per-axis values.
TabulatedDistribution load_distribution_csv(std::istream& in);
TabulatedDistribution load_distribution_csv_file(const std::string& path);

/// `component,value` rows (n, u_x, P_xx, ..., R_zzzz, p, q_x, ...). Only
/// index-sorted components are listed; the rest follow by symmetry.
void write_moments_csv(std::ostream& out, const MomentSet& mset);
/// The rows write_moments_csv emits, in the same order.
std::vector<std::pair<std::string, double>> moment_components(const MomentSet& mset);

std::string moments_to_json(const MomentSet& mset);

}  // namespace qfh

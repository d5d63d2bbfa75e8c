#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "rsc/errors.hpp"

namespace rsc {

/// Requested cluster: dimension and sampling density (points per dimension).
struct SubspaceSpec {
  int dim = 1;
  double density = 1.0;

  /// Number of points drawn on this subspace, round(density * dim) with
  /// ties to even.
  int num_points() const;
};

struct ModelConfig {
  int ambient_dim = 1;
  std::vector<SubspaceSpec> subspaces;
  double noise_sigma = 0.0;  // relative noise: E||z||^2 = sigma^2 ||x||^2
  std::uint64_t seed = 0;

  int total_points() const;
  void validate() const;  // throws InvalidConfigError
};

/// Realized cluster: an orthonormal basis of the ambient space.
struct Subspace {
  Eigen::MatrixXd basis;  // n x d, orthonormal columns

  int ambient_dim() const { return static_cast<int>(basis.rows()); }
  int dim() const { return static_cast<int>(basis.cols()); }
};

struct DataMatrix {
  Eigen::MatrixXd Y;                          // n x N observed points
  std::optional<Eigen::MatrixXd> clean;       // n x N noiseless points
  std::optional<std::vector<int>> labels;     // ground-truth cluster ids

  int ambient_dim() const { return static_cast<int>(Y.rows()); }
  int num_points() const { return static_cast<int>(Y.cols()); }
};

/// Output of the generator: data plus the realized subspaces.
struct Dataset {
  DataMatrix data;
  std::vector<Subspace> subspaces;
};

/// Principal-angle cosines (nonincreasing) and the normalized affinity,
/// the root mean square of the cosines.
struct SubspaceGeometry {
  Eigen::VectorXd cos_angles;
  double affinity = 0.0;
};

/// Knobs for the model-condition diagnostics. The theoretical bounds leave
/// their constants unspecified, so callers supply them.
struct TheoryConstants {
  double kappa0 = 1.0;
  double rho_star = 2.8188;
  double sigma_star = 1.0;
  double c0 = 1.0;
};

struct TheoryDiagnostics {
  std::vector<double> max_affinity;   // per subspace, max over other subspaces
  double affinity_bound = 0.0;        // kappa0 / log N
  std::vector<bool> affinity_ok;      // max_affinity[l] <= bound
  std::vector<bool> sampling_ok;      // rho_l >= rho_star
  std::vector<bool> density_cap_ok;   // rho_l <= e^{d_l/2}
  bool noise_ok = false;              // sigma < sigma_star
  bool dim_ok = false;                // max d_l < c0 * n / (log N)^2
  TheoryConstants constants;
};

/// Rule for choosing the PCA dimension of a cluster fit.
struct FixedDim {
  int dim;
};
struct EnergyFraction {
  double fraction;  // in (0, 1]
};
using DimRule = std::variant<FixedDim, EnergyFraction>;

/// Draws the union-of-subspaces dataset: Haar-random bases, points uniform
/// on each subspace's unit sphere, i.i.d. Gaussian noise with entry
/// variance sigma^2 / n. Deterministic given config.seed.
Dataset generate(const ModelConfig& config);

/// Rescales every column of Y to unit l2 norm. Labels and clean data are
/// carried through untouched.
DataMatrix normalize_columns(const DataMatrix& data);

/// Cosines of the principal angles (singular values of A^T B, clamped to
/// [0,1]) and the affinity between the two spans.
SubspaceGeometry principal_angles(const Subspace& a, const Subspace& b);

/// Best-fit subspace through the origin: top left singular vectors of the
/// point matrix. The energy rule keeps the smallest d whose partial
/// singular-value sum reaches the requested fraction of the total.
Subspace fit_subspace_pca(const Eigen::MatrixXd& points, const DimRule& rule);

/// Pure report of the affinity / sampling / noise / dimension conditions.
TheoryDiagnostics diagnostics(const Dataset& dataset, const ModelConfig& config,
                              const TheoryConstants& constants = {});

}  // namespace rsc

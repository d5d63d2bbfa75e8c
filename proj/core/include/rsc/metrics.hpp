#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "rsc/regress.hpp"

namespace rsc {

/// Which opportunity count normalizes the false positive rate: the ambient
/// dimension minus the subspace dimension (as reported alongside the
/// discovery counts), or the number of points outside the subspace.
enum class FprNormalization { AmbientMinusDim, PointsOutsideSubspace };

struct ColumnDiscoveries {
  int column = 0;
  int true_count = 0;
  int false_count = 0;
  double tpr = 0.0;  // true_count / d(i)
  double fpr = 0.0;
};

struct DiscoveryReport {
  std::vector<ColumnDiscoveries> columns;
  double mean_tpr = 0.0;
  double mean_fpr = 0.0;
  double threshold = 0.0;
};

/// Counts entries |B_ij| > threshold per column, splitting them into true
/// (same ground-truth label) and false discoveries. `subspace_dims[l]` is
/// the dimension of the subspace carrying label l; `ambient_dim` is n.
/// `columns` restricts the report (empty = all columns of B).
DiscoveryReport discoveries(
    const Eigen::SparseMatrix<double>& B, const std::vector<int>& labels,
    const std::vector<int>& subspace_dims, int ambient_dim,
    double threshold = 1e-3,
    FprNormalization norm = FprNormalization::AmbientMinusDim,
    const std::vector<int>& columns = {});

/// True iff there is no false discovery anywhere in B.
bool subspace_detection_property(const Eigen::SparseMatrix<double>& B,
                                 const std::vector<int>& labels,
                                 double threshold = 1e-3);

struct ClusterErrorReport {
  double error_percent = 0.0;
  std::vector<int> permutation;  // predicted label -> matched true label
  Eigen::MatrixXi confusion;     // rows: predicted, cols: true
};

/// Misclassification percentage under the best one-to-one matching between
/// predicted and true labels (assignment problem solved exactly).
ClusterErrorReport clustering_error(const std::vector<int>& predicted,
                                    const std::vector<int>& truth);

/// Minimum-cost assignment on a (possibly rectangular) cost matrix.
/// Returns row -> column; unassigned rows get -1.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

struct RocPoint {
  double lambda = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
  bool failed = false;
};

/// One aggregate discovery report per grid value. The solver closure maps
/// (grid value) to a coefficient matrix over the sampled columns; failures
/// are flagged and the sweep continues.
std::vector<RocPoint> roc_sweep(
    const std::function<CoefficientMatrix(double)>& solve_at,
    const std::vector<double>& grid, const std::vector<int>& labels,
    const std::vector<int>& subspace_dims, int ambient_dim, double threshold,
    const std::vector<int>& columns = {});

}  // namespace rsc

#include "rsc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace rsc {

DiscoveryReport discoveries(const Eigen::SparseMatrix<double>& B,
                            const std::vector<int>& labels,
                            const std::vector<int>& subspace_dims,
                            int ambient_dim, double threshold,
                            FprNormalization norm,
                            const std::vector<int>& columns) {
  const int n_cols = static_cast<int>(B.cols());
  if (static_cast<int>(labels.size()) != n_cols)
    throw InvalidConfigError("labels do not cover all columns of B");
  for (int l : labels)
    if (l < 0 || l >= static_cast<int>(subspace_dims.size()))
      throw InvalidConfigError("label without a subspace dimension");

  std::vector<int> cluster_sizes(subspace_dims.size(), 0);
  for (int l : labels) cluster_sizes[l]++;

  std::vector<int> cols = columns;
  if (cols.empty()) {
    cols.resize(n_cols);
    for (int i = 0; i < n_cols; ++i) cols[i] = i;
  }

  DiscoveryReport report;
  report.threshold = threshold;
  for (int i : cols) {
    ColumnDiscoveries cd;
    cd.column = i;
    for (Eigen::SparseMatrix<double>::InnerIterator it(B, i); it; ++it) {
      if (it.row() == i) continue;
      if (std::abs(it.value()) <= threshold) continue;
      if (labels[it.row()] == labels[i])
        cd.true_count++;
      else
        cd.false_count++;
    }
    const int d = subspace_dims[labels[i]];
    cd.tpr = double(cd.true_count) / double(d);
    const int denom = norm == FprNormalization::AmbientMinusDim
                          ? ambient_dim - d
                          : n_cols - cluster_sizes[labels[i]];
    cd.fpr = denom > 0 ? double(cd.false_count) / double(denom) : 0.0;
    report.mean_tpr += cd.tpr;
    report.mean_fpr += cd.fpr;
    report.columns.push_back(cd);
  }
  if (!report.columns.empty()) {
    report.mean_tpr /= double(report.columns.size());
    report.mean_fpr /= double(report.columns.size());
  }
  return report;
}

bool subspace_detection_property(const Eigen::SparseMatrix<double>& B,
                                 const std::vector<int>& labels,
                                 double threshold) {
  if (static_cast<int>(labels.size()) != B.cols())
    throw InvalidConfigError("labels do not cover all columns of B");
  for (int i = 0; i < B.outerSize(); ++i)
    for (Eigen::SparseMatrix<double>::InnerIterator it(B, i); it; ++it)
      if (std::abs(it.value()) > threshold && labels[it.row()] != labels[i])
        return false;
  return true;
}

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  // potentials-based shortest augmenting path on a square padded matrix
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  const int n = std::max(rows, cols);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  auto padded = [&](int r, int c) {
    return (r < rows && c < cols) ? cost(r, c) : 0.0;
  };

  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match_col(n + 1, 0);  // 1-based column -> row
  for (int i = 1; i <= n; ++i) {
    match_col[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    std::vector<int> way(n + 1, 0);
    do {
      used[j0] = true;
      int i0 = match_col[j0], j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = padded(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match_col[j0] != 0);
    do {
      int j1 = way[j0];
      match_col[j0] = match_col[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> row_to_col(rows, -1);
  for (int j = 1; j <= n; ++j) {
    int r = match_col[j] - 1;
    if (r >= 0 && r < rows && j - 1 < cols) row_to_col[r] = j - 1;
  }
  return row_to_col;
}

ClusterErrorReport clustering_error(const std::vector<int>& predicted,
                                    const std::vector<int>& truth) {
  if (predicted.size() != truth.size())
    throw InvalidConfigError("label vectors have different lengths");
  const int n = static_cast<int>(predicted.size());
  if (n == 0) throw InvalidConfigError("empty label vectors");

  int pred_count = 0, true_count = 0;
  for (int i = 0; i < n; ++i) {
    if (predicted[i] < 0 || truth[i] < 0)
      throw InvalidConfigError("negative label");
    pred_count = std::max(pred_count, predicted[i] + 1);
    true_count = std::max(true_count, truth[i] + 1);
  }

  ClusterErrorReport report;
  report.confusion = Eigen::MatrixXi::Zero(pred_count, true_count);
  for (int i = 0; i < n; ++i) report.confusion(predicted[i], truth[i])++;

  // maximize agreement == minimize negated confusion
  Eigen::MatrixXd neg = -report.confusion.cast<double>();
  report.permutation = solve_assignment(neg);

  int agree = 0;
  for (int p = 0; p < pred_count; ++p)
    if (report.permutation[p] >= 0) agree += report.confusion(p, report.permutation[p]);
  report.error_percent = 100.0 * double(n - agree) / double(n);
  return report;
}

std::vector<RocPoint> roc_sweep(
    const std::function<CoefficientMatrix(double)>& solve_at,
    const std::vector<double>& grid, const std::vector<int>& labels,
    const std::vector<int>& subspace_dims, int ambient_dim, double threshold,
    const std::vector<int>& columns) {
  if (grid.empty()) throw InvalidConfigError("empty grid");
  std::vector<RocPoint> points;
  for (double value : grid) {
    RocPoint p;
    p.lambda = value;
    try {
      CoefficientMatrix coeffs = solve_at(value);
      DiscoveryReport rep =
          discoveries(coeffs.B, labels, subspace_dims, ambient_dim, threshold,
                      FprNormalization::AmbientMinusDim, columns);
      p.fpr = rep.mean_fpr;
      p.tpr = rep.mean_tpr;
    } catch (const Error&) {
      p.failed = true;
    }
    points.push_back(p);
  }
  return points;
}

}  // namespace rsc

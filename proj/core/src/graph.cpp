#include "rsc/graph.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "rsc/rng.hpp"

namespace rsc {

SimilarityGraph ssc_graph(const Eigen::MatrixXd& B) {
  SimilarityGraph g;
  g.W = B.cwiseAbs() + B.cwiseAbs().transpose();
  g.W.diagonal().setZero();
  return g;
}

SimilarityGraph ssc_graph(const CoefficientMatrix& coeffs) {
  return ssc_graph(Eigen::MatrixXd(coeffs.B));
}

SimilarityGraph knn_graph(const DataMatrix& data, int k, double temperature) {
  const int n = data.num_points();
  if (k < 1 || k >= n) throw InvalidConfigError("knn: need 1 <= K < N");
  if (!(temperature > 0.0))
    throw InvalidConfigError("knn: temperature must be > 0");

  Eigen::MatrixXd dist2(n, n);
  for (int i = 0; i < n; ++i) {
    dist2(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      double d = (data.Y.col(i) - data.Y.col(j)).squaredNorm();
      dist2(i, j) = dist2(j, i) = d;
    }
  }

  std::vector<std::vector<int>> neighbors(n);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (dist2(i, a) != dist2(i, b)) return dist2(i, a) < dist2(i, b);
      return a < b;
    });
    for (int r = 0, kept = 0; r < n && kept < k; ++r) {
      if (order[r] == i) continue;
      neighbors[i].push_back(order[r]);
      ++kept;
    }
  }

  SimilarityGraph g;
  g.W = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j : neighbors[i]) {
      double w = std::exp(-dist2(i, j) / temperature);
      g.W(i, j) = g.W(j, i) = w;  // union symmetrization
    }
  g.W.diagonal().setZero();
  return g;
}

SpectralDecomposition normalized_laplacian(const SimilarityGraph& graph) {
  const int n = graph.size();
  Eigen::VectorXd degree = graph.W.rowwise().sum();
  Eigen::VectorXd dinv_sqrt(n);
  for (int i = 0; i < n; ++i)
    dinv_sqrt(i) = degree(i) > 0.0 ? 1.0 / std::sqrt(degree(i)) : 0.0;

  Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n) -
                        dinv_sqrt.asDiagonal() * graph.W *
                            dinv_sqrt.asDiagonal();
  lap = 0.5 * (lap + lap.transpose());  // kill asymmetry from roundoff

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lap);
  SpectralDecomposition spec;
  spec.eigenvectors = eig.eigenvectors();        // ascending eigenvalues
  spec.eigenvalues = eig.eigenvalues().reverse();  // descending
  return spec;
}

int estimate_num_clusters(const SpectralDecomposition& spec) {
  const int n = static_cast<int>(spec.eigenvalues.size());
  if (n < 2) throw InvalidConfigError("need at least two points");
  int best_i = 0;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n - 1; ++i) {
    double gap = spec.eigenvalues(i) - spec.eigenvalues(i + 1);
    if (gap > best_gap) {  // strict: ties stay at the smallest index
      best_gap = gap;
      best_i = i;
    }
  }
  return n - (best_i + 1);
}

namespace {

double assign_to_centers(const Eigen::MatrixXd& points,
                         const Eigen::MatrixXd& centers,
                         std::vector<int>& labels) {
  const int n = static_cast<int>(points.rows());
  const int k = static_cast<int>(centers.rows());
  double wcss = 0.0;
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double best_d = (points.row(i) - centers.row(0)).squaredNorm();
    for (int c = 1; c < k; ++c) {
      double d = (points.row(i) - centers.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    labels[i] = best;
    wcss += best_d;
  }
  return wcss;
}

}  // namespace

std::vector<int> kmeans(const Eigen::MatrixXd& points, int k,
                        const KMeansOptions& opts) {
  const int n = static_cast<int>(points.rows());
  if (k < 1 || k > n) throw InvalidConfigError("kmeans: need 1 <= k <= N");

  std::vector<int> best_labels(n, 0);
  double best_wcss = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < opts.restarts; ++restart) {
    auto rng = make_engine(derive_seed(opts.seed, restart));
    std::uniform_int_distribution<int> uniform(0, n - 1);

    // k-means++-style seeding
    Eigen::MatrixXd centers(k, points.cols());
    centers.row(0) = points.row(uniform(rng));
    Eigen::VectorXd d2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
      double total = d2.sum();
      int pick;
      if (total <= 0.0) {
        pick = uniform(rng);
      } else {
        std::uniform_real_distribution<double> u(0.0, total);
        double target = u(rng);
        pick = n - 1;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
          acc += d2(i);
          if (acc >= target) {
            pick = i;
            break;
          }
        }
      }
      centers.row(c) = points.row(pick);
      d2 = d2.cwiseMin(
          (points.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }

    std::vector<int> labels(n);
    double wcss = assign_to_centers(points, centers, labels);
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
      // update step
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
      std::vector<int> counts(k, 0);
      for (int i = 0; i < n; ++i) {
        sums.row(labels[i]) += points.row(i);
        counts[labels[i]]++;
      }
      for (int c = 0; c < k; ++c) {
        if (counts[c] > 0) {
          centers.row(c) = sums.row(c) / counts[c];
        } else {
          // empty cluster: re-seed from the farthest point
          int far = 0;
          double far_d = -1.0;
          for (int i = 0; i < n; ++i) {
            double d = (points.row(i) - centers.row(labels[i])).squaredNorm();
            if (d > far_d) {
              far_d = d;
              far = i;
            }
          }
          centers.row(c) = points.row(far);
        }
      }
      double new_wcss = assign_to_centers(points, centers, labels);
      if (new_wcss >= wcss - 1e-12) {
        wcss = new_wcss;
        break;
      }
      wcss = new_wcss;
    }

    if (wcss < best_wcss - 1e-12) {  // ties keep the earlier restart
      best_wcss = wcss;
      best_labels = labels;
    }
  }
  return best_labels;
}

std::vector<int> spectral_cluster(const SimilarityGraph& graph, int num_clusters,
                                  const KMeansOptions& opts) {
  const int n = graph.size();
  if (num_clusters < 1 || num_clusters > n)
    throw InvalidConfigError("spectral_cluster: need 1 <= L <= N");
  if (num_clusters == 1) return std::vector<int>(n, 0);

  SpectralDecomposition spec = normalized_laplacian(graph);
  Eigen::MatrixXd embed = spec.eigenvectors.leftCols(num_clusters);
  for (int i = 0; i < n; ++i) {
    double norm = embed.row(i).norm();
    if (norm > 0.0) embed.row(i) /= norm;
  }
  return kmeans(embed, num_clusters, opts);
}

ClusteringResult denoise(const DataMatrix& data, const std::vector<int>& labels,
                         const DimRule& rule) {
  const int n = data.num_points();
  if (static_cast<int>(labels.size()) != n)
    throw InvalidConfigError("labels do not match the number of points");
  int num_clusters = 0;
  for (int l : labels) {
    if (l < 0) throw InvalidConfigError("negative label");
    num_clusters = std::max(num_clusters, l + 1);
  }

  ClusteringResult result;
  result.labels = labels;
  result.num_clusters = num_clusters;
  result.denoised.resize(data.ambient_dim(), n);

  for (int c = 0; c < num_clusters; ++c) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (labels[i] == c) members.push_back(i);
    if (members.empty())
      throw InvalidConfigError("empty cluster in label vector");

    Eigen::MatrixXd slice(data.ambient_dim(), members.size());
    for (std::size_t k = 0; k < members.size(); ++k)
      slice.col(k) = data.Y.col(members[k]);

    DimRule effective = rule;
    if (const auto* fixed = std::get_if<FixedDim>(&rule)) {
      if (fixed->dim > static_cast<int>(members.size())) {
        effective = FixedDim{static_cast<int>(members.size())};
        result.clamped_clusters.push_back(c);
      }
    }
    Subspace fit = fit_subspace_pca(slice, effective);
    for (int i : members)
      result.denoised.col(i) = fit.basis * (fit.basis.transpose() * data.Y.col(i));
    result.subspaces.push_back(std::move(fit));
  }
  return result;
}

}  // namespace rsc

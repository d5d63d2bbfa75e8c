#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "rsc/model.hpp"
#include "rsc/regress.hpp"

namespace rsc {

/// Symmetric nonnegative weight matrix with zero diagonal.
struct SimilarityGraph {
  Eigen::MatrixXd W;

  int size() const { return static_cast<int>(W.rows()); }
};

/// Eigenvalues of the symmetric normalized Laplacian, descending, with the
/// eigenvectors of the smallest eigenvalues available for embedding.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenvectors;  // column k pairs with the k-th *smallest*
};

struct KMeansOptions {
  int restarts = 20;
  int max_iterations = 300;
  std::uint64_t seed = 0;
};

struct ClusteringResult {
  std::vector<int> labels;
  int num_clusters = 0;
  std::vector<Subspace> subspaces;
  Eigen::MatrixXd denoised;
  std::vector<int> clamped_clusters;  // clusters whose fixed dim was reduced
};

/// W = |B| + |B|^T.
SimilarityGraph ssc_graph(const CoefficientMatrix& coeffs);
SimilarityGraph ssc_graph(const Eigen::MatrixXd& B);

/// Gaussian-kernel weights exp(-||y_i - y_j||^2 / t) on the union-
/// symmetrized K-nearest-neighbor graph.
SimilarityGraph knn_graph(const DataMatrix& data, int k, double temperature);

/// Full spectrum of I - D^{-1/2} W D^{-1/2}; rows and columns of isolated
/// vertices are zeroed (their D^{-1/2} entry is 0).
SpectralDecomposition normalized_laplacian(const SimilarityGraph& graph);

/// Cluster count from the largest consecutive eigengap: N - argmax_i
/// (delta_i - delta_{i+1}), ties toward the smallest index.
int estimate_num_clusters(const SpectralDecomposition& spec);

/// Normalized spectral embedding (bottom-L eigenvectors, unit rows)
/// followed by k-means. Deterministic given the options seed.
std::vector<int> spectral_cluster(const SimilarityGraph& graph, int num_clusters,
                                  const KMeansOptions& opts = {});

/// Per-cluster PCA fit and projection of every column onto its cluster's
/// subspace. A fixed dim larger than a cluster is clamped to the cluster
/// size and the cluster index recorded.
ClusteringResult denoise(const DataMatrix& data, const std::vector<int>& labels,
                         const DimRule& rule);

/// k-means with greedy farthest-point-weighted seeding and restart
/// selection by within-cluster sum of squares (ties to the lowest restart
/// index). Rows of `points` are the observations.
std::vector<int> kmeans(const Eigen::MatrixXd& points, int k,
                        const KMeansOptions& opts = {});

}  // namespace rsc

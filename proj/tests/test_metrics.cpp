#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <random>

#include "rsc/metrics.hpp"

using namespace rsc;

namespace {

Eigen::SparseMatrix<double> sparse_from(const Eigen::MatrixXd& m) {
  return m.sparseView();
}

}  // namespace

TEST_CASE("discovery counting, normalizations, and the threshold") {
  // Two clusters of 3 points; subspace dims 2 and 3; ambient dim 10.
  std::vector<int> labels = {0, 0, 0, 1, 1, 1};
  std::vector<int> dims = {2, 3};
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(6, 6);
  B(1, 0) = 0.5;    // true discovery for column 0
  B(2, 0) = 1e-4;   // below threshold: ignored
  B(4, 0) = -0.3;   // false discovery for column 0
  B(3, 4) = 0.2;    // true discovery for column 4

  DiscoveryReport r = discoveries(sparse_from(B), labels, dims, 10);
  CHECK(r.threshold == 1e-3);
  REQUIRE(r.columns.size() == 6);
  CHECK(r.columns[0].true_count == 1);
  CHECK(r.columns[0].false_count == 1);
  CHECK(r.columns[0].tpr == doctest::Approx(0.5));          // 1 / d(0)=2
  CHECK(r.columns[0].fpr == doctest::Approx(1.0 / 8.0));    // 1 / (10-2)
  CHECK(r.columns[4].tpr == doctest::Approx(1.0 / 3.0));
  CHECK(r.columns[4].fpr == 0.0);

  DiscoveryReport alt =
      discoveries(sparse_from(B), labels, dims, 10, 1e-3,
                  FprNormalization::PointsOutsideSubspace);
  CHECK(alt.columns[0].fpr == doctest::Approx(1.0 / 3.0));  // 1 / (6-3)

  // Column restriction changes only the aggregation set.
  DiscoveryReport sub =
      discoveries(sparse_from(B), labels, dims, 10, 1e-3,
                  FprNormalization::AmbientMinusDim, {0});
  CHECK(sub.columns.size() == 1);
  CHECK(sub.mean_tpr == doctest::Approx(0.5));

  // The diagonal never counts.
  Eigen::MatrixXd D = Eigen::MatrixXd::Identity(6, 6);
  DiscoveryReport none = discoveries(sparse_from(D), labels, dims, 10);
  CHECK(none.mean_tpr == 0.0);
  CHECK(none.mean_fpr == 0.0);
}

TEST_CASE("discoveries are invariant under label relabeling") {
  std::vector<int> labels = {0, 0, 1, 1};
  std::vector<int> swapped = {1, 1, 0, 0};
  std::vector<int> dims = {3, 3};
  Eigen::MatrixXd B = Eigen::MatrixXd::Random(4, 4);
  B.diagonal().setZero();
  DiscoveryReport a = discoveries(sparse_from(B), labels, dims, 12);
  DiscoveryReport b = discoveries(sparse_from(B), swapped, dims, 12);
  CHECK(a.mean_tpr == b.mean_tpr);
  CHECK(a.mean_fpr == b.mean_fpr);
}

TEST_CASE("subspace detection property") {
  std::vector<int> labels = {0, 0, 1, 1};
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(4, 4);
  CHECK(subspace_detection_property(sparse_from(B), labels));  // vacuous
  B(1, 0) = 0.9;
  CHECK(subspace_detection_property(sparse_from(B), labels));
  B(2, 0) = 5e-4;  // below threshold
  CHECK(subspace_detection_property(sparse_from(B), labels));
  B(2, 0) = 0.01;
  CHECK_FALSE(subspace_detection_property(sparse_from(B), labels));
}

TEST_CASE("clustering error: permutation invariance and counting") {
  std::vector<int> truth(200);
  for (int i = 0; i < 200; ++i) truth[i] = i % 4;
  std::vector<int> renamed(200);
  for (int i = 0; i < 200; ++i) renamed[i] = (truth[i] + 1) % 4;
  CHECK(clustering_error(renamed, truth).error_percent == 0.0);

  std::vector<int> flipped = renamed;
  flipped[17] = (flipped[17] + 2) % 4;
  CHECK(clustering_error(flipped, truth).error_percent ==
        doctest::Approx(0.5));

  CHECK_THROWS_AS(clustering_error({0, 1}, {0, 1, 2}), InvalidConfigError);
}

TEST_CASE("clustering error with mismatched label alphabets") {
  // Two predicted clusters against three true ones: the best match keeps
  // the two largest agreements.
  std::vector<int> truth = {0, 0, 1, 1, 2, 2};
  std::vector<int> pred = {0, 0, 1, 1, 1, 1};
  ClusterErrorReport r = clustering_error(pred, truth);
  CHECK(r.error_percent == doctest::Approx(100.0 * 2.0 / 6.0));
}

TEST_CASE("assignment solver matches brute force on random costs") {
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    Eigen::MatrixXd cost(4, 4);
    for (int i = 0; i < 16; ++i) cost(i / 4, i % 4) = u(eng);
    std::vector<int> got = solve_assignment(cost);
    double got_cost = 0.0;
    for (int i = 0; i < 4; ++i) got_cost += cost(i, got[i]);

    std::vector<int> perm = {0, 1, 2, 3};
    double best = 1e100;
    do {
      double c = 0.0;
      for (int i = 0; i < 4; ++i) c += cost(i, perm[i]);
      best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(got_cost == doctest::Approx(best));
  }
}

TEST_CASE("rectangular assignment leaves surplus rows unmatched") {
  Eigen::MatrixXd cost(3, 2);
  cost << 1, 9,
          9, 1,
          5, 5;
  std::vector<int> got = solve_assignment(cost);
  int unmatched = static_cast<int>(std::count(got.begin(), got.end(), -1));
  CHECK(unmatched == 1);
  std::vector<bool> used(2, false);
  for (int c : got)
    if (c >= 0) {
      CHECK_FALSE(used[c]);
      used[c] = true;
    }
}

TEST_CASE("penalty sweep aggregates per grid point and survives failures") {
  std::vector<int> labels = {0, 0, 1, 1};
  std::vector<int> dims = {2, 2};
  auto solve_at = [&](double lambda) {
    if (lambda > 0.9) throw NoSolutionError("synthetic failure");
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(4, 4);
    if (lambda < 0.5) {
      B(1, 0) = 0.4;
      B(0, 1) = 0.4;
    }
    CoefficientMatrix cm;
    cm.B = B.sparseView();
    return cm;
  };
  std::vector<RocPoint> pts =
      roc_sweep(solve_at, {0.1, 0.7, 1.5}, labels, dims, 8, 1e-3);
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].tpr > 0.0);
  CHECK(pts[1].tpr == 0.0);
  CHECK(pts[1].fpr == 0.0);
  CHECK_FALSE(pts[0].failed);
  CHECK(pts[2].failed);

  CHECK_THROWS_AS(roc_sweep(solve_at, {}, labels, dims, 8, 1e-3),
                  InvalidConfigError);
}

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "rsc/model.hpp"

using namespace rsc;

TEST_CASE("num_points rounds ties to even") {
  CHECK(SubspaceSpec{5, 0.5}.num_points() == 2);   // 2.5 -> 2
  CHECK(SubspaceSpec{3, 1.5}.num_points() == 4);   // 4.5 -> 4
  CHECK(SubspaceSpec{6, 1.25}.num_points() == 8);  // 7.5 -> 8
  CHECK(SubspaceSpec{10, 5.0}.num_points() == 50);
  CHECK(SubspaceSpec{4, 0.6}.num_points() == 2);   // 2.4 -> 2
}

TEST_CASE("config validation rejects bad inputs") {
  ModelConfig cfg;
  cfg.ambient_dim = 10;
  cfg.subspaces = {{3, 2.0}};
  cfg.noise_sigma = 0.1;
  CHECK_NOTHROW(cfg.validate());

  ModelConfig bad = cfg;
  bad.subspaces[0].dim = 11;  // exceeds ambient dimension
  CHECK_THROWS_AS(bad.validate(), InvalidConfigError);
  bad = cfg;
  bad.subspaces.clear();
  CHECK_THROWS_AS(bad.validate(), InvalidConfigError);
  bad = cfg;
  bad.noise_sigma = -0.5;
  CHECK_THROWS_AS(bad.validate(), InvalidConfigError);
  bad = cfg;
  bad.subspaces[0].density = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidConfigError);
}

TEST_CASE("generate produces the documented shapes and structure") {
  ModelConfig cfg;
  cfg.ambient_dim = 40;
  cfg.subspaces = {{5, 3.0}, {8, 2.0}};
  cfg.noise_sigma = 0.2;
  cfg.seed = 7;
  Dataset ds = generate(cfg);

  const int N = 15 + 16;
  CHECK(ds.data.Y.rows() == 40);
  CHECK(ds.data.Y.cols() == N);
  REQUIRE(ds.data.clean.has_value());
  REQUIRE(ds.data.labels.has_value());
  CHECK(static_cast<int>(ds.data.labels->size()) == N);
  REQUIRE(ds.subspaces.size() == 2);
  CHECK(ds.subspaces[0].dim() == 5);
  CHECK(ds.subspaces[1].dim() == 8);

  // Orthonormal bases.
  for (const auto& s : ds.subspaces) {
    Eigen::MatrixXd G = s.basis.transpose() * s.basis;
    CHECK((G - Eigen::MatrixXd::Identity(s.dim(), s.dim())).norm() < 1e-10);
  }

  // Clean points live on their labeled subspace with unit norm.
  for (int i = 0; i < N; ++i) {
    const auto& U = ds.subspaces[(*ds.data.labels)[i]].basis;
    Eigen::VectorXd x = ds.data.clean->col(i);
    CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK((x - U * (U.transpose() * x)).norm() < 1e-10);
  }

  // Label counts follow the rounding rule.
  int n0 = 0;
  for (int l : *ds.data.labels)
    if (l == 0) n0++;
  CHECK(n0 == 15);
}

TEST_CASE("generate is deterministic in the seed") {
  ModelConfig cfg;
  cfg.ambient_dim = 20;
  cfg.subspaces = {{4, 2.5}};
  cfg.noise_sigma = 0.3;
  cfg.seed = 42;
  Dataset a = generate(cfg);
  Dataset b = generate(cfg);
  CHECK(a.data.Y == b.data.Y);
  cfg.seed = 43;
  Dataset c = generate(cfg);
  CHECK(a.data.Y != c.data.Y);
}

TEST_CASE("noise has the advertised per-entry scale") {
  ModelConfig cfg;
  cfg.ambient_dim = 200;
  cfg.subspaces = {{5, 60.0}};  // 300 points
  cfg.noise_sigma = 0.5;
  cfg.seed = 11;
  Dataset ds = generate(cfg);
  Eigen::MatrixXd noise = ds.data.Y - *ds.data.clean;
  // E||z||^2 = sigma^2, averaged over 300 columns.
  double mean_sq = noise.colwise().squaredNorm().mean();
  CHECK(mean_sq == doctest::Approx(0.25).epsilon(0.1));
}

TEST_CASE("normalize_columns rescales and flags zero columns") {
  DataMatrix data;
  data.Y.resize(3, 2);
  data.Y << 3, 0, 4, 1, 0, 0;
  DataMatrix out = normalize_columns(data);
  CHECK(out.Y.col(0).norm() == doctest::Approx(1.0));
  CHECK(out.Y(0, 0) == doctest::Approx(0.6));

  data.Y.col(1).setZero();
  try {
    normalize_columns(data);
    FAIL("expected DegenerateInputError");
  } catch (const DegenerateInputError& e) {
    CHECK(e.index() == 1);
  }
}

TEST_CASE("principal angles: orthogonal, nested, and shared-dimension cases") {
  const int n = 12;
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Subspace a{I.leftCols(3)};
  Subspace b{I.middleCols(3, 3)};
  SubspaceGeometry g = principal_angles(a, b);
  CHECK(g.affinity == doctest::Approx(0.0));
  CHECK(g.cos_angles.maxCoeff() == doctest::Approx(0.0));

  SubspaceGeometry same = principal_angles(a, a);
  CHECK(same.affinity == doctest::Approx(1.0));
  CHECK(same.cos_angles.minCoeff() == doctest::Approx(1.0));

  // d-dimensional spans sharing an s-dimensional intersection, orthogonal
  // otherwise: affinity sqrt(s/d).
  const int d = 4, s = 2;
  Subspace u{I.leftCols(d)};
  Eigen::MatrixXd vb(n, d);
  vb.leftCols(s) = I.leftCols(s);
  vb.rightCols(d - s) = I.middleCols(6, d - s);
  SubspaceGeometry shared = principal_angles(u, Subspace{vb});
  CHECK(shared.affinity == doctest::Approx(std::sqrt(double(s) / d)));

  Eigen::MatrixXd skew = I.leftCols(3);
  skew(0, 0) = 2.0;  // not orthonormal
  CHECK_THROWS_AS(principal_angles(Subspace{skew}, b), InvalidBasisError);
}

TEST_CASE("pca fit recovers a plane under both dimension rules") {
  std::mt19937_64 eng(5);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd basis(6, 2);
  for (int i = 0; i < basis.size(); ++i) basis(i / 2, i % 2) = gauss(eng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(6, 2);

  Eigen::MatrixXd coeffs(2, 30);
  for (int i = 0; i < coeffs.size(); ++i) coeffs(i % 2, i / 2) = gauss(eng);
  Eigen::MatrixXd pts = Q * coeffs;

  Subspace fixed = fit_subspace_pca(pts, FixedDim{2});
  CHECK(fixed.dim() == 2);
  CHECK((pts - fixed.basis * (fixed.basis.transpose() * pts)).norm() < 1e-9);

  Subspace energy = fit_subspace_pca(pts, EnergyFraction{0.99});
  CHECK(energy.dim() == 2);
}

TEST_CASE("diagnostics report the stated conditions") {
  ModelConfig cfg;
  cfg.ambient_dim = 60;
  cfg.subspaces = {{4, 5.0}, {4, 5.0}};
  cfg.noise_sigma = 0.1;
  cfg.seed = 3;
  Dataset ds = generate(cfg);
  // Force exactly orthogonal subspaces for a clean affinity check.
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(60, 60);
  ds.subspaces[0].basis = I.leftCols(4);
  ds.subspaces[1].basis = I.middleCols(4, 4);
  TheoryDiagnostics diag = diagnostics(ds, cfg);
  REQUIRE(diag.max_affinity.size() == 2);
  CHECK(diag.max_affinity[0] == doctest::Approx(0.0));
  CHECK(diag.affinity_ok[0]);
  CHECK(diag.sampling_ok[0]);  // rho = 5 >= rho_star
  CHECK(diag.density_cap_ok[0]);  // 5 <= e^2
  CHECK(diag.noise_ok);        // 0.1 < 1
}

#include "rsc/model.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <random>
#include <sstream>

#include "rsc/rng.hpp"

namespace rsc {

int SubspaceSpec::num_points() const {
  // round half to even, so a given (dim, density) always maps to the same N_l
  double x = density * dim;
  double f = std::floor(x);
  double r = x - f;
  int n;
  if (r > 0.5) {
    n = static_cast<int>(f) + 1;
  } else if (r < 0.5) {
    n = static_cast<int>(f);
  } else {
    n = static_cast<int>(f);
    if (n % 2 != 0) ++n;
  }
  return n;
}

int ModelConfig::total_points() const {
  int total = 0;
  for (const auto& s : subspaces) total += s.num_points();
  return total;
}

void ModelConfig::validate() const {
  if (ambient_dim < 1) throw InvalidConfigError("ambient_dim must be >= 1");
  if (subspaces.empty()) throw InvalidConfigError("no subspaces specified");
  if (noise_sigma < 0.0) throw InvalidConfigError("noise_sigma must be >= 0");
  for (std::size_t l = 0; l < subspaces.size(); ++l) {
    const auto& s = subspaces[l];
    std::ostringstream where;
    where << "subspace " << l << ": ";
    if (s.dim < 1) throw InvalidConfigError(where.str() + "dim must be >= 1");
    if (s.dim > ambient_dim)
      throw InvalidConfigError(where.str() + "dim exceeds ambient_dim");
    if (s.density < 1.0)
      throw InvalidConfigError(where.str() + "density must be >= 1");
    if (s.num_points() < s.dim)
      throw InvalidConfigError(where.str() + "fewer points than dimensions");
  }
}

namespace {

Eigen::MatrixXd gaussian_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

}  // namespace

Dataset generate(const ModelConfig& config) {
  config.validate();
  const int n = config.ambient_dim;
  const int total = config.total_points();
  auto rng = make_engine(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Dataset out;
  out.data.Y.resize(n, total);
  Eigen::MatrixXd clean(n, total);
  std::vector<int> labels(total);

  int col = 0;
  for (std::size_t l = 0; l < config.subspaces.size(); ++l) {
    const auto& spec = config.subspaces[l];
    // Haar basis: thin Q of a Gaussian matrix
    Eigen::MatrixXd g = gaussian_matrix(n, spec.dim, rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd basis =
        qr.householderQ() * Eigen::MatrixXd::Identity(n, spec.dim);
    out.subspaces.push_back(Subspace{basis});

    const int nl = spec.num_points();
    for (int k = 0; k < nl; ++k) {
      Eigen::VectorXd w(spec.dim);
      do {
        for (int i = 0; i < spec.dim; ++i) w(i) = normal(rng);
      } while (w.norm() == 0.0);
      w /= w.norm();
      clean.col(col) = basis * w;
      labels[col] = static_cast<int>(l);
      ++col;
    }
  }

  if (config.noise_sigma > 0.0) {
    const double entry_sd = config.noise_sigma / std::sqrt(double(n));
    for (int j = 0; j < total; ++j)
      for (int i = 0; i < n; ++i)
        out.data.Y(i, j) = clean(i, j) + entry_sd * normal(rng);
  } else {
    out.data.Y = clean;
  }
  out.data.clean = std::move(clean);
  out.data.labels = std::move(labels);
  return out;
}

DataMatrix normalize_columns(const DataMatrix& data) {
  DataMatrix out = data;
  for (int j = 0; j < out.num_points(); ++j) {
    double norm = out.Y.col(j).norm();
    if (norm == 0.0) {
      std::ostringstream msg;
      msg << "cannot normalize zero column " << j;
      throw DegenerateInputError(msg.str(), j);
    }
    out.Y.col(j) /= norm;
  }
  return out;
}

namespace {

void check_orthonormal(const Subspace& s, const char* name) {
  Eigen::MatrixXd gram = s.basis.transpose() * s.basis;
  double dev = (gram - Eigen::MatrixXd::Identity(s.dim(), s.dim()))
                   .cwiseAbs()
                   .maxCoeff();
  if (dev > 1e-8) {
    std::ostringstream msg;
    msg << name << " basis is not orthonormal (deviation " << dev << ")";
    throw InvalidBasisError(msg.str());
  }
}

}  // namespace

SubspaceGeometry principal_angles(const Subspace& a, const Subspace& b) {
  check_orthonormal(a, "first");
  check_orthonormal(b, "second");
  Eigen::MatrixXd prod = a.basis.transpose() * b.basis;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(prod);
  SubspaceGeometry geom;
  geom.cos_angles = svd.singularValues().cwiseMin(1.0).cwiseMax(0.0);
  const int k = static_cast<int>(geom.cos_angles.size());
  geom.affinity = std::sqrt(geom.cos_angles.squaredNorm() / double(k));
  return geom;
}

Subspace fit_subspace_pca(const Eigen::MatrixXd& points, const DimRule& rule) {
  if (points.cols() == 0)
    throw DegenerateInputError("cannot fit a subspace to an empty point set");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(points, Eigen::ComputeThinU);
  const Eigen::VectorXd& sv = svd.singularValues();
  const int max_d = static_cast<int>(sv.size());

  int d;
  if (const auto* fixed = std::get_if<FixedDim>(&rule)) {
    if (fixed->dim < 1) throw InvalidConfigError("fixed dim must be >= 1");
    d = std::min(fixed->dim, max_d);
  } else {
    double e = std::get<EnergyFraction>(rule).fraction;
    if (!(e > 0.0 && e <= 1.0))
      throw InvalidConfigError("energy fraction must be in (0, 1]");
    double total = sv.sum();
    double partial = 0.0;
    d = max_d;
    for (int i = 0; i < max_d; ++i) {
      partial += sv(i);
      if (partial >= e * total) {
        d = i + 1;
        break;
      }
    }
  }
  return Subspace{svd.matrixU().leftCols(d)};
}

TheoryDiagnostics diagnostics(const Dataset& dataset, const ModelConfig& config,
                              const TheoryConstants& constants) {
  const std::size_t count = dataset.subspaces.size();
  const int big_n = dataset.data.num_points();
  const double log_n = std::log(double(big_n));

  TheoryDiagnostics report;
  report.constants = constants;
  report.affinity_bound = constants.kappa0 / log_n;
  report.max_affinity.assign(count, 0.0);
  for (std::size_t l = 0; l < count; ++l)
    for (std::size_t k = 0; k < count; ++k) {
      if (k == l) continue;
      double aff =
          principal_angles(dataset.subspaces[l], dataset.subspaces[k]).affinity;
      report.max_affinity[l] = std::max(report.max_affinity[l], aff);
    }
  for (std::size_t l = 0; l < count; ++l)
    report.affinity_ok.push_back(report.max_affinity[l] <=
                                 report.affinity_bound);

  int max_dim = 0;
  for (std::size_t l = 0; l < count; ++l) {
    const auto& spec = config.subspaces[l];
    double rho = double(spec.num_points()) / double(spec.dim);
    report.sampling_ok.push_back(rho >= constants.rho_star);
    report.density_cap_ok.push_back(rho <= std::exp(double(spec.dim) / 2.0));
    max_dim = std::max(max_dim, spec.dim);
  }
  report.noise_ok = config.noise_sigma < constants.sigma_star;
  report.dim_ok =
      max_dim < constants.c0 * double(config.ambient_dim) / (log_n * log_n);
  return report;
}

}  // namespace rsc

#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <optional>
#include <string>
#include <vector>

#include "rsc/errors.hpp"

namespace rsc {

struct SolverOptions {
  double tolerance = 1e-6;      // KKT / feasibility residual target
  int max_iterations = 200000;  // per l1-penalized solve
};

/// Solution of one column regression. `excluded` is the index pinned to
/// zero (-1 when no column was excluded).
struct SparseCoefficients {
  Eigen::VectorXd values;
  int excluded = -1;
  double lambda_used = 0.0;
  double step1_value = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
};

struct ColumnMeta {
  int column = -1;
  double lambda_used = 0.0;
  double step1_value = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  bool failed = false;
  std::string error;
};

/// N x N matrix whose column i holds the regression coefficients for point
/// i; the diagonal is identically zero.
struct CoefficientMatrix {
  Eigen::SparseMatrix<double> B;
  std::vector<ColumnMeta> meta;

  int num_failures() const;
};

/// l1-penalized least squares
///   min 1/2 ||y - Y beta||^2 + lambda ||beta||_1  s.t.  beta_exclude = 0,
/// solved by accelerated proximal gradient with adaptive restart. Throws
/// IterationLimitError if the KKT residual does not reach opts.tolerance.
SparseCoefficients solve_lasso(const Eigen::VectorXd& y,
                               const Eigen::MatrixXd& Y, int exclude,
                               double lambda, const SolverOptions& opts = {},
                               const Eigen::VectorXd* warm_start = nullptr);

/// min ||beta||_1  s.t.  ||y - Y beta||_2 <= tau, beta_exclude = 0.
/// Solved by root-finding on lambda along the penalized path; the residual
/// norm is nondecreasing in lambda. Throws InfeasibleError when even the
/// vanishing-penalty solution cannot reach the target residual.
SparseCoefficients solve_l1_residual_constrained(const Eigen::VectorXd& y,
                                                 const Eigen::MatrixXd& Y,
                                                 int exclude, double tau,
                                                 const SolverOptions& opts = {});

/// Noiseless variant: min ||beta||_1 s.t. y = Y beta, beta_exclude = 0,
/// run as the residual-constrained problem at tau = 1e-8 ||y||.
SparseCoefficients solve_l1_equality(const Eigen::VectorXd& y,
                                     const Eigen::MatrixXd& Y, int exclude,
                                     const SolverOptions& opts = {});

/// Data-driven two-stage solve: residual-constrained step at tau = 2 sigma,
/// penalty lambda = alpha0 / ||beta*||_1, then the penalized solve.
SparseCoefficients two_step(const Eigen::VectorXd& y, const Eigen::MatrixXd& Y,
                            int exclude, double sigma, double alpha0,
                            const SolverOptions& opts = {});

/// Default calibration coefficient for the two-step rule f(t) = alpha0 / t.
double default_alpha0(double sigma);

/// min ||beta||_1 s.t. ||Y_(-i)^T (y - Y beta) + sigma^2 beta_(-i)||_inf
/// <= lambda, beta_i = 0; reduced to a linear program.
SparseCoefficients corrected_dantzig(const Eigen::VectorXd& y,
                                     const Eigen::MatrixXd& Y, int exclude,
                                     double sigma, double lambda);

/// sqrt(2/n) * sigma * sqrt(1 + sigma^2).
double dantzig_lambda_heuristic(int n, double sigma);

/// Mean-zero constraint slack of the corrected selector and its variance
/// decomposition into the four independent terms.
struct DantzigNoiseStats {
  double sigma = 0.0;
  int ambient_dim = 0;
  double beta_norm = 0.0;
  double beta_j = 0.0;
  double var_i1 = 0.0, var_i2 = 0.0, var_i3 = 0.0, var_i4 = 0.0;
  double variance = 0.0;
};
DantzigNoiseStats xi_variance(double sigma, int n, const Eigen::VectorXd& beta,
                              int j);

enum class RegressionMethod { Lasso, TwoStep, Dantzig };

struct RegressSpec {
  RegressionMethod method = RegressionMethod::Lasso;
  double lambda = 0.0;   // Lasso / Dantzig penalty (fixed mode)
  double sigma = 0.0;    // TwoStep / Dantzig noise level
  double alpha0 = 0.0;   // TwoStep rule; <= 0 selects default_alpha0(sigma)
  SolverOptions solver;
};

/// Runs the configured solver over the requested columns (all when the
/// subset is empty) and assembles the coefficient matrix. Columns are
/// independent; with `workers` > 1 they run in parallel and the result does
/// not depend on the worker count. When `per_column_lambda` is nonempty it
/// overrides spec.lambda per column. Per-column failures are recorded in
/// the metadata, keeping partial results.
CoefficientMatrix regress_all(const Eigen::MatrixXd& Y, const RegressSpec& spec,
                              const std::vector<int>& columns = {},
                              int workers = 1,
                              const std::vector<double>& per_column_lambda = {});

/// 1/2 ||y - Y beta||^2 + lambda ||beta||_1, for tests and diagnostics.
double lasso_objective(const Eigen::VectorXd& y, const Eigen::MatrixXd& Y,
                       const Eigen::VectorXd& beta, double lambda);

/// max_j |Y_j^T (y - Y beta) - lambda sign(beta_j)| on the support, and
/// max(|Y_j^T r| - lambda, 0) off it; columns at `exclude` are skipped.
double lasso_kkt_residual(const Eigen::VectorXd& y, const Eigen::MatrixXd& Y,
                          const Eigen::VectorXd& beta, double lambda,
                          int exclude);

}  // namespace rsc

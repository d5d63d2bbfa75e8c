#include "rsc/regress.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

#include "rsc/asymptotics.hpp"
#include "rsc/lp.hpp"

namespace rsc {

namespace {

double operator_norm_sq(const Eigen::MatrixXd& Y) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(Y.cols()).normalized();
  double norm = 0.0;
  for (int k = 0; k < 60; ++k) {
    Eigen::VectorXd w = Y.transpose() * (Y * v);
    norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
  }
  return norm;
}

void soft_threshold_inplace(Eigen::VectorXd& v, double theta) {
  for (int i = 0; i < v.size(); ++i) v(i) = soft_threshold(v(i), theta);
}

struct LassoFit {
  Eigen::VectorXd beta;
  int iterations = 0;
  double kkt = std::numeric_limits<double>::infinity();
  bool converged = false;
};

// Once the support has settled, the minimizer restricted to it solves a
// linear system: beta_S = (Y_S^T Y_S)^{-1} (Y_S^T y - lambda s). Solving it
// and re-checking the full certificate turns a coarse iterate into an
// essentially exact one.
bool polish_on_support(const Eigen::VectorXd& y, const Eigen::MatrixXd& Y,
                       int exclude, double lambda, double tol,
                       Eigen::VectorXd& beta) {
  std::vector<int> support;
  for (int j = 0; j < beta.size(); ++j)
    if (beta(j) != 0.0 && j != exclude) support.push_back(j);
  const int s = static_cast<int>(support.size());
  if (s == 0 || s > std::min<int>(static_cast<int>(Y.rows()) + 8, 4000))
    return false;

  Eigen::MatrixXd sub(Y.rows(), s);
  Eigen::VectorXd signs(s);
  for (int k = 0; k < s; ++k) {
    sub.col(k) = Y.col(support[k]);
    signs(k) = beta(support[k]) > 0.0 ? 1.0 : -1.0;
  }
  Eigen::MatrixXd gram = sub.transpose() * sub;
  Eigen::VectorXd rhs = sub.transpose() * y - lambda * signs;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success) return false;
  Eigen::VectorXd sol = ldlt.solve(rhs);
  for (int k = 0; k < s; ++k)
    if (sol(k) * signs(k) < 0.0) return false;  // sign pattern broke

  Eigen::VectorXd candidate = Eigen::VectorXd::Zero(beta.size());
  for (int k = 0; k < s; ++k) candidate(support[k]) = sol(k);
  if (lasso_kkt_residual(y, Y, candidate, lambda, exclude) > tol) return false;
  beta = std::move(candidate);
  return true;
}

LassoFit fista(const Eigen::VectorXd& y, const Eigen::MatrixXd& Y, int exclude,
               double lambda, const SolverOptions& opts,
               const Eigen::VectorXd* warm_start) {
  const int big_n = static_cast<int>(Y.cols());
  LassoFit fit;
  fit.beta = warm_start ? *warm_start : Eigen::VectorXd::Zero(big_n);
  if (exclude >= 0) fit.beta(exclude) = 0.0;

  double lip = std::max(operator_norm_sq(Y) * 1.01, 1e-12);
  double step = 1.0 / lip;

  Eigen::VectorXd x = fit.beta;   // current iterate
  Eigen::VectorXd z = fit.beta;   // extrapolated point
  double t = 1.0;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    Eigen::VectorXd rz = Y * z - y;
    double fz = 0.5 * rz.squaredNorm();
    Eigen::VectorXd grad = Y.transpose() * rz;
    if (exclude >= 0) grad(exclude) = 0.0;

    Eigen::VectorXd x_new;
    double fx_new;
    for (;;) {  // backtracking on the quadratic model
      x_new = z - step * grad;
      soft_threshold_inplace(x_new, step * lambda);
      if (exclude >= 0) x_new(exclude) = 0.0;
      Eigen::VectorXd diff = x_new - z;
      fx_new = 0.5 * (Y * x_new - y).squaredNorm();
      double model = fz + grad.dot(diff) + 0.5 / step * diff.squaredNorm();
      if (fx_new <= model + 1e-12) break;
      step *= 0.5;
    }

    // gradient-based adaptive restart
    if ((z - x_new).dot(x_new - x) > 0.0) {
      t = 1.0;
      z = x_new;
    } else {
      double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      z = x_new + ((t - 1.0) / t_new) * (x_new - x);
      t = t_new;
    }
    x = x_new;
    fit.iterations = iter + 1;

    if (iter % 10 == 9 || iter + 1 == opts.max_iterations) {
      fit.kkt = lasso_kkt_residual(y, Y, x, lambda, exclude);
      if (fit.kkt <= opts.tolerance) {
        fit.converged = true;
        break;
      }
      if (fit.kkt <= std::max(1e-3, 100.0 * opts.tolerance) &&
          polish_on_support(y, Y, exclude, lambda,
                            0.5 * opts.tolerance, x)) {
        fit.kkt = lasso_kkt_residual(y, Y, x, lambda, exclude);
        fit.converged = true;
        break;
      }
    }
  }
  fit.beta = x;
  return fit;
}

}  // namespace

double lasso_objective(const Eigen::VectorXd& y, const Eigen::MatrixXd& Y,
                       const Eigen::VectorXd& beta, double lambda) {
  return 0.5 * (y - Y * beta).squaredNorm() + lambda * beta.lpNorm<1>();
}

double lasso_kkt_residual(const Eigen::VectorXd& y, const Eigen::MatrixXd& Y,
                          const Eigen::VectorXd& beta, double lambda,
                          int exclude) {
  Eigen::VectorXd g = Y.transpose() * (y - Y * beta);
  double res = 0.0;
  for (int j = 0; j < g.size(); ++j) {
    if (j == exclude) continue;
    if (beta(j) != 0.0)
      res = std::max(res, std::abs(g(j) - lambda * (beta(j) > 0 ? 1.0 : -1.0)));
    else
      res = std::max(res, std::max(std::abs(g(j)) - lambda, 0.0));
  }
  return res;
}

SparseCoefficients solve_lasso(const Eigen::VectorXd& y,
                               const Eigen::MatrixXd& Y, int exclude,
                               double lambda, const SolverOptions& opts,
                               const Eigen::VectorXd* warm_start) {
  if (!(lambda > 0.0)) throw InvalidConfigError("lasso lambda must be > 0");
  LassoFit fit = fista(y, Y, exclude, lambda, opts, warm_start);
  if (!fit.converged) {
    std::ostringstream msg;
    msg << "lasso did not converge in " << opts.max_iterations
        << " iterations (KKT residual " << fit.kkt << ")";
    throw IterationLimitError(msg.str(), fit.beta, fit.kkt);
  }
  SparseCoefficients out;
  out.values = std::move(fit.beta);
  out.excluded = exclude;
  out.lambda_used = lambda;
  out.iterations = fit.iterations;
  return out;
}

SparseCoefficients solve_l1_residual_constrained(const Eigen::VectorXd& y,
                                                 const Eigen::MatrixXd& Y,
                                                 int exclude, double tau,
                                                 const SolverOptions& opts) {
  if (tau < 0.0) throw InvalidConfigError("tau must be >= 0");
  const int big_n = static_cast<int>(Y.cols());
  SparseCoefficients out;
  out.excluded = exclude;

  const double norm_y = y.norm();
  if (norm_y <= tau) {  // zero is feasible, hence optimal
    out.values = Eigen::VectorXd::Zero(big_n);
    return out;
  }
  const double tol_tau = std::max(1e-6, 1e-3 * tau);

  Eigen::VectorXd corr = Y.transpose() * y;
  if (exclude >= 0) corr(exclude) = 0.0;
  const double lam_max = corr.cwiseAbs().maxCoeff();
  if (lam_max == 0.0)
    throw InfeasibleError("dictionary is orthogonal to the target", norm_y);
  double lam_min = 1e-8 * lam_max;

  Eigen::VectorXd warm = Eigen::VectorXd::Zero(big_n);
  auto eval = [&](double lam) {
    LassoFit fit = fista(y, Y, exclude, lam, opts, &warm);
    warm = fit.beta;
    return fit;
  };

  // Walk the penalty down geometrically with warm starts. The warm-started
  // descent tracks the sparse solution path, so even a near-zero target
  // residual (the equality limit) ends at the minimum-l1 interpolator
  // rather than at an arbitrary one. Stop as soon as the target is reached.
  LassoFit fit;
  double resid = norm_y;
  double hi = lam_max;     // resid(hi) = ||y|| > tau
  double lo = -1.0;        // first penalty that meets the target
  for (double lam = 0.3 * lam_max;; lam *= 0.3) {
    const bool at_floor = lam <= lam_min;
    if (at_floor) lam = lam_min;
    fit = eval(lam);
    resid = (y - Y * fit.beta).norm();
    if (resid <= tau + tol_tau) {
      lo = lam;
      break;
    }
    hi = lam;
    if (at_floor) break;
  }
  // A tiny tau can still sit below the residual floor of the default
  // penalty bracket; push the floor down before giving up. The residual of
  // an unreachable target stalls at a positive value no matter how small
  // the penalty, so a few shrinks settle the question.
  for (int shrink = 0; shrink < 3 && lo < 0.0; ++shrink) {
    lam_min *= 1e-2;
    fit = eval(lam_min);
    resid = (y - Y * fit.beta).norm();
    if (resid <= tau + tol_tau) lo = lam_min;
  }
  if (lo < 0.0) {
    std::ostringstream msg;
    msg << "target residual " << tau << " unreachable; minimum achievable is "
        << resid;
    throw InfeasibleError(msg.str(), resid);
  }

  // Largest penalty inside the band has the smallest l1 norm; refine by
  // bisection on the log scale, keeping the best feasible fit seen.
  LassoFit best = fit;
  double best_lam = lo;
  for (int it = 0; it < 80 && std::abs(resid - tau) > tol_tau; ++it) {
    if (hi / lo < 1.0 + 1e-12) break;
    double lam = std::sqrt(lo * hi);
    fit = eval(lam);
    resid = (y - Y * fit.beta).norm();
    if (resid > tau + tol_tau) {
      hi = lam;
    } else {
      lo = lam;
      if (lam >= best_lam) {
        best = fit;
        best_lam = lam;
      }
    }
  }

  out.values = std::move(best.beta);
  out.lambda_used = best_lam;
  out.iterations = best.iterations;
  return out;
}

SparseCoefficients solve_l1_equality(const Eigen::VectorXd& y,
                                     const Eigen::MatrixXd& Y, int exclude,
                                     const SolverOptions& opts) {
  double tau = 1e-8 * y.norm();
  try {
    return solve_l1_residual_constrained(y, Y, exclude, tau, opts);
  } catch (const InfeasibleError& e) {
    std::ostringstream msg;
    msg << "target is not in the span of the dictionary (residual "
        << e.min_residual() << ")";
    throw InfeasibleError(msg.str(), e.min_residual());
  }
}

double default_alpha0(double sigma) { return std::max(0.25, 0.708 * sigma); }

SparseCoefficients two_step(const Eigen::VectorXd& y, const Eigen::MatrixXd& Y,
                            int exclude, double sigma, double alpha0,
                            const SolverOptions& opts) {
  if (!(sigma > 0.0)) throw InvalidConfigError("two_step requires sigma > 0");
  if (!(alpha0 > 0.0)) throw InvalidConfigError("two_step requires alpha0 > 0");

  SparseCoefficients step1 =
      solve_l1_residual_constrained(y, Y, exclude, 2.0 * sigma, opts);
  double value = step1.values.lpNorm<1>();
  if (value == 0.0)
    throw DegenerateStep1Error(
        "first stage returned zero; penalty rule is undefined");

  double lambda = alpha0 / value;
  SparseCoefficients out =
      solve_lasso(y, Y, exclude, lambda, opts, &step1.values);
  out.step1_value = value;
  return out;
}

double dantzig_lambda_heuristic(int n, double sigma) {
  if (n < 1) throw InvalidConfigError("n must be >= 1");
  if (sigma < 0.0) throw InvalidConfigError("sigma must be >= 0");
  return std::sqrt(2.0 / double(n)) * sigma * std::sqrt(1.0 + sigma * sigma);
}

SparseCoefficients corrected_dantzig(const Eigen::VectorXd& y,
                                     const Eigen::MatrixXd& Y, int exclude,
                                     double sigma, double lambda) {
  if (!(lambda > 0.0)) throw InvalidConfigError("dantzig lambda must be > 0");
  const int big_n = static_cast<int>(Y.cols());
  SparseCoefficients out;
  out.excluded = exclude;
  out.lambda_used = lambda;
  out.values = Eigen::VectorXd::Zero(big_n);

  std::vector<int> idx;
  idx.reserve(big_n);
  for (int j = 0; j < big_n; ++j)
    if (j != exclude) idx.push_back(j);
  const int m = static_cast<int>(idx.size());

  Eigen::MatrixXd dict(Y.rows(), m);
  for (int k = 0; k < m; ++k) dict.col(k) = Y.col(idx[k]);

  Eigen::VectorXd c = dict.transpose() * y;
  if (c.cwiseAbs().maxCoeff() <= lambda) return out;  // zero is feasible

  Eigen::MatrixXd gram = dict.transpose() * dict;
  gram.diagonal().array() -= sigma * sigma;  // G = D^T D - sigma^2 I

  // variables x = (u; v), beta = u - v; |c - G(u - v)|_inf <= lambda:
  //   -G u + G v <= lambda - c,   G u - G v <= lambda + c
  Eigen::MatrixXd A(2 * m, 2 * m);
  A.topLeftCorner(m, m) = -gram;
  A.topRightCorner(m, m) = gram;
  A.bottomLeftCorner(m, m) = gram;
  A.bottomRightCorner(m, m) = -gram;
  Eigen::VectorXd b(2 * m);
  b.head(m) = Eigen::VectorXd::Constant(m, lambda) - c;
  b.tail(m) = Eigen::VectorXd::Constant(m, lambda) + c;

  LpSolution sol = solve_lp(Eigen::VectorXd::Ones(2 * m), A, b);
  if (sol.status != LpStatus::Optimal)
    throw InfeasibleError("dantzig linear program failed numerically",
                          std::numeric_limits<double>::quiet_NaN());

  for (int k = 0; k < m; ++k) out.values(idx[k]) = sol.x(k) - sol.x(m + k);
  return out;
}

DantzigNoiseStats xi_variance(double sigma, int n, const Eigen::VectorXd& beta,
                              int j) {
  if (j < 0 || j >= beta.size())
    throw InvalidConfigError("xi_variance: index out of range");
  DantzigNoiseStats s;
  s.sigma = sigma;
  s.ambient_dim = n;
  s.beta_norm = beta.norm();
  s.beta_j = beta(j);
  const double s2 = sigma * sigma, s4 = s2 * s2;
  const double nsq = s.beta_norm * s.beta_norm;
  const double bj2 = s.beta_j * s.beta_j;
  s.var_i1 = s2 / n * (1.0 + nsq);
  s.var_i2 = s4 / n;
  s.var_i3 = s4 / n * 2.0 * bj2;
  s.var_i4 = s4 / n * (nsq - bj2);
  s.variance = s.var_i1 + s.var_i2 + s.var_i3 + s.var_i4;
  return s;
}

int CoefficientMatrix::num_failures() const {
  int count = 0;
  for (const auto& m : meta)
    if (m.failed) ++count;
  return count;
}

CoefficientMatrix regress_all(const Eigen::MatrixXd& Y, const RegressSpec& spec,
                              const std::vector<int>& columns, int workers,
                              const std::vector<double>& per_column_lambda) {
  const int big_n = static_cast<int>(Y.cols());
  std::vector<int> cols = columns;
  if (cols.empty()) {
    cols.resize(big_n);
    for (int i = 0; i < big_n; ++i) cols[i] = i;
  }
  if (!per_column_lambda.empty() && per_column_lambda.size() != cols.size())
    throw InvalidConfigError(
        "per_column_lambda must match the selected column count");

  std::vector<SparseCoefficients> results(cols.size());
  std::vector<ColumnMeta> meta(cols.size());

  auto solve_one = [&](std::size_t k) {
    int i = cols[k];
    meta[k].column = i;
    double lam = per_column_lambda.empty() ? spec.lambda : per_column_lambda[k];
    Eigen::VectorXd y = Y.col(i);
    SparseCoefficients r;
    try {
      switch (spec.method) {
        case RegressionMethod::Lasso:
          r = solve_lasso(y, Y, i, lam, spec.solver);
          break;
        case RegressionMethod::TwoStep: {
          double a0 = spec.alpha0 > 0.0 ? spec.alpha0
                                        : default_alpha0(spec.sigma);
          r = two_step(y, Y, i, spec.sigma, a0, spec.solver);
          break;
        }
        case RegressionMethod::Dantzig:
          r = corrected_dantzig(y, Y, i, spec.sigma, lam);
          break;
      }
      meta[k].lambda_used = r.lambda_used;
      meta[k].step1_value = r.step1_value;
      meta[k].iterations = r.iterations;
      results[k] = std::move(r);
    } catch (const Error& e) {
      meta[k].failed = true;
      meta[k].error = e.what();
      results[k].values = Eigen::VectorXd::Zero(big_n);
      results[k].excluded = i;
    }
  };

  if (workers <= 1) {
    for (std::size_t k = 0; k < cols.size(); ++k) solve_one(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (;;) {
          std::size_t k = next.fetch_add(1);
          if (k >= cols.size()) return;
          solve_one(k);
        }
      });
    for (auto& t : pool) t.join();
  }

  CoefficientMatrix out;
  out.meta = std::move(meta);
  out.B.resize(big_n, big_n);
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const auto& v = results[k].values;
    for (int j = 0; j < v.size(); ++j)
      if (v(j) != 0.0 && j != cols[k]) triplets.emplace_back(j, cols[k], v(j));
  }
  out.B.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace rsc

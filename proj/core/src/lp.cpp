#include "rsc/lp.hpp"

#include <cmath>
#include <vector>

namespace rsc {

namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kFeasEps = 1e-7;

struct Tableau {
  Eigen::MatrixXd t;        // (m + 1) x (ncols); last row = reduced costs
  std::vector<int> basis;   // basic column per row
  int m, n_struct, n_slack, n_art;

  int rhs_col() const { return n_struct + n_slack + n_art; }
  int first_art() const { return n_struct + n_slack; }

  void pivot(int row, int col) {
    t.row(row) /= t(row, col);
    for (int i = 0; i <= m; ++i) {
      if (i == row) continue;
      double factor = t(i, col);
      if (factor != 0.0) t.row(i) -= factor * t.row(row);
    }
    basis[row] = col;
  }

  // Returns true on optimal, false on unbounded. `allow_art` admits
  // artificial columns as entering candidates (phase 1 only).
  bool run(bool allow_art) {
    const int ncols = rhs_col();
    const int cap = 200 * (m + n_struct) + 2000;
    int stalled = 0;
    double last_obj = t(m, rhs_col());
    for (int iter = 0; iter < cap; ++iter) {
      bool bland = stalled > 2 * (m + n_struct);
      int enter = -1;
      double best = kPivotEps;
      for (int j = 0; j < ncols; ++j) {
        if (!allow_art && j >= first_art()) break;
        if (t(m, j) > best) {
          enter = j;
          if (bland) break;
          best = t(m, j);
        }
      }
      if (enter < 0) return true;

      int leave = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m; ++i) {
        if (t(i, enter) > kPivotEps) {
          double ratio = t(i, rhs_col()) / t(i, enter);
          if (leave < 0 || ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 && basis[i] < basis[leave])) {
            leave = i;
            best_ratio = ratio;
          }
        }
      }
      if (leave < 0) return false;  // unbounded

      pivot(leave, enter);
      double obj = t(m, rhs_col());
      stalled = (obj < last_obj - 1e-12) ? 0 : stalled + 1;
      last_obj = obj;
    }
    return true;  // iteration cap; treat current point as answer
  }
};

}  // namespace

LpSolution solve_lp(const Eigen::VectorXd& cost, const Eigen::MatrixXd& A,
                    const Eigen::VectorXd& b) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());

  Tableau tab;
  tab.m = m;
  tab.n_struct = n;
  tab.n_slack = m;
  tab.n_art = 0;
  for (int i = 0; i < m; ++i)
    if (b(i) < 0.0) ++tab.n_art;

  const int ncols = n + m + tab.n_art + 1;
  tab.t = Eigen::MatrixXd::Zero(m + 1, ncols);
  tab.basis.resize(m);

  int art = tab.first_art();
  for (int i = 0; i < m; ++i) {
    double sign = b(i) >= 0.0 ? 1.0 : -1.0;
    tab.t.row(i).head(n) = sign * A.row(i);
    tab.t(i, n + i) = sign;
    tab.t(i, tab.rhs_col()) = sign * b(i);
    if (sign < 0.0) {
      tab.t(i, art) = 1.0;
      tab.basis[i] = art++;
    } else {
      tab.basis[i] = n + i;
    }
  }

  LpSolution sol;

  if (tab.n_art > 0) {
    // phase 1: minimize the artificial sum
    for (int i = 0; i < m; ++i)
      if (tab.basis[i] >= tab.first_art()) tab.t.row(m) += tab.t.row(i);
    for (int j = tab.first_art(); j < tab.rhs_col(); ++j) tab.t(m, j) -= 1.0;

    tab.run(true);
    if (tab.t(m, tab.rhs_col()) > kFeasEps) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // drive any zero-level artificial out of the basis where possible
    for (int i = 0; i < m; ++i) {
      if (tab.basis[i] < tab.first_art()) continue;
      for (int j = 0; j < tab.first_art(); ++j) {
        if (std::abs(tab.t(i, j)) > kPivotEps) {
          tab.pivot(i, j);
          break;
        }
      }
    }
  }

  // phase 2 objective row: z_j - c_j
  tab.t.row(m).setZero();
  tab.t.row(m).head(n) = -cost.transpose();
  for (int i = 0; i < m; ++i) {
    int bj = tab.basis[i];
    if (bj < n && cost(bj) != 0.0) tab.t.row(m) += cost(bj) * tab.t.row(i);
  }

  if (!tab.run(false)) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  sol.x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i)
    if (tab.basis[i] < n) sol.x(tab.basis[i]) = tab.t(i, tab.rhs_col());
  sol.objective = cost.dot(sol.x);
  sol.status = LpStatus::Optimal;
  return sol;
}

}  // namespace rsc

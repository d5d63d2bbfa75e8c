#pragma once

#include <Eigen/Core>

namespace rsc {

enum class LpStatus { Optimal, Infeasible, Unbounded, Stalled };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
};

/// min cost . x   subject to  A x <= b,  x >= 0.
/// Dense two-phase simplex (Dantzig pricing with Bland fallback).
LpSolution solve_lp(const Eigen::VectorXd& cost, const Eigen::MatrixXd& A,
                    const Eigen::VectorXd& b);

}  // namespace rsc

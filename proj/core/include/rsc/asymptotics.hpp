#pragma once

#include "rsc/errors.hpp"

namespace rsc {

/// Soft-thresholding rule sgn(t) * max(|t| - theta, 0).
double soft_threshold(double t, double theta);

/// E[eta(Z; alpha)^2] for Z standard normal, in closed form:
/// (alpha^2 + 1) erfc(alpha/sqrt(2)) - alpha sqrt(2/pi) exp(-alpha^2/2).
double eta_moment(double alpha);

/// Inverse of erfc on (0, 2), by Newton iteration.
double erfc_inv(double y);

/// Scalar state of the large-system fixed point for the l1-penalized
/// least-squares solution when the true signal is zero. `norm_limit_sq`
/// is the limiting squared norm of the solution under the unit column
/// normalization (noise variance 1/d), i.e. E/(delta - E).
struct AsymptoticState {
  double delta = 0.0;
  double alpha = 0.0;
  double tau_star = 0.0;
  double lambda = 0.0;
  double sigma = 0.0;
  double eta_sq = 0.0;         // E[eta(Z; alpha)^2] at the solved alpha
  double risk = 0.0;           // delta * (tau_star^2 - sigma^2)
  double norm_limit_sq = 0.0;  // eta_sq / (delta - eta_sq)
};

/// Solves the scalar fixed-point system
///   lambda = alpha tau [1 - (2/delta) P{Z >= alpha}],
///   tau^2  = sigma^2 / (1 - E[eta(Z;alpha)^2] / delta)
/// for alpha by bracketing + bisection. lambda == 0 selects the
/// vanishing-penalty limit alpha = sqrt(2) erfc^{-1}(delta).
AsymptoticState fixed_point(double delta, double sigma, double lambda);

struct CrossingConstants {
  double alpha_star = 0.0;
  double delta_star = 0.0;
  double rho_star = 0.0;  // 1 / delta_star
};

/// Crossing of delta = erfc(alpha/sqrt(2)) with
/// sqrt(2/pi) * alpha / (alpha^2 + 1/2) * exp(-alpha^2/2),
/// solved by bisection on (0, 5) to 1e-10.
CrossingConstants rho_star();

}  // namespace rsc

#include "rsc/asymptotics.hpp"

#include <cmath>
#include <sstream>

namespace rsc {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt2OverPi = 0.7978845608028654;

double gauss_upper_tail(double alpha) {  // P{Z >= alpha}
  return 0.5 * std::erfc(alpha / kSqrt2);
}

}  // namespace

double soft_threshold(double t, double theta) {
  double mag = std::abs(t) - theta;
  if (mag <= 0.0) return 0.0;
  return t > 0.0 ? mag : -mag;
}

double eta_moment(double alpha) {
  return (alpha * alpha + 1.0) * std::erfc(alpha / kSqrt2) -
         alpha * kSqrt2OverPi * std::exp(-0.5 * alpha * alpha);
}

double erfc_inv(double y) {
  if (!(y > 0.0 && y < 2.0)) throw NoSolutionError("erfc_inv domain is (0, 2)");
  // bisection start, then Newton polish: erfc'(x) = -2/sqrt(pi) e^{-x^2}
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    if (std::erfc(mid) > y)
      lo = mid;
    else
      hi = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 8; ++i) {
    double f = std::erfc(x) - y;
    double df = -2.0 / std::sqrt(M_PI) * std::exp(-x * x);
    double step = f / df;
    x -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
  }
  return x;
}

AsymptoticState fixed_point(double delta, double sigma, double lambda) {
  if (!(delta > 0.0 && delta < 1.0))
    throw InvalidConfigError("delta must lie in (0, 1)");
  if (!(sigma > 0.0)) throw InvalidConfigError("sigma must be positive");
  if (lambda < 0.0) throw InvalidConfigError("lambda must be >= 0");

  AsymptoticState state;
  state.delta = delta;
  state.sigma = sigma;
  state.lambda = lambda;

  // alpha0 is where the penalty term 1 - (2/delta) P{Z >= alpha} vanishes.
  const double alpha0 = kSqrt2 * erfc_inv(delta);

  double alpha;
  if (lambda == 0.0) {
    alpha = alpha0;
  } else {
    // residual(alpha) = lambda sqrt(1 - E/delta) - alpha sigma (1 - 2P/delta),
    // positive at alpha0 and eventually negative; bisect.
    auto residual = [&](double a) {
      double e = eta_moment(a);
      double inside = 1.0 - e / delta;
      if (inside <= 0.0) return lambda > 0.0 ? 1.0 : 0.0;  // tau undefined yet
      return lambda * std::sqrt(inside) -
             a * sigma * (1.0 - 2.0 * gauss_upper_tail(a) / delta);
    };
    double lo = alpha0;
    double hi = alpha0 + 1.0;
    int expand = 0;
    while (residual(hi) > 0.0) {
      hi += 1.0;
      if (++expand > 60) {
        std::ostringstream msg;
        msg << "no bracket for alpha at delta=" << delta << " sigma=" << sigma
            << " lambda=" << lambda;
        throw NoSolutionError(msg.str());
      }
    }
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      double r = residual(mid);
      if (std::abs(r) <= 1e-10) {
        lo = hi = mid;
        break;
      }
      if (r > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    alpha = 0.5 * (lo + hi);
  }

  double e = eta_moment(alpha);
  double denom = 1.0 - e / delta;
  if (denom <= 0.0)
    throw NoSolutionError("fixed point has no finite tau (eta moment >= delta)");
  state.alpha = alpha;
  state.eta_sq = e;
  state.tau_star = sigma / std::sqrt(denom);
  state.risk = delta * (state.tau_star * state.tau_star - sigma * sigma);
  state.norm_limit_sq = e / (delta - e);
  return state;
}

CrossingConstants rho_star() {
  // g(a) = erfc(a/sqrt2) - sqrt(2/pi) a/(a^2+1/2) e^{-a^2/2}; root in (0, 5)
  auto g = [](double a) {
    return std::erfc(a / kSqrt2) -
           kSqrt2OverPi * a / (a * a + 0.5) * std::exp(-0.5 * a * a);
  };
  double lo = 1e-6, hi = 5.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (std::abs(g(mid)) <= 1e-10 || hi - lo < 1e-14) {
      lo = hi = mid;
      break;
    }
    // g > 0 left of the crossing (erfc dominates near 0), negative right of it
    if (g(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  CrossingConstants c;
  c.alpha_star = 0.5 * (lo + hi);
  c.delta_star = std::erfc(c.alpha_star / kSqrt2);
  c.rho_star = 1.0 / c.delta_star;
  return c;
}

}  // namespace rsc

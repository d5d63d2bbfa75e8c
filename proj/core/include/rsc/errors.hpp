#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace rsc {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidConfigError : public Error {
public:
  using Error::Error;
};

/// Input is structurally unusable (zero column, empty slice, ...).
class DegenerateInputError : public Error {
public:
  DegenerateInputError(const std::string& msg, int index = -1)
      : Error(msg), index_(index) {}
  int index() const { return index_; }

private:
  int index_;
};

class InvalidBasisError : public Error {
public:
  using Error::Error;
};

/// Iterative solver hit its iteration cap. Carries the last iterate and the
/// optimality residual it reached, so callers can decide whether to accept it.
class IterationLimitError : public Error {
public:
  IterationLimitError(const std::string& msg, Eigen::VectorXd last_iterate,
                      double kkt_residual)
      : Error(msg), last_iterate_(std::move(last_iterate)),
        kkt_residual_(kkt_residual) {}
  const Eigen::VectorXd& last_iterate() const { return last_iterate_; }
  double kkt_residual() const { return kkt_residual_; }

private:
  Eigen::VectorXd last_iterate_;
  double kkt_residual_;
};

/// Constrained problem has no feasible point at the requested level.
class InfeasibleError : public Error {
public:
  InfeasibleError(const std::string& msg, double min_residual)
      : Error(msg), min_residual_(min_residual) {}
  double min_residual() const { return min_residual_; }

private:
  double min_residual_;
};

/// Two-step calibration failed: the first stage returned the zero vector so
/// the penalty rule lambda = alpha0 / ||beta*||_1 is undefined.
class DegenerateStep1Error : public Error {
public:
  using Error::Error;
};

class NoSolutionError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(const std::string& msg, int line = -1) : Error(msg), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

}  // namespace rsc

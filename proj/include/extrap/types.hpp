#pragma once

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace extrap {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Error hierarchy. Every throwing path in the library uses one of these, so
// callers (and the CLI exit-code mapping) can distinguish bad inputs from
// numerical breakdown.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested evaluation point (circle, disc image, stencil) leaves the grid.
class OutOfDomainError : public Error {
 public:
  using Error::Error;
};

/// A radius schedule or sample sequence violates its preconditions.
class ScheduleError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be Hermitian positive definite is not.
class PositivityError : public Error {
 public:
  using Error::Error;
};

/// A quadrature or finite-difference request exceeds what the configured
/// resolution supports. Carries the estimated supported limit.
class ResolutionError : public Error {
 public:
  ResolutionError(const std::string& what, double limit)
      : Error(what), limit_(limit) {}
  double limit() const { return limit_; }

 private:
  double limit_;
};

class ConditioningError : public Error {
 public:
  using Error::Error;
};

class FeasibilityError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class RankError : public Error {
 public:
  using Error::Error;
};

/// Scenario/config parse failure with source location.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line, int col)
      : Error(what), line_(line), col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

// ---------------------------------------------------------------------------
// Verdict: the machine-checkable outcome of any monotonicity / convexity /
// curvature claim. Invariant: passed <=> max_violation <= tolerance.
// ---------------------------------------------------------------------------

struct Witness {
  std::string what;            // e.g. "grid node", "t", "probe"
  std::vector<double> where;   // coordinates or parameter values
};

struct Verdict {
  bool passed = true;
  double max_violation = 0.0;  // >= 0
  double tolerance = 0.0;      // > 0
  std::optional<Witness> witness;
  std::string note;

  static Verdict of(double violation, double tol,
                    std::optional<Witness> w = std::nullopt,
                    std::string note = {}) {
    Verdict v;
    v.max_violation = violation < 0.0 ? 0.0 : violation;
    v.tolerance = tol;
    v.passed = v.max_violation <= tol;
    v.witness = std::move(w);
    v.note = std::move(note);
    return v;
  }
};

// ---------------------------------------------------------------------------
// ConditionLog: shared accumulator for conditioning warnings and jitter
// events attached to metric families and Gram solves. Thread-safe.
// ---------------------------------------------------------------------------

class ConditionLog {
 public:
  void warn(const std::string& what) {
    std::lock_guard<std::mutex> lock(mutex_);
    warnings_.push_back(what);
  }
  void record_jitter(double magnitude) {
    std::lock_guard<std::mutex> lock(mutex_);
    jitters_.push_back(magnitude);
  }
  std::vector<std::string> warnings() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return warnings_;
  }
  std::vector<double> jitters() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return jitters_;
  }
  bool clean() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return warnings_.empty() && jitters_.empty();
  }

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> warnings_;
  std::vector<double> jitters_;
};

}  // namespace extrap

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace blgeo {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operands have incompatible dimensions.
struct DimensionMismatchError : Error {
  using Error::Error;
};

/// A matrix required to be symmetric is not, beyond tolerance.
struct NotSymmetricError : Error {
  using Error::Error;
};

/// A matrix required to be positive definite is not. Carries the smallest
/// eigenvalue found by the diagnostic fallback (NaN if not computed).
struct NotPositiveDefiniteError : Error {
  NotPositiveDefiniteError(const std::string& msg, double min_eigenvalue)
      : Error(msg), min_eigenvalue(min_eigenvalue) {}
  double min_eigenvalue;
};

/// A linear map B_j fails the full-row-rank (surjectivity) requirement.
struct RankDeficientError : Error {
  RankDeficientError(const std::string& msg, int map_index)
      : Error(msg), map_index(map_index) {}
  int map_index;
};

/// An exponent p_j is negative.
struct NegativeExponentError : Error {
  NegativeExponentError(const std::string& msg, int map_index)
      : Error(msg), map_index(map_index) {}
  int map_index;
};

/// The exact scaling identity sum_j p_j * n_j = n fails. Carries the exact
/// rational value of the sum.
struct ScalingViolationError : Error {
  ScalingViolationError(const std::string& msg, long long sum_num,
                        long long sum_den, long long n)
      : Error(msg), sum_num(sum_num), sum_den(sum_den), n(n) {}
  long long sum_num;
  long long sum_den;
  long long n;
};

/// The aggregate matrix sum_j p_j B_j^T A_j B_j is numerically singular.
struct SingularAggregateError : Error {
  using Error::Error;
};

/// A completely positive map (or its adjoint) produced a singular output
/// where an invertible one is required.
struct SingularOperatorError : Error {
  using Error::Error;
};

/// An iterative method exhausted its budget without meeting its tolerance.
struct NotConvergedError : Error {
  NotConvergedError(const std::string& msg, double residual)
      : Error(msg), residual(residual) {}
  double residual;
};

/// The operator-scaling reduction would exceed the configured dimension cap.
struct DimensionCapExceededError : Error {
  DimensionCapExceededError(const std::string& msg, long long required_dim,
                            long long cap)
      : Error(msg), required_dim(required_dim), cap(cap) {}
  long long required_dim;
  long long cap;
};

}  // namespace blgeo

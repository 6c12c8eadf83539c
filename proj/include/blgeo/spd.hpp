#pragma once

#include <Eigen/Dense>

#include "blgeo/errors.hpp"

namespace blgeo {

/// Symmetric positive definite matrix. Construction symmetrizes the input
/// and validates positive definiteness by Cholesky factorization; a matrix
/// whose asymmetry exceeds sym_tol relative to its Frobenius norm is
/// rejected rather than silently symmetrized.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Eigen::MatrixXd& entries, double sym_tol = 1e-12);

  static SpdMatrix identity(int dim);

  [[nodiscard]] const Eigen::MatrixXd& mat() const { return entries_; }
  [[nodiscard]] int dim() const { return static_cast<int>(entries_.rows()); }

 private:
  Eigen::MatrixXd entries_;
};

/// Symmetric matrix, used for tangent vectors to the SPD cone. Symmetrized
/// on construction under the same asymmetry tolerance as SpdMatrix.
class TangentMatrix {
 public:
  explicit TangentMatrix(const Eigen::MatrixXd& entries,
                         double sym_tol = 1e-12);

  [[nodiscard]] const Eigen::MatrixXd& mat() const { return entries_; }
  [[nodiscard]] int dim() const { return static_cast<int>(entries_.rows()); }

 private:
  Eigen::MatrixXd entries_;
};

/// Unique SPD square root X^{1/2}.
[[nodiscard]] SpdMatrix spd_sqrt(const SpdMatrix& x);

/// Real SPD power X^t for any real t.
[[nodiscard]] SpdMatrix spd_pow(const SpdMatrix& x, double t);

/// Point at parameter t on the geodesic from x to y:
///   x #_t y = x^{1/2} (x^{-1/2} y x^{-1/2})^t x^{1/2},  t in [0, 1].
[[nodiscard]] SpdMatrix geodesic(const SpdMatrix& x, const SpdMatrix& y,
                                 double t);

/// Matrix geometric mean, the geodesic midpoint x #_{1/2} y.
[[nodiscard]] SpdMatrix geometric_mean(const SpdMatrix& x, const SpdMatrix& y);

/// Affine-invariant Riemannian inner product of tangents u, v at base x:
///   g_x(u, v) = tr(x^{-1} u x^{-1} v).
[[nodiscard]] double metric_inner(const SpdMatrix& x, const TangentMatrix& u,
                                  const TangentMatrix& v);

/// Loewner order test p <= q, i.e. q - p is positive semidefinite up to a
/// relative eigenvalue tolerance.
[[nodiscard]] bool loewner_leq(const SpdMatrix& p, const SpdMatrix& q,
                               double tol = 1e-10);
[[nodiscard]] bool loewner_leq(const Eigen::MatrixXd& p,
                               const Eigen::MatrixXd& q, double tol = 1e-10);

/// log det of an SPD matrix via Cholesky; never forms the determinant.
[[nodiscard]] double log_det(const SpdMatrix& x);

/// log det of a symmetric matrix expected to be positive definite. Throws
/// NotPositiveDefiniteError when the Cholesky factorization fails.
[[nodiscard]] double log_det(const Eigen::MatrixXd& x);

namespace detail {

/// Eigendecomposition-based power of a symmetric PD matrix, without the
/// SpdMatrix validation round trip. Throws if an eigenvalue is <= 0.
[[nodiscard]] Eigen::MatrixXd sym_pow(const Eigen::MatrixXd& x, double t);

/// exp of a symmetric matrix via eigendecomposition.
[[nodiscard]] Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& s);

/// Smallest eigenvalue, for diagnostics in error messages.
[[nodiscard]] double min_eigenvalue(const Eigen::MatrixXd& x);

}  // namespace detail

}  // namespace blgeo

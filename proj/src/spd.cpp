#include "blgeo/spd.hpp"

#include <cmath>
#include <string>

namespace blgeo {

namespace {

void require_square(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw DimensionMismatchError(std::string(what) + " must be square and nonempty, got " +
                                 std::to_string(m.rows()) + "x" +
                                 std::to_string(m.cols()));
}

void require_same_dim(const SpdMatrix& a, const SpdMatrix& b,
                      const char* what) {
  if (a.dim() != b.dim())
    throw DimensionMismatchError(std::string(what) + ": dimensions " +
                                 std::to_string(a.dim()) + " and " +
                                 std::to_string(b.dim()) + " differ");
}

Eigen::MatrixXd check_symmetry(const Eigen::MatrixXd& m, double sym_tol,
                               const char* what) {
  require_square(m, what);
  const double scale = m.norm();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > sym_tol * scale && asym > 0.0)
    throw NotSymmetricError(std::string(what) + " asymmetry " +
                            std::to_string(asym) + " exceeds tolerance " +
                            std::to_string(sym_tol) + " * ||m||_F");
  return 0.5 * (m + m.transpose());
}

}  // namespace

SpdMatrix::SpdMatrix(const Eigen::MatrixXd& entries, double sym_tol)
    : entries_(check_symmetry(entries, sym_tol, "SpdMatrix")) {
  Eigen::LLT<Eigen::MatrixXd> llt(entries_);
  if (llt.info() != Eigen::Success) {
    // Eigen fallback is diagnostic only: the failure itself comes from
    // the Cholesky factorization.
    const double lmin = detail::min_eigenvalue(entries_);
    throw NotPositiveDefiniteError(
        "SpdMatrix: Cholesky factorization failed, min eigenvalue " +
            std::to_string(lmin),
        lmin);
  }
}

SpdMatrix SpdMatrix::identity(int dim) {
  return SpdMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

TangentMatrix::TangentMatrix(const Eigen::MatrixXd& entries, double sym_tol)
    : entries_(check_symmetry(entries, sym_tol, "TangentMatrix")) {}

namespace detail {

Eigen::MatrixXd sym_pow(const Eigen::MatrixXd& x, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
  if (es.info() != Eigen::Success)
    throw Error("sym_pow: eigendecomposition failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0)
    throw NotPositiveDefiniteError(
        "sym_pow: matrix has eigenvalue " + std::to_string(ev.minCoeff()),
        ev.minCoeff());
  const Eigen::VectorXd powed =
      ev.array().pow(t).matrix();
  Eigen::MatrixXd out = es.eigenvectors() * powed.asDiagonal() *
                        es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success)
    throw Error("sym_exp: eigendecomposition failed");
  const Eigen::VectorXd expd = es.eigenvalues().array().exp().matrix();
  Eigen::MatrixXd out = es.eigenvectors() * expd.asDiagonal() *
                        es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

double min_eigenvalue(const Eigen::MatrixXd& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x,
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    return std::numeric_limits<double>::quiet_NaN();
  return es.eigenvalues().minCoeff();
}

}  // namespace detail

SpdMatrix spd_sqrt(const SpdMatrix& x) {
  return SpdMatrix(detail::sym_pow(x.mat(), 0.5));
}

SpdMatrix spd_pow(const SpdMatrix& x, double t) {
  return SpdMatrix(detail::sym_pow(x.mat(), t));
}

SpdMatrix geodesic(const SpdMatrix& x, const SpdMatrix& y, double t) {
  require_same_dim(x, y, "geodesic");
  if (!(t >= 0.0 && t <= 1.0))
    throw Error("geodesic: parameter t = " + std::to_string(t) +
                " outside [0, 1]");
  const Eigen::MatrixXd rx = detail::sym_pow(x.mat(), 0.5);
  const Eigen::MatrixXd rxi = detail::sym_pow(x.mat(), -0.5);
  Eigen::MatrixXd w = rxi * y.mat() * rxi;
  w = 0.5 * (w + w.transpose());
  Eigen::MatrixXd out = rx * detail::sym_pow(w, t) * rx;
  return SpdMatrix(0.5 * (out + out.transpose()));
}

SpdMatrix geometric_mean(const SpdMatrix& x, const SpdMatrix& y) {
  return geodesic(x, y, 0.5);
}

double metric_inner(const SpdMatrix& x, const TangentMatrix& u,
                    const TangentMatrix& v) {
  if (x.dim() != u.dim() || x.dim() != v.dim())
    throw DimensionMismatchError(
        "metric_inner: base dimension " + std::to_string(x.dim()) +
        " does not match tangents " + std::to_string(u.dim()) + ", " +
        std::to_string(v.dim()));
  Eigen::LLT<Eigen::MatrixXd> llt(x.mat());
  const Eigen::MatrixXd xu = llt.solve(u.mat());
  const Eigen::MatrixXd xv = llt.solve(v.mat());
  return (xu * xv).trace();
}

bool loewner_leq(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q,
                 double tol) {
  if (p.rows() != q.rows() || p.cols() != q.cols())
    throw DimensionMismatchError("loewner_leq: dimension mismatch");
  const Eigen::MatrixXd diff = q - p;
  const double lmin = detail::min_eigenvalue(diff);
  return lmin >= -tol * (1.0 + diff.norm());
}

bool loewner_leq(const SpdMatrix& p, const SpdMatrix& q, double tol) {
  return loewner_leq(p.mat(), q.mat(), tol);
}

double log_det(const Eigen::MatrixXd& x) {
  require_square(x, "log_det");
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (x + x.transpose()));
  if (llt.info() != Eigen::Success) {
    const double lmin = detail::min_eigenvalue(x);
    throw NotPositiveDefiniteError(
        "log_det: Cholesky factorization failed, min eigenvalue " +
            std::to_string(lmin),
        lmin);
  }
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double log_det(const SpdMatrix& x) { return log_det(x.mat()); }

}  // namespace blgeo

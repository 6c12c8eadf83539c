#include "blgeo/opscale.hpp"

#include <cmath>
#include <string>

namespace blgeo {

namespace {

Eigen::MatrixXd symmetrized(Eigen::MatrixXd m) {
  return 0.5 * (m + m.transpose());
}

// Inverse of a symmetric PD matrix, or throws SingularOperatorError.
Eigen::MatrixXd pd_inverse(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw SingularOperatorError(std::string(what) +
                                " is numerically singular");
  return symmetrized(llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols())));
}

void det_normalize(Eigen::MatrixXd& x) {
  Eigen::LLT<Eigen::MatrixXd> llt(x);
  if (llt.info() != Eigen::Success)
    throw SingularOperatorError("capacity iterate lost positive definiteness");
  const double ld =
      2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  x *= std::exp(-ld / static_cast<double>(x.rows()));
}

}  // namespace

Eigen::MatrixXd KrausSet::apply(const Eigen::MatrixXd& x) const {
  if (x.rows() != input_dim || x.cols() != input_dim)
    throw DimensionMismatchError("KrausSet::apply: argument is " +
                                 std::to_string(x.rows()) + "x" +
                                 std::to_string(x.cols()) + ", expected " +
                                 std::to_string(input_dim) + " square");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(output_dim, output_dim);
  for (const auto& t : kraus) out.noalias() += t.transpose() * x * t;
  return symmetrized(std::move(out));
}

Eigen::MatrixXd KrausSet::apply_adjoint(const Eigen::MatrixXd& y) const {
  if (y.rows() != output_dim || y.cols() != output_dim)
    throw DimensionMismatchError("KrausSet::apply_adjoint: argument is " +
                                 std::to_string(y.rows()) + "x" +
                                 std::to_string(y.cols()) + ", expected " +
                                 std::to_string(output_dim) + " square");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(input_dim, input_dim);
  for (const auto& t : kraus) out.noalias() += t * y * t.transpose();
  return symmetrized(std::move(out));
}

KrausSet build_scaling_operator(const BLDatum& d, long long dim_cap) {
  if (!d.scaling_holds()) {
    const Rational sum = d.scaling_sum();
    throw ScalingViolationError(
        "build_scaling_operator: sum_j p_j n_j = " + sum.str() +
            " but n = " + std::to_string(d.n()),
        sum.num, sum.den, d.n());
  }
  const long long c = d.common_denominator();
  const long long nc = Rational::checked_mul(c, d.n());
  if (nc > dim_cap)
    throw DimensionCapExceededError(
        "build_scaling_operator: lifted dimension n*c = " +
            std::to_string(nc) + " exceeds cap " + std::to_string(dim_cap),
        nc, dim_cap);

  KrausSet k;
  k.input_dim = static_cast<int>(nc);
  k.output_dim = d.n();
  k.c = c;
  for (int j = 0; j < d.m(); ++j)
    for (long long copy = 0; copy < d.numerator(j); ++copy)
      k.copy_map.push_back(j);

  // Row block i starts where the heights of the previous copies end; the
  // scaling identity makes the blocks tile R^{nc} exactly.
  long long offset = 0;
  for (const int j : k.copy_map) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(nc, d.n());
    t.block(offset, 0, d.map_rows(j), d.n()) = d.map(j);
    k.kraus.push_back(std::move(t));
    offset += d.map_rows(j);
  }
  return k;
}

CapacityResult capacity(const KrausSet& k, const CapacityConfig& cfg) {
  const int n = k.output_dim;
  const int nc = k.input_dim;
  const double c = static_cast<double>(k.c);
  CapacityResult result;

  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(nc, nc);
  Eigen::MatrixXd y = pd_inverse(k.apply(x), "T(I)");

  for (int it = 1; it <= cfg.max_iter; ++it) {
    const Eigen::MatrixXd tadj_y = k.apply_adjoint(y);
    const Eigen::MatrixXd x_next = pd_inverse(c * tadj_y, "c T*(Y)");

    // Residual of the pair (Y, X_next) against the doubly-stochastic
    // position; the second term vanishes by construction up to roundoff.
    const Eigen::MatrixXd ry = detail::sym_pow(y, 0.5);
    const Eigen::MatrixXd rx = detail::sym_pow(x_next, 0.5);
    const double r1 =
        (ry * k.apply(x_next) * ry - Eigen::MatrixXd::Identity(n, n)).norm();
    const double r2 = (c * rx * tadj_y * rx -
                       Eigen::MatrixXd::Identity(nc, nc)).norm();
    result.ds_residual = std::max(r1, r2);
    result.iterations = it;

    x = x_next;
    det_normalize(x);
    if (result.ds_residual <= cfg.tol) {
      result.converged = true;
      break;
    }
    y = pd_inverse(k.apply(x), "T(X)");
  }

  // log cap evaluated at the det-normalized iterate:
  //   log det((1/c) T(X)) = log det T(X) - n log c.
  const Eigen::MatrixXd tx = k.apply(x);
  result.log_cap = log_det(tx) - static_cast<double>(n) * std::log(c);
  result.right_scaling = detail::sym_pow(x, 0.5);
  result.left_scaling = detail::sym_pow(pd_inverse(tx, "T(X)"), 0.5);
  return result;
}

double log_bl_from_capacity(const CapacityResult& r) {
  if (!r.converged)
    throw NotConvergedError(
        "log_bl_from_capacity: capacity iteration stopped at "
        "doubly-stochastic residual " +
            std::to_string(r.ds_residual),
        r.ds_residual);
  return -0.5 * r.log_cap;
}

}  // namespace blgeo

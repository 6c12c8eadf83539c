#pragma once

#include <Eigen/Dense>
#include <vector>

#include "blgeo/datum.hpp"

namespace blgeo {

/// Completely positive map given by Kraus matrices T_i in R^{nc x n}:
///   T(X)  = sum_i T_i^T X T_i      (S^{nc} -> S^n)
///   T*(Y) = sum_i T_i Y T_i^T      (S^n -> S^{nc}).
struct KrausSet {
  std::vector<Eigen::MatrixXd> kraus;
  int input_dim = 0;   // nc, the dimension X lives in
  int output_dim = 0;  // n, the dimension T(X) lives in
  long long c = 1;     // common denominator of the source exponents
  std::vector<int> copy_map;  // delta: Kraus index -> map index it copies

  [[nodiscard]] int size() const { return static_cast<int>(kraus.size()); }

  [[nodiscard]] Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  [[nodiscard]] Eigen::MatrixXd apply_adjoint(const Eigen::MatrixXd& y) const;
};

struct CapacityConfig {
  double tol = 1e-8;      // stop when the doubly-stochastic residual is below
  int max_iter = 100000;
};

struct CapacityResult {
  double log_cap = 0.0;
  double ds_residual = 0.0;
  Eigen::MatrixXd left_scaling;   // L, n x n
  Eigen::MatrixXd right_scaling;  // R, nc x nc
  int iterations = 0;
  bool converged = false;
};

/// Builds the Kraus family of the operator-scaling reduction: the datum's
/// exponents p_j = c_j / c expand into m' = sum_j c_j copies, copy i being
/// the nc x n matrix whose i-th row block (of height n_{delta(i)}) is
/// B_{delta(i)} and whose other entries vanish, with nc = n * c.
/// Consequently T(I_{nc}) = sum_j c_j B_j^T B_j exactly.
[[nodiscard]] KrausSet build_scaling_operator(const BLDatum& d,
                                              long long dim_cap = 4096);

/// Capacity of the scaled map,
///   cap = inf { det((1/c) T(X)) : X SPD, det X = 1 },
/// by alternate minimization: Y <- T(X)^{-1}, X <- (c T*(Y))^{-1}, with X
/// det-normalized between rounds. Convergence is declared when the
/// doubly-stochastic residual
///   max( ||Y^{1/2} T(X) Y^{1/2} - I_n||_F,
///        ||c X^{1/2} T*(Y) X^{1/2} - I_{nc}||_F )
/// falls below the tolerance. The scalings L = Y^{1/2}, R = X^{1/2} are
/// returned alongside log cap.
[[nodiscard]] CapacityResult capacity(const KrausSet& k,
                                      const CapacityConfig& cfg = {});

/// log of the BL constant recovered from the capacity: cap = BL^{-2}, so
/// log BL = -(1/2) log cap. Throws NotConvergedError when the capacity
/// iteration did not converge.
[[nodiscard]] double log_bl_from_capacity(const CapacityResult& r);

}  // namespace blgeo

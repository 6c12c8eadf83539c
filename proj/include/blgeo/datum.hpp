#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "blgeo/rational.hpp"
#include "blgeo/spd.hpp"

namespace blgeo {

/// Brascamp-Lieb datum: maps B_j in R^{n_j x n} together with non-negative
/// rational exponents p_j = c_j / c held over a common denominator c.
///
/// Construction checks shapes (every map has n columns, 1 <= n_j <= n) and
/// exponent signs, and normalizes the exponents to their least common
/// denominator exactly. Surjectivity and the scaling identity are the
/// business of validate_datum / feasibility_screen, not the constructor.
class BLDatum {
 public:
  BLDatum(int n, std::vector<Eigen::MatrixXd> maps,
          const std::vector<Rational>& exponents);

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] int m() const { return static_cast<int>(maps_.size()); }
  [[nodiscard]] const std::vector<Eigen::MatrixXd>& maps() const {
    return maps_;
  }
  [[nodiscard]] const Eigen::MatrixXd& map(int j) const { return maps_[j]; }
  [[nodiscard]] int map_rows(int j) const {
    return static_cast<int>(maps_[j].rows());
  }

  /// Exponent p_j as an exact rational c_j / c.
  [[nodiscard]] Rational exponent(int j) const {
    return Rational(numerators_[j], common_den_);
  }
  [[nodiscard]] double exponent_value(int j) const {
    return static_cast<double>(numerators_[j]) /
           static_cast<double>(common_den_);
  }
  /// Numerator c_j over the common denominator.
  [[nodiscard]] long long numerator(int j) const { return numerators_[j]; }
  /// Common denominator c of all exponents.
  [[nodiscard]] long long common_denominator() const { return common_den_; }

  /// Exact rational value of sum_j p_j * n_j.
  [[nodiscard]] Rational scaling_sum() const;
  /// Whether sum_j p_j * n_j = n holds exactly.
  [[nodiscard]] bool scaling_holds() const;

 private:
  int n_;
  std::vector<Eigen::MatrixXd> maps_;
  std::vector<long long> numerators_;
  long long common_den_;
};

/// Tuple of SPD matrices A_j, one per map, sized n_j x n_j.
struct GaussianTuple {
  std::vector<SpdMatrix> blocks;

  [[nodiscard]] int size() const { return static_cast<int>(blocks.size()); }
};

/// Verdict of the finite feasibility screen.
enum class FeasibilityVerdict {
  ConsistentWithFeasible,
  InfeasibleWitness,
  ScalingViolation,
  RankDeficient,
};

struct ScreenConfig {
  int coordinate_dim_cap = 12;   // largest coordinate-subspace dimension enumerated
  int random_subspaces = 50;     // random subspaces per dimension
  std::uint64_t seed = 0;
  double rank_rel_tol = 1e-10;   // singular values below rank_rel_tol * s_max count as zero
};

struct FeasibilityReport {
  FeasibilityVerdict verdict = FeasibilityVerdict::ConsistentWithFeasible;
  /// Orthonormal basis (n x k) of a subspace violating the dimension
  /// condition, when verdict is InfeasibleWitness.
  std::optional<Eigen::MatrixXd> witness;
  long long checked_subspaces = 0;
  std::uint64_t seed = 0;
};

/// Numerical rank by singular values: count of s_i > rel_tol * s_max.
[[nodiscard]] int numerical_rank(const Eigen::MatrixXd& m,
                                 double rel_tol = 1e-10);

/// Full validation of a datum: non-negative exponents (already a type
/// invariant), every B_j surjective, and the exact scaling identity
/// sum_j p_j n_j = n. Returns the datum unchanged on success; throws
/// RankDeficientError or ScalingViolationError otherwise.
BLDatum validate_datum(BLDatum candidate);

/// log of the Brascamp-Lieb functional at a fixed Gaussian input:
///   (1/2) [ sum_j p_j log det A_j - log det( sum_j p_j B_j^T A_j B_j ) ].
/// Throws SingularAggregateError when the aggregate matrix is numerically
/// singular.
[[nodiscard]] double log_bl_objective(const BLDatum& d, const GaussianTuple& a);

/// Objective F(X) = log det X - sum_j p_j log det(B_j X B_j^T), whose
/// supremum over SPD X equals twice the log of the BL constant.
[[nodiscard]] double f_objective(const BLDatum& d, const SpdMatrix& x);

/// Euclidean gradient of F at X:
///   grad F(X) = X^{-1} - sum_j p_j B_j^T (B_j X B_j^T)^{-1} B_j.
[[nodiscard]] TangentMatrix f_euclidean_gradient(const BLDatum& d,
                                                 const SpdMatrix& x);

namespace detail {

/// f_objective on a raw symmetric matrix, skipping SpdMatrix revalidation.
[[nodiscard]] double f_value(const BLDatum& d, const Eigen::MatrixXd& x);

/// sum_j p_j B_j^T (B_j X B_j^T)^{-1} B_j, the fixed-point right-hand side
/// and the subtracted term of the gradient.
[[nodiscard]] Eigen::MatrixXd gradient_pullback(const BLDatum& d,
                                                const Eigen::MatrixXd& x);

}  // namespace detail

/// Finite screen of the subspace dimension condition
///   dim(V) <= sum_j p_j dim(B_j V)   for all subspaces V
/// over coordinate subspaces, kernels of the maps and of stacked pairs, and
/// seeded random subspaces. The test per subspace is exact over integers:
///   c * dim(V) <= sum_j c_j * rank(B_j V).
/// A passing screen is consistent with feasibility, never a proof.
[[nodiscard]] FeasibilityReport feasibility_screen(const BLDatum& d,
                                                   const ScreenConfig& cfg = {});

}  // namespace blgeo

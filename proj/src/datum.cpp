#include "blgeo/datum.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <string>

namespace blgeo {

namespace {

// Cholesky-based log det that reports failure instead of throwing, for
// callers that map singularity to their own error type.
std::optional<double> try_log_det(const Eigen::MatrixXd& sym) {
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() != Eigen::Success) return std::nullopt;
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Eigen::MatrixXd canonicalize_columns(Eigen::MatrixXd v) {
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    Eigen::Index imax = 0;
    v.col(c).cwiseAbs().maxCoeff(&imax);
    if (v(imax, c) < 0.0) v.col(c) = -v.col(c);
  }
  return v;
}

}  // namespace

BLDatum::BLDatum(int n, std::vector<Eigen::MatrixXd> maps,
                 const std::vector<Rational>& exponents)
    : n_(n), maps_(std::move(maps)) {
  if (n_ <= 0) throw DimensionMismatchError("BLDatum: n must be positive");
  if (maps_.empty()) throw DimensionMismatchError("BLDatum: no maps given");
  if (maps_.size() != exponents.size())
    throw DimensionMismatchError(
        "BLDatum: " + std::to_string(maps_.size()) + " maps but " +
        std::to_string(exponents.size()) + " exponents");
  for (std::size_t j = 0; j < maps_.size(); ++j) {
    const auto& b = maps_[j];
    if (b.cols() != n_)
      throw DimensionMismatchError("BLDatum: map " + std::to_string(j) +
                                   " has " + std::to_string(b.cols()) +
                                   " columns, expected " + std::to_string(n_));
    if (b.rows() < 1 || b.rows() > n_)
      throw DimensionMismatchError("BLDatum: map " + std::to_string(j) +
                                   " has " + std::to_string(b.rows()) +
                                   " rows, expected between 1 and " +
                                   std::to_string(n_));
  }
  for (std::size_t j = 0; j < exponents.size(); ++j) {
    if (exponents[j].num < 0)
      throw NegativeExponentError(
          "BLDatum: exponent " + std::to_string(j) + " is " +
              exponents[j].str() + ", exponents must be non-negative",
          static_cast<int>(j));
  }
  common_den_ = 1;
  for (const auto& p : exponents) common_den_ = checked_lcm(common_den_, p.den);
  numerators_.reserve(exponents.size());
  for (const auto& p : exponents)
    numerators_.push_back(Rational::checked_mul(p.num, common_den_ / p.den));
}

Rational BLDatum::scaling_sum() const {
  Rational sum(0, 1);
  for (std::size_t j = 0; j < maps_.size(); ++j)
    sum = sum + Rational(Rational::checked_mul(numerators_[j], maps_[j].rows()),
                         common_den_);
  return sum;
}

bool BLDatum::scaling_holds() const {
  return scaling_sum() == Rational(n_, 1);
}

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = s(0);
  if (smax <= 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * smax) ++rank;
  return rank;
}

BLDatum validate_datum(BLDatum candidate) {
  for (int j = 0; j < candidate.m(); ++j) {
    const int rank = numerical_rank(candidate.map(j));
    if (rank < candidate.map_rows(j))
      throw RankDeficientError(
          "validate_datum: map " + std::to_string(j) + " has rank " +
              std::to_string(rank) + " but " +
              std::to_string(candidate.map_rows(j)) + " rows",
          j);
  }
  if (!candidate.scaling_holds()) {
    const Rational sum = candidate.scaling_sum();
    throw ScalingViolationError(
        "validate_datum: sum_j p_j n_j = " + sum.str() + " but n = " +
            std::to_string(candidate.n()),
        sum.num, sum.den, candidate.n());
  }
  return candidate;
}

double log_bl_objective(const BLDatum& d, const GaussianTuple& a) {
  if (a.size() != d.m())
    throw DimensionMismatchError("log_bl_objective: tuple has " +
                                 std::to_string(a.size()) + " blocks for " +
                                 std::to_string(d.m()) + " maps");
  double block_sum = 0.0;
  Eigen::MatrixXd agg = Eigen::MatrixXd::Zero(d.n(), d.n());
  for (int j = 0; j < d.m(); ++j) {
    const auto& aj = a.blocks[j];
    if (aj.dim() != d.map_rows(j))
      throw DimensionMismatchError("log_bl_objective: block " +
                                   std::to_string(j) + " is " +
                                   std::to_string(aj.dim()) + "-dimensional, "
                                   "expected " +
                                   std::to_string(d.map_rows(j)));
    block_sum += d.exponent_value(j) * log_det(aj);
    agg.noalias() +=
        d.exponent_value(j) * d.map(j).transpose() * aj.mat() * d.map(j);
  }
  agg = 0.5 * (agg + agg.transpose());
  const auto agg_ld = try_log_det(agg);
  if (!agg_ld)
    throw SingularAggregateError(
        "log_bl_objective: aggregate matrix sum_j p_j B_j^T A_j B_j is "
        "numerically singular");
  return 0.5 * (block_sum - *agg_ld);
}

namespace detail {

double f_value(const BLDatum& d, const Eigen::MatrixXd& x) {
  double value = log_det(x);
  for (int j = 0; j < d.m(); ++j) {
    Eigen::MatrixXd pushed = d.map(j) * x * d.map(j).transpose();
    pushed = 0.5 * (pushed + pushed.transpose());
    value -= d.exponent_value(j) * log_det(pushed);
  }
  return value;
}

Eigen::MatrixXd gradient_pullback(const BLDatum& d, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d.n(), d.n());
  for (int j = 0; j < d.m(); ++j) {
    Eigen::MatrixXd pushed = d.map(j) * x * d.map(j).transpose();
    pushed = 0.5 * (pushed + pushed.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(pushed);
    if (llt.info() != Eigen::Success)
      throw NotPositiveDefiniteError(
          "gradient_pullback: B_j X B_j^T singular for map " +
              std::to_string(j),
          detail::min_eigenvalue(pushed));
    sum.noalias() +=
        d.exponent_value(j) * d.map(j).transpose() * llt.solve(d.map(j));
  }
  return 0.5 * (sum + sum.transpose());
}

}  // namespace detail

double f_objective(const BLDatum& d, const SpdMatrix& x) {
  if (x.dim() != d.n())
    throw DimensionMismatchError("f_objective: X is " +
                                 std::to_string(x.dim()) +
                                 "-dimensional, expected " +
                                 std::to_string(d.n()));
  return detail::f_value(d, x.mat());
}

TangentMatrix f_euclidean_gradient(const BLDatum& d, const SpdMatrix& x) {
  if (x.dim() != d.n())
    throw DimensionMismatchError("f_euclidean_gradient: X is " +
                                 std::to_string(x.dim()) +
                                 "-dimensional, expected " +
                                 std::to_string(d.n()));
  Eigen::LLT<Eigen::MatrixXd> llt(x.mat());
  const Eigen::MatrixXd xinv =
      llt.solve(Eigen::MatrixXd::Identity(d.n(), d.n()));
  const Eigen::MatrixXd grad = xinv - detail::gradient_pullback(d, x.mat());
  return TangentMatrix(0.5 * (grad + grad.transpose()));
}

namespace {

// Orthonormal kernel basis of m, or an empty matrix if m is injective.
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& m, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = (s.size() > 0) ? s(0) : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (smax > 0.0 && s(i) > rel_tol * smax) ++rank;
  const Eigen::Index nullity = m.cols() - rank;
  if (nullity <= 0) return Eigen::MatrixXd(m.cols(), 0);
  return svd.matrixV().rightCols(nullity);
}

}  // namespace

FeasibilityReport feasibility_screen(const BLDatum& d,
                                     const ScreenConfig& cfg) {
  FeasibilityReport rep;
  rep.seed = cfg.seed;

  for (int j = 0; j < d.m(); ++j) {
    if (numerical_rank(d.map(j), cfg.rank_rel_tol) < d.map_rows(j)) {
      rep.verdict = FeasibilityVerdict::RankDeficient;
      return rep;
    }
  }
  if (!d.scaling_holds()) {
    rep.verdict = FeasibilityVerdict::ScalingViolation;
    return rep;
  }

  const int n = d.n();
  const long long c = d.common_denominator();

  // Exact integer test of c * dim(V) <= sum_j c_j * rank(B_j V). Returns
  // true when V witnesses infeasibility.
  const auto violates = [&](const Eigen::MatrixXd& v) {
    ++rep.checked_subspaces;
    const long long lhs = Rational::checked_mul(c, v.cols());
    long long rhs = 0;
    for (int j = 0; j < d.m(); ++j) {
      const long long r = numerical_rank(d.map(j) * v, cfg.rank_rel_tol);
      rhs = Rational::checked_add(rhs,
                                  Rational::checked_mul(d.numerator(j), r));
    }
    if (lhs > rhs) {
      rep.verdict = FeasibilityVerdict::InfeasibleWitness;
      rep.witness = canonicalize_columns(v);
      return true;
    }
    return false;
  };

  // Coordinate subspaces of dimension 1..min(n-1, cap), enumeration bounded
  // so the screen stays finite for larger n.
  constexpr long long kMaxCoordinateSubspaces = 4096;
  long long coordinate_budget = kMaxCoordinateSubspaces;
  const int kmax = std::min(n - 1, cfg.coordinate_dim_cap);
  for (int k = 1; k <= kmax && coordinate_budget > 0; ++k) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (coordinate_budget > 0) {
      Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, k);
      for (int i = 0; i < k; ++i) v(idx[i], i) = 1.0;
      --coordinate_budget;
      if (violates(v)) return rep;
      int i = k - 1;
      while (i >= 0 && idx[i] == n - k + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int t = i + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
    }
  }

  // Kernels of each map and of stacked pairs: the natural candidates for
  // subspaces on which the maps lose dimension.
  std::vector<Eigen::MatrixXd> kernels;
  for (int j = 0; j < d.m(); ++j)
    kernels.push_back(kernel_basis(d.map(j), cfg.rank_rel_tol));
  for (int j = 0; j < d.m(); ++j) {
    const auto& ker = kernels[j];
    if (ker.cols() >= 1 && ker.cols() <= n - 1 && violates(ker)) return rep;
  }
  for (int i = 0; i < d.m(); ++i) {
    for (int j = i + 1; j < d.m(); ++j) {
      Eigen::MatrixXd stacked(d.map_rows(i) + d.map_rows(j), n);
      stacked << d.map(i), d.map(j);
      const Eigen::MatrixXd ker = kernel_basis(stacked, cfg.rank_rel_tol);
      if (ker.cols() >= 1 && ker.cols() <= n - 1 && violates(ker)) return rep;
    }
  }

  // Seeded random subspaces of every proper dimension.
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 1; k <= n - 1; ++k) {
    for (int s = 0; s < cfg.random_subspaces; ++s) {
      Eigen::MatrixXd g(n, k);
      for (int r = 0; r < n; ++r)
        for (int q = 0; q < k; ++q) g(r, q) = normal(rng);
      const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
      const Eigen::MatrixXd v =
          qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
      if (violates(v)) return rep;
    }
  }

  rep.verdict = FeasibilityVerdict::ConsistentWithFeasible;
  return rep;
}

}  // namespace blgeo

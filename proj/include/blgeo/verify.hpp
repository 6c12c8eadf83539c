#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blgeo/datum.hpp"
#include "blgeo/opscale.hpp"

namespace blgeo {

/// Outcome of one randomized property check. Every sample yields a signed,
/// scale-normalized margin that is non-negative (up to roundoff) when the
/// property holds; a sample counts as a violation when its margin falls
/// below -tolerance. worst_margin is the smallest margin seen.
struct PropertyReport {
  std::string property;
  int samples = 0;
  int violations = 0;
  double worst_margin = 0.0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
};

/// Deterministic sampler of SPD matrices with eigenvalues log-uniform in
/// [condition_cap^{-1/2}, condition_cap^{1/2}] and a Haar-ish random
/// eigenbasis. sample(i) depends only on (seed, i), so suites are
/// reproducible and order-independent.
class SpdSampler {
 public:
  SpdSampler(int dim, std::uint64_t seed, double condition_cap = 1e4);

  [[nodiscard]] SpdMatrix sample(std::uint64_t index) const;
  [[nodiscard]] TangentMatrix sample_tangent(std::uint64_t index) const;
  [[nodiscard]] int dim() const { return dim_; }

 private:
  int dim_;
  std::uint64_t seed_;
  double condition_cap_;
};

/// Positive linear map X -> M X M^T with M full row rank, so SPD inputs map
/// to SPD outputs.
class CongruenceMap {
 public:
  explicit CongruenceMap(const Eigen::MatrixXd& m);

  [[nodiscard]] const Eigen::MatrixXd& matrix() const { return m_; }
  [[nodiscard]] Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  [[nodiscard]] Eigen::MatrixXd apply(const SpdMatrix& x) const;

 private:
  Eigen::MatrixXd m_;
};

/// phi(P # Q) <= phi(P) # phi(Q) in the Loewner order, for random SPD pairs.
[[nodiscard]] PropertyReport check_ando(const CongruenceMap& phi, int samples,
                                        std::uint64_t seed,
                                        double tolerance = 1e-9);

/// Transfer of blockwise geometric means through a jointly linear map
///   Phi(A) = sum_j w_j B_j^T A_j B_j:
///   Phi((P_j # Q_j)_j) <= Phi(P) # Phi(Q).
/// The weighted sums of the images must be positive definite, which holds
/// whenever the maps have no common kernel.
[[nodiscard]] PropertyReport check_joint_gm(
    const std::vector<Eigen::MatrixXd>& maps,
    const std::vector<double>& weights, int samples, std::uint64_t seed,
    double tolerance = 1e-9);

/// check_joint_gm over a datum's maps, weighted by its exponents.
[[nodiscard]] PropertyReport check_joint_gm(const BLDatum& d, int samples,
                                            std::uint64_t seed,
                                            double tolerance = 1e-9);

/// log det(P #_t Q) = (1 - t) log det P + t log det Q along geodesics.
[[nodiscard]] PropertyReport check_logdet_linearity(int dim, int samples,
                                                    std::uint64_t seed,
                                                    double tolerance = 1e-9);

/// Midpoint geodesic concavity of both objectives: F along geodesics of X
/// and the fixed-input BL functional along blockwise geodesics of the tuple.
[[nodiscard]] PropertyReport check_bl_concavity(const BLDatum& d, int samples,
                                                std::uint64_t seed,
                                                double tolerance = 1e-9);

/// Midpoint geodesic convexity of X -> log det T(X).
[[nodiscard]] PropertyReport check_capacity_convexity(const KrausSet& k,
                                                      int samples,
                                                      std::uint64_t seed,
                                                      double tolerance = 1e-9);

/// The block matrix [[P, P # Q], [P # Q, Q]] is PSD: the geometric mean is
/// feasible for its own maximal characterization.
[[nodiscard]] PropertyReport check_gm_maximal(int dim, int samples,
                                              std::uint64_t seed,
                                              double tolerance = 1e-9);

/// Feasibility of the block certificate transfers through a congruence:
///   [[phi(P), phi(P # Q)], [phi(P # Q), phi(Q)]] is PSD.
[[nodiscard]] PropertyReport check_gm_block_transfer(const CongruenceMap& phi,
                                                     int samples,
                                                     std::uint64_t seed,
                                                     double tolerance = 1e-9);

/// Central finite difference of F at X in direction Q against the analytic
/// directional derivative tr(grad F(X) Q), with h = 1e-5 ||X||_F / ||Q||_F.
[[nodiscard]] PropertyReport check_gradient_fd(const BLDatum& d, int samples,
                                               std::uint64_t seed,
                                               double tolerance = 1e-6);

/// Relative error between the central finite difference of F at X along Q
/// and a supplied directional-derivative value, normalized by
/// 1 + |analytic_directional|. Exposed so tests can feed deliberately wrong
/// values and see the check trip.
[[nodiscard]] double gradient_fd_relative_error(const BLDatum& d,
                                                const SpdMatrix& x,
                                                const TangentMatrix& q,
                                                double analytic_directional);

/// Runs every check at the given sample count and seed: the datum-free
/// geometry checks always, plus the objective, gradient, and capacity
/// checks when a datum is supplied (capacity is skipped when the lifted
/// dimension exceeds the default cap). The gradient check keeps its own
/// 1e-6 tolerance; all others use `tolerance`.
[[nodiscard]] std::vector<PropertyReport> run_property_suite(
    const std::optional<BLDatum>& d, int samples, std::uint64_t seed,
    double tolerance = 1e-9);

namespace detail {

/// splitmix64 stream mix: a small, fixed-quality hash of (seed, index) used
/// to derive independent per-sample generators.
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace detail

}  // namespace blgeo

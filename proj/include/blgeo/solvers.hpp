#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blgeo/datum.hpp"

namespace blgeo {

/// Line-search rule for the geodesic ascent solver.
enum class StepRule {
  GeodesicArmijo,  // backtracking with sufficient-increase test
  FixedStep,       // constant step size, no search
};

struct SolverConfig {
  double tol = 1e-10;          // stationarity tolerance
  int max_iter = 10000;
  double damping = 1.0;        // fixed-point mixing weight, halved on non-increase
  StepRule step_rule = StepRule::GeodesicArmijo;
  double step_size = 1.0;      // initial (Armijo) or constant (FixedStep) step
  double armijo_beta = 0.5;    // backtracking factor
  double armijo_sigma = 1e-4;  // sufficient-increase fraction
  double value_drift = 1e3;    // F above this flags divergence
  double iterate_norm = 1e14;  // iterate condition number above this flags divergence
  std::uint64_t seed = 0;      // randomized initialization, when a caller asks for one
};

struct TracePoint {
  int iteration = 0;
  double objective = 0.0;  // F at the iterate
  double residual = 0.0;   // stationarity residual at the iterate
};

struct SolveResult {
  std::string method;
  double log_bl = 0.0;          // F(X) / 2 at the final iterate
  std::optional<SpdMatrix> optimizer_x;   // det-normalized final X
  std::vector<SpdMatrix> maximizer_a;     // extracted tuple (B_j X B_j^T)^{-1}
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  bool diverged = false;
  std::vector<TracePoint> trace;
};

/// Relative stationarity residual at X:
///   || X^{-1} - sum_j p_j B_j^T (B_j X B_j^T)^{-1} B_j ||_F / || X^{-1} ||_F.
/// Vanishes exactly at critical points of F.
[[nodiscard]] double stationarity_residual(const BLDatum& d,
                                           const SpdMatrix& x);

/// Gaussian maximizer extracted from a critical point X of F:
///   A_j = (B_j X B_j^T)^{-1}.
[[nodiscard]] std::vector<SpdMatrix> extract_maximizer(const BLDatum& d,
                                                       const SpdMatrix& x);

/// Damped fixed-point iteration on M = X^{-1}:
///   M_{k+1} = (1 - alpha) M_k + alpha sum_j p_j B_j^T (B_j M_k^{-1} B_j^T)^{-1} B_j,
/// with automatic halving of alpha whenever a step fails to increase F
/// (up to a 1e-12 slack) and det-normalization of every iterate.
[[nodiscard]] SolveResult solve_fixed_point(
    const BLDatum& d, const SolverConfig& cfg = {},
    const std::optional<SpdMatrix>& x0 = std::nullopt);

/// Riemannian gradient ascent on F along geodesics of the SPD manifold:
///   X_{k+1} = X^{1/2} exp(eta S) X^{1/2},  S = X^{1/2} grad F(X) X^{1/2},
/// with an Armijo sufficient-increase search in eta by default.
[[nodiscard]] SolveResult solve_geodesic_ascent(
    const BLDatum& d, const SolverConfig& cfg = {},
    const std::optional<SpdMatrix>& x0 = std::nullopt);

}  // namespace blgeo

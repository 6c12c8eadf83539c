#include "blgeo/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace blgeo {

namespace {

constexpr double kMonotoneSlack = 1e-12;  // allowed per-step decrease of F
constexpr double kMinDamping = 1e-12;
constexpr int kMaxBacktracks = 60;

void require_scaling(const BLDatum& d, const char* who) {
  if (d.scaling_holds()) return;
  const Rational sum = d.scaling_sum();
  throw ScalingViolationError(
      std::string(who) + ": sum_j p_j n_j = " + sum.str() +
          " but n = " + std::to_string(d.n()) +
          "; F is not scale-invariant and det-normalization is unsound",
      sum.num, sum.den, d.n());
}

Eigen::MatrixXd initial_iterate(const BLDatum& d,
                                const std::optional<SpdMatrix>& x0) {
  if (!x0) return Eigen::MatrixXd::Identity(d.n(), d.n());
  if (x0->dim() != d.n())
    throw DimensionMismatchError("initial iterate is " +
                                 std::to_string(x0->dim()) +
                                 "-dimensional, expected " +
                                 std::to_string(d.n()));
  return x0->mat();
}

void det_normalize(Eigen::MatrixXd& x) {
  const double ld = log_det(x);
  x *= std::exp(-ld / static_cast<double>(x.rows()));
}

double condition_number(const Eigen::MatrixXd& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    return std::numeric_limits<double>::infinity();
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (lmin <= 0.0) return std::numeric_limits<double>::infinity();
  return lmax / lmin;
}

// State recomputed at every accepted iterate.
struct IterateState {
  Eigen::MatrixXd minv;      // X^{-1}
  Eigen::MatrixXd pullback;  // sum_j p_j B_j^T (B_j X B_j^T)^{-1} B_j
  double f = 0.0;
  double residual = 0.0;
};

IterateState evaluate(const BLDatum& d, const Eigen::MatrixXd& x) {
  IterateState st;
  Eigen::LLT<Eigen::MatrixXd> llt(x);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefiniteError("solver iterate lost positive definiteness",
                                   detail::min_eigenvalue(x));
  st.minv = llt.solve(Eigen::MatrixXd::Identity(x.rows(), x.cols()));
  st.minv = 0.5 * (st.minv + st.minv.transpose());
  st.pullback = detail::gradient_pullback(d, x);
  st.f = detail::f_value(d, x);
  st.residual = (st.minv - st.pullback).norm() / st.minv.norm();
  return st;
}

void finalize(const BLDatum& d, SolveResult& result, const Eigen::MatrixXd& x,
              const IterateState& st) {
  result.log_bl = 0.5 * st.f;
  result.residual = st.residual;
  try {
    SpdMatrix xm(x);
    result.maximizer_a = extract_maximizer(d, xm);
    result.optimizer_x = std::move(xm);
  } catch (const Error&) {
    // A diverged or degenerate iterate may not round-trip SpdMatrix
    // validation; the scalar diagnostics above still stand.
    result.optimizer_x.reset();
    result.maximizer_a.clear();
  }
}

}  // namespace

double stationarity_residual(const BLDatum& d, const SpdMatrix& x) {
  if (x.dim() != d.n())
    throw DimensionMismatchError("stationarity_residual: X is " +
                                 std::to_string(x.dim()) +
                                 "-dimensional, expected " +
                                 std::to_string(d.n()));
  Eigen::LLT<Eigen::MatrixXd> llt(x.mat());
  Eigen::MatrixXd minv =
      llt.solve(Eigen::MatrixXd::Identity(d.n(), d.n()));
  minv = 0.5 * (minv + minv.transpose());
  return (minv - detail::gradient_pullback(d, x.mat())).norm() / minv.norm();
}

std::vector<SpdMatrix> extract_maximizer(const BLDatum& d,
                                         const SpdMatrix& x) {
  if (x.dim() != d.n())
    throw DimensionMismatchError("extract_maximizer: X is " +
                                 std::to_string(x.dim()) +
                                 "-dimensional, expected " +
                                 std::to_string(d.n()));
  std::vector<SpdMatrix> out;
  out.reserve(d.m());
  for (int j = 0; j < d.m(); ++j) {
    Eigen::MatrixXd pushed = d.map(j) * x.mat() * d.map(j).transpose();
    pushed = 0.5 * (pushed + pushed.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(pushed);
    if (llt.info() != Eigen::Success)
      throw NotPositiveDefiniteError(
          "extract_maximizer: B_j X B_j^T singular for map " +
              std::to_string(j),
          detail::min_eigenvalue(pushed));
    Eigen::MatrixXd aj = llt.solve(
        Eigen::MatrixXd::Identity(pushed.rows(), pushed.cols()));
    out.emplace_back(0.5 * (aj + aj.transpose()));
  }
  return out;
}

SolveResult solve_fixed_point(const BLDatum& d, const SolverConfig& cfg,
                              const std::optional<SpdMatrix>& x0) {
  require_scaling(d, "solve_fixed_point");
  SolveResult result;
  result.method = "fixed_point";

  Eigen::MatrixXd x = initial_iterate(d, x0);
  det_normalize(x);
  IterateState st = evaluate(d, x);
  result.trace.push_back({0, st.f, st.residual});
  result.converged = st.residual <= cfg.tol;

  double alpha = std::clamp(cfg.damping, kMinDamping, 1.0);
  int k = 0;
  while (!result.converged && !result.diverged && k < cfg.max_iter) {
    ++k;
    Eigen::MatrixXd x_next;
    IterateState st_next;
    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd m_next = (1.0 - alpha) * st.minv + alpha * st.pullback;
      m_next = 0.5 * (m_next + m_next.transpose());
      Eigen::LLT<Eigen::MatrixXd> llt(m_next);
      if (llt.info() == Eigen::Success) {
        x_next = llt.solve(Eigen::MatrixXd::Identity(d.n(), d.n()));
        x_next = 0.5 * (x_next + x_next.transpose());
        det_normalize(x_next);
        st_next = evaluate(d, x_next);
        if (std::isfinite(st_next.f) && st_next.f >= st.f - kMonotoneSlack) {
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
      if (alpha < kMinDamping) break;
    }
    if (!accepted) {
      --k;  // no iterate was produced
      break;
    }
    x = std::move(x_next);
    st = st_next;
    result.trace.push_back({k, st.f, st.residual});
    result.converged = st.residual <= cfg.tol;
    if (st.f > cfg.value_drift ||
        condition_number(x) > cfg.iterate_norm) {
      result.diverged = true;
      result.converged = false;
    }
  }

  result.iterations = k;
  finalize(d, result, x, st);
  return result;
}

SolveResult solve_geodesic_ascent(const BLDatum& d, const SolverConfig& cfg,
                                  const std::optional<SpdMatrix>& x0) {
  require_scaling(d, "solve_geodesic_ascent");
  SolveResult result;
  result.method = "geodesic_ascent";

  Eigen::MatrixXd x = initial_iterate(d, x0);
  det_normalize(x);
  IterateState st = evaluate(d, x);
  result.trace.push_back({0, st.f, st.residual});

  // Riemannian gradient in the symmetric gauge: S = X^{1/2} G X^{1/2},
  // whose Frobenius norm is the Riemannian gradient norm at X.
  const auto riemannian_parts =
      [&](const Eigen::MatrixXd& xc,
          const IterateState& stc) -> std::pair<Eigen::MatrixXd, double> {
    const Eigen::MatrixXd rx = detail::sym_pow(xc, 0.5);
    Eigen::MatrixXd s = rx * (stc.minv - stc.pullback) * rx;
    s = 0.5 * (s + s.transpose());
    return {s, s.squaredNorm()};
  };

  auto [s, g2] = riemannian_parts(x, st);
  const auto stationary = [&](const IterateState& stc, double g2c) {
    return std::sqrt(g2c) <= cfg.tol * (1.0 + std::abs(stc.f)) &&
           stc.residual <= cfg.tol;
  };
  result.converged = stationary(st, g2);

  double eta = std::max(cfg.step_size, 1e-16);
  int k = 0;
  while (!result.converged && !result.diverged && k < cfg.max_iter) {
    ++k;
    const Eigen::MatrixXd rx = detail::sym_pow(x, 0.5);
    const double noise = 1e-14 * (1.0 + std::abs(st.f));
    bool accepted = false;
    Eigen::MatrixXd x_next;
    IterateState st_next;

    Eigen::MatrixXd s_next;
    double g2_next = 0.0;

    if (cfg.step_rule == StepRule::FixedStep) {
      eta = cfg.step_size;
      Eigen::MatrixXd cand = rx * detail::sym_exp(eta * s) * rx;
      cand = 0.5 * (cand + cand.transpose());
      if (cand.allFinite()) {
        det_normalize(cand);
        x_next = cand;
        st_next = evaluate(d, x_next);
        accepted = std::isfinite(st_next.f);
      }
      if (!accepted) {
        result.diverged = true;
        --k;
        break;
      }
      std::tie(s_next, g2_next) = riemannian_parts(x_next, st_next);
    } else {
      // Backtracking Armijo search, allowed to grow between iterations.
      // Near the optimum the per-step objective gain ~ eta * g2 drops below
      // the evaluation noise and the Armijo comparison goes blind; there a
      // step is instead accepted when it contracts the gradient norm, which
      // stays accurately measurable long after objective differences drown.
      // Without that endgame rule the noise slack admits overshooting steps
      // and the gradient cycles at ~sqrt(noise) instead of converging.
      eta = std::min(eta / cfg.armijo_beta, 16.0);
      for (int bt = 0; bt <= kMaxBacktracks; ++bt) {
        Eigen::MatrixXd cand = rx * detail::sym_exp(eta * s) * rx;
        cand = 0.5 * (cand + cand.transpose());
        if (cand.allFinite()) {
          try {
            det_normalize(cand);
            IterateState st_cand = evaluate(d, cand);
            if (std::isfinite(st_cand.f)) {
              const double gain = st_cand.f - st.f - cfg.armijo_sigma * eta * g2;
              bool take = gain >= 0.0;
              if (!take && gain >= -noise) {
                std::tie(s_next, g2_next) = riemannian_parts(cand, st_cand);
                take = g2_next <= 0.98 * g2;
              }
              if (take) {
                if (g2_next == 0.0 && s_next.size() == 0)
                  std::tie(s_next, g2_next) = riemannian_parts(cand, st_cand);
                x_next = std::move(cand);
                st_next = st_cand;
                accepted = true;
                break;
              }
              s_next.resize(0, 0);
              g2_next = 0.0;
            }
          } catch (const NotPositiveDefiniteError&) {
            // fall through to backtrack
          }
        }
        eta *= cfg.armijo_beta;
      }
      if (!accepted) {
        --k;  // step size underflowed at a non-stationary point
        break;
      }
    }

    x = std::move(x_next);
    st = st_next;
    s = std::move(s_next);
    g2 = g2_next;
    result.trace.push_back({k, st.f, st.residual});
    result.converged = stationary(st, g2);
    if (st.f > cfg.value_drift ||
        condition_number(x) > cfg.iterate_norm) {
      result.diverged = true;
      result.converged = false;
    }
  }

  result.iterations = k;
  finalize(d, result, x, st);
  return result;
}

}  // namespace blgeo

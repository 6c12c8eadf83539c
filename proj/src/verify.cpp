#include "blgeo/verify.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace blgeo {

namespace detail {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

namespace {

PropertyReport new_report(const char* property, std::uint64_t seed,
                          double tolerance) {
  PropertyReport rep;
  rep.property = property;
  rep.seed = seed;
  rep.tolerance = tolerance;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  return rep;
}

void record(PropertyReport& rep, double margin) {
  ++rep.samples;
  if (margin < -rep.tolerance) ++rep.violations;
  rep.worst_margin = std::min(rep.worst_margin, margin);
}

void seal(PropertyReport& rep) {
  if (rep.samples == 0) rep.worst_margin = 0.0;
}

double lambda_min_normalized(const Eigen::MatrixXd& m, double scale) {
  return detail::min_eigenvalue(m) / (1.0 + scale);
}

}  // namespace

SpdSampler::SpdSampler(int dim, std::uint64_t seed, double condition_cap)
    : dim_(dim), seed_(seed), condition_cap_(condition_cap) {
  if (dim_ <= 0) throw DimensionMismatchError("SpdSampler: dim must be positive");
  if (condition_cap_ < 1.0)
    throw Error("SpdSampler: condition_cap must be >= 1");
}

SpdMatrix SpdSampler::sample(std::uint64_t index) const {
  std::mt19937_64 rng(detail::mix_seed(seed_, 2 * index));
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(dim_, dim_);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) g(r, c) = normal(rng);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(dim_, dim_);
  const Eigen::MatrixXd r =
      qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < dim_; ++c)
    if (r(c, c) < 0.0) q.col(c) = -q.col(c);

  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Eigen::VectorXd lambda(dim_);
  for (int i = 0; i < dim_; ++i)
    lambda(i) = std::pow(condition_cap_, 0.5 * uniform(rng));
  Eigen::MatrixXd x = q * lambda.asDiagonal() * q.transpose();
  return SpdMatrix(0.5 * (x + x.transpose()));
}

TangentMatrix SpdSampler::sample_tangent(std::uint64_t index) const {
  std::mt19937_64 rng(detail::mix_seed(seed_, 2 * index + 1));
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(dim_, dim_);
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) g(r, c) = normal(rng);
  return TangentMatrix(0.5 * (g + g.transpose()));
}

CongruenceMap::CongruenceMap(const Eigen::MatrixXd& m) : m_(m) {
  if (m_.rows() < 1 || m_.cols() < m_.rows())
    throw DimensionMismatchError(
        "CongruenceMap: matrix must have 1 <= rows <= cols, got " +
        std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()));
  if (numerical_rank(m_) < m_.rows())
    throw RankDeficientError(
        "CongruenceMap: matrix is not of full row rank", 0);
}

Eigen::MatrixXd CongruenceMap::apply(const Eigen::MatrixXd& x) const {
  if (x.rows() != m_.cols() || x.cols() != m_.cols())
    throw DimensionMismatchError("CongruenceMap::apply: argument is " +
                                 std::to_string(x.rows()) + "x" +
                                 std::to_string(x.cols()) + ", expected " +
                                 std::to_string(m_.cols()) + " square");
  Eigen::MatrixXd out = m_ * x * m_.transpose();
  return 0.5 * (out + out.transpose());
}

Eigen::MatrixXd CongruenceMap::apply(const SpdMatrix& x) const {
  return apply(x.mat());
}

PropertyReport check_ando(const CongruenceMap& phi, int samples,
                          std::uint64_t seed, double tolerance) {
  PropertyReport rep = new_report("ando", seed, tolerance);
  const SpdSampler sampler(static_cast<int>(phi.matrix().cols()), seed);
  for (int i = 0; i < samples; ++i) {
    const SpdMatrix p = sampler.sample(2 * i);
    const SpdMatrix q = sampler.sample(2 * i + 1);
    const Eigen::MatrixXd lhs = phi.apply(geometric_mean(p, q));
    const Eigen::MatrixXd rhs =
        geometric_mean(SpdMatrix(phi.apply(p)), SpdMatrix(phi.apply(q)))
            .mat();
    record(rep, lambda_min_normalized(rhs - lhs, lhs.norm() + rhs.norm()));
  }
  seal(rep);
  return rep;
}

PropertyReport check_joint_gm(const std::vector<Eigen::MatrixXd>& maps,
                              const std::vector<double>& weights, int samples,
                              std::uint64_t seed, double tolerance) {
  if (maps.empty() || maps.size() != weights.size())
    throw DimensionMismatchError(
        "check_joint_gm: need one positive weight per map");
  const Eigen::Index n = maps.front().cols();
  for (const auto& b : maps)
    if (b.cols() != n)
      throw DimensionMismatchError(
          "check_joint_gm: maps must share their column dimension");

  PropertyReport rep = new_report("joint_gm", seed, tolerance);
  std::vector<SpdSampler> samplers;
  for (std::size_t j = 0; j < maps.size(); ++j)
    samplers.emplace_back(static_cast<int>(maps[j].rows()),
                          detail::mix_seed(seed, 2000 + j));
  for (int i = 0; i < samples; ++i) {
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd sum_p = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd sum_q = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t j = 0; j < maps.size(); ++j) {
      const SpdMatrix pj = samplers[j].sample(2 * i);
      const SpdMatrix qj = samplers[j].sample(2 * i + 1);
      const Eigen::MatrixXd& b = maps[j];
      lhs.noalias() +=
          weights[j] * b.transpose() * geometric_mean(pj, qj).mat() * b;
      sum_p.noalias() += weights[j] * b.transpose() * pj.mat() * b;
      sum_q.noalias() += weights[j] * b.transpose() * qj.mat() * b;
    }
    lhs = 0.5 * (lhs + lhs.transpose());
    const Eigen::MatrixXd rhs =
        geometric_mean(SpdMatrix(0.5 * (sum_p + sum_p.transpose())),
                       SpdMatrix(0.5 * (sum_q + sum_q.transpose())))
            .mat();
    record(rep, lambda_min_normalized(rhs - lhs, lhs.norm() + rhs.norm()));
  }
  seal(rep);
  return rep;
}

PropertyReport check_joint_gm(const BLDatum& d, int samples,
                              std::uint64_t seed, double tolerance) {
  std::vector<double> weights;
  for (int j = 0; j < d.m(); ++j) weights.push_back(d.exponent_value(j));
  return check_joint_gm(d.maps(), weights, samples, seed, tolerance);
}

PropertyReport check_logdet_linearity(int dim, int samples,
                                      std::uint64_t seed, double tolerance) {
  PropertyReport rep = new_report("logdet_linearity", seed, tolerance);
  const SpdSampler sampler(dim, seed);
  for (int i = 0; i < samples; ++i) {
    const SpdMatrix p = sampler.sample(2 * i);
    const SpdMatrix q = sampler.sample(2 * i + 1);
    std::mt19937_64 trng(detail::mix_seed(seed, 0x10000000ULL + i));
    const double t =
        std::uniform_real_distribution<double>(0.0, 1.0)(trng);
    const double ldp = log_det(p);
    const double ldq = log_det(q);
    const double ldmid = log_det(geodesic(p, q, t));
    const double err = std::abs(ldmid - ((1.0 - t) * ldp + t * ldq));
    record(rep, -err / (1.0 + std::abs(ldp) + std::abs(ldq)));
  }
  seal(rep);
  return rep;
}

PropertyReport check_bl_concavity(const BLDatum& d, int samples,
                                  std::uint64_t seed, double tolerance) {
  PropertyReport rep = new_report("bl_concavity", seed, tolerance);
  const SpdSampler xs(d.n(), seed);
  std::vector<SpdSampler> block_samplers;
  for (int j = 0; j < d.m(); ++j)
    block_samplers.emplace_back(d.map_rows(j),
                                detail::mix_seed(seed, 1000 + j));
  for (int i = 0; i < samples; ++i) {
    const SpdMatrix p = xs.sample(2 * i);
    const SpdMatrix q = xs.sample(2 * i + 1);
    const double fp = f_objective(d, p);
    const double fq = f_objective(d, q);
    const double fmid = f_objective(d, geometric_mean(p, q));
    const double margin_f =
        (fmid - 0.5 * (fp + fq)) / (1.0 + std::abs(fp) + std::abs(fq));

    GaussianTuple a, b, mid;
    for (int j = 0; j < d.m(); ++j) {
      a.blocks.push_back(block_samplers[j].sample(2 * i));
      b.blocks.push_back(block_samplers[j].sample(2 * i + 1));
      mid.blocks.push_back(geometric_mean(a.blocks[j], b.blocks[j]));
    }
    const double la = log_bl_objective(d, a);
    const double lb = log_bl_objective(d, b);
    const double lmid = log_bl_objective(d, mid);
    const double margin_l =
        (lmid - 0.5 * (la + lb)) / (1.0 + std::abs(la) + std::abs(lb));

    record(rep, std::min(margin_f, margin_l));
  }
  seal(rep);
  return rep;
}

PropertyReport check_capacity_convexity(const KrausSet& k, int samples,
                                        std::uint64_t seed,
                                        double tolerance) {
  PropertyReport rep = new_report("capacity_convexity", seed, tolerance);
  const SpdSampler sampler(k.input_dim, seed);
  for (int i = 0; i < samples; ++i) {
    const SpdMatrix p = sampler.sample(2 * i);
    const SpdMatrix q = sampler.sample(2 * i + 1);
    const double hp = log_det(k.apply(p.mat()));
    const double hq = log_det(k.apply(q.mat()));
    const double hmid = log_det(k.apply(geometric_mean(p, q).mat()));
    record(rep, (0.5 * (hp + hq) - hmid) /
                    (1.0 + std::abs(hp) + std::abs(hq)));
  }
  seal(rep);
  return rep;
}

PropertyReport check_gm_maximal(int dim, int samples, std::uint64_t seed,
                                double tolerance) {
  PropertyReport rep = new_report("gm_maximal", seed, tolerance);
  const SpdSampler sampler(dim, seed);
  for (int i = 0; i < samples; ++i) {
    const SpdMatrix p = sampler.sample(2 * i);
    const SpdMatrix q = sampler.sample(2 * i + 1);
    const Eigen::MatrixXd g = geometric_mean(p, q).mat();
    Eigen::MatrixXd block(2 * dim, 2 * dim);
    block << p.mat(), g, g, q.mat();
    record(rep, lambda_min_normalized(block, block.norm()));
  }
  seal(rep);
  return rep;
}

PropertyReport check_gm_block_transfer(const CongruenceMap& phi, int samples,
                                       std::uint64_t seed, double tolerance) {
  PropertyReport rep = new_report("gm_block_transfer", seed, tolerance);
  const int dim = static_cast<int>(phi.matrix().cols());
  const int out = static_cast<int>(phi.matrix().rows());
  const SpdSampler sampler(dim, seed);
  for (int i = 0; i < samples; ++i) {
    const SpdMatrix p = sampler.sample(2 * i);
    const SpdMatrix q = sampler.sample(2 * i + 1);
    const Eigen::MatrixXd g = geometric_mean(p, q).mat();
    Eigen::MatrixXd block(2 * out, 2 * out);
    block << phi.apply(p), phi.apply(g), phi.apply(g), phi.apply(q);
    record(rep, lambda_min_normalized(block, block.norm()));
  }
  seal(rep);
  return rep;
}

double gradient_fd_relative_error(const BLDatum& d, const SpdMatrix& x,
                                  const TangentMatrix& q,
                                  double analytic_directional) {
  if (x.dim() != d.n() || q.dim() != d.n())
    throw DimensionMismatchError(
        "gradient_fd_relative_error: operand dimensions do not match datum");
  const double qnorm = q.mat().norm();
  if (qnorm == 0.0) return 0.0;
  const double h = 1e-5 * x.mat().norm() / qnorm;
  const double fp = detail::f_value(d, x.mat() + h * q.mat());
  const double fm = detail::f_value(d, x.mat() - h * q.mat());
  const double fd = (fp - fm) / (2.0 * h);
  return std::abs(fd - analytic_directional) /
         (1.0 + std::abs(analytic_directional));
}

PropertyReport check_gradient_fd(const BLDatum& d, int samples,
                                 std::uint64_t seed, double tolerance) {
  PropertyReport rep = new_report("gradient_fd", seed, tolerance);
  // Central differences carry an O(h^2) truncation error that grows with
  // the cube of ||X^{-1}Q||, so the step pinned to 1e-5 ||X||_F / ||Q||_F
  // meets a 1e-6 relative tolerance only on modestly conditioned X.
  const SpdSampler sampler(d.n(), seed, 10.0);
  for (int i = 0; i < samples; ++i) {
    const SpdMatrix x = sampler.sample(i);
    const TangentMatrix q = sampler.sample_tangent(i);
    const TangentMatrix g = f_euclidean_gradient(d, x);
    const double analytic = (g.mat() * q.mat()).trace();
    record(rep, -gradient_fd_relative_error(d, x, q, analytic));
  }
  seal(rep);
  return rep;
}

std::vector<PropertyReport> run_property_suite(const std::optional<BLDatum>& d,
                                               int samples,
                                               std::uint64_t seed,
                                               double tolerance) {
  std::vector<PropertyReport> out;

  // Fixed 3 -> 2 congruence drawn from the seed; resampled in the
  // measure-zero event of rank deficiency.
  std::mt19937_64 rng(detail::mix_seed(seed, 0x77));
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(2, 3);
  do {
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = normal(rng);
  } while (numerical_rank(m) < 2);
  const CongruenceMap phi(m);

  out.push_back(check_ando(phi, samples, seed, tolerance));
  if (d) {
    out.push_back(check_joint_gm(*d, samples, seed, tolerance));
  } else {
    // Generic jointly linear map: a coordinate row plus the suite's
    // congruence, which together have no common kernel.
    Eigen::MatrixXd row(1, 3);
    row << 1.0, 0.0, 0.0;
    out.push_back(
        check_joint_gm({row, m}, {1.0, 1.0}, samples, seed, tolerance));
  }
  out.push_back(check_logdet_linearity(3, samples, seed, tolerance));
  out.push_back(check_gm_maximal(3, samples, seed, tolerance));
  out.push_back(check_gm_block_transfer(phi, samples, seed, tolerance));

  if (d) {
    out.push_back(check_bl_concavity(*d, samples, seed, tolerance));
    try {
      const KrausSet k = build_scaling_operator(*d);
      out.push_back(check_capacity_convexity(k, samples, seed, tolerance));
    } catch (const DimensionCapExceededError&) {
      // Lifted dimension too large for the randomized check; skipped.
    } catch (const ScalingViolationError&) {
      // The reduction needs the exact scaling identity; skipped.
    }
    out.push_back(check_gradient_fd(*d, samples, seed));
  }
  return out;
}

}  // namespace blgeo

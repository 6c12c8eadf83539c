#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "blgeo/solvers.hpp"
#include "blgeo/verify.hpp"

using blgeo::BLDatum;
using blgeo::CongruenceMap;
using blgeo::PropertyReport;
using blgeo::Rational;
using blgeo::SpdMatrix;
using blgeo::SpdSampler;

namespace {

Eigen::MatrixXd row(double a, double b) {
  Eigen::MatrixXd m(1, 2);
  m << a, b;
  return m;
}

BLDatum young() {
  return BLDatum(2, {row(1, 0), row(0, 1), row(1, 1)},
                 {Rational(2, 3), Rational(2, 3), Rational(2, 3)});
}

}  // namespace

TEST_CASE("seed mixing separates streams") {
  const auto a = blgeo::detail::mix_seed(1, 0);
  const auto b = blgeo::detail::mix_seed(1, 1);
  const auto c = blgeo::detail::mix_seed(2, 0);
  CHECK(a != b);
  CHECK(a != c);
  CHECK(a == blgeo::detail::mix_seed(1, 0));
}

TEST_CASE("sampler is deterministic and respects its condition cap") {
  const SpdSampler s1(3, 17);
  const SpdSampler s2(3, 17);
  CHECK(s1.sample(5).mat() == s2.sample(5).mat());
  CHECK(s1.sample_tangent(5).mat() == s2.sample_tangent(5).mat());
  CHECK(s1.sample(0).mat() != s1.sample(1).mat());

  const SpdSampler other(3, 18);
  CHECK(s1.sample(5).mat() != other.sample(5).mat());

  for (const double cap : {1e2, 1e4}) {
    const SpdSampler s(4, 23, cap);
    for (int i = 0; i < 20; ++i) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.sample(i).mat());
      const double lo = eig.eigenvalues().minCoeff();
      const double hi = eig.eigenvalues().maxCoeff();
      CHECK(lo >= 1.0 / std::sqrt(cap) * (1.0 - 1e-10));
      CHECK(hi <= std::sqrt(cap) * (1.0 + 1e-10));
    }
  }
}

TEST_CASE("congruence maps require full row rank") {
  CHECK_NOTHROW(CongruenceMap{Eigen::MatrixXd::Identity(2, 2)});
  Eigen::MatrixXd wide(2, 3);
  wide << 1, 0, 1, 0, 1, 0;
  CHECK_NOTHROW(CongruenceMap{wide});

  Eigen::MatrixXd flat(2, 2);
  flat << 1, 1, 1, 1;
  CHECK_THROWS_AS(CongruenceMap{flat}, blgeo::RankDeficientError);
  CHECK_THROWS_AS(CongruenceMap{Eigen::MatrixXd::Identity(3, 2)},
                  blgeo::DimensionMismatchError);

  const CongruenceMap phi(wide);
  const SpdMatrix x = SpdSampler(3, 5).sample(0);
  CHECK((phi.apply(x) - phi.matrix() * x.mat() * phi.matrix().transpose())
            .norm() <= 1e-15);
}

TEST_CASE("mean inequality under congruence holds on random pairs") {
  Eigen::MatrixXd m(2, 3);
  m << 1, 2, 0, 0, 1, -1;
  const PropertyReport r = blgeo::check_ando(CongruenceMap(m), 200, 5);
  CHECK(r.property == "ando");
  CHECK(r.samples == 200);
  CHECK(r.violations == 0);
  CHECK(r.seed == 5);
  CHECK(r.tolerance == 1e-9);

  // Equality cases: an invertible congruence maps the mean to the mean, so
  // the margin sits at zero within roundoff rather than strictly inside.
  const PropertyReport eq =
      blgeo::check_ando(CongruenceMap(Eigen::MatrixXd::Identity(3, 3)), 100, 7);
  CHECK(eq.violations == 0);
  CHECK(std::abs(eq.worst_margin) <= 1e-10);
}

TEST_CASE("reports are reproducible") {
  Eigen::MatrixXd m(2, 3);
  m << 1, 0, 2, -1, 1, 0;
  const PropertyReport a = blgeo::check_ando(CongruenceMap(m), 50, 123);
  const PropertyReport b = blgeo::check_ando(CongruenceMap(m), 50, 123);
  CHECK(a.violations == b.violations);
  CHECK(a.worst_margin == b.worst_margin);

  const PropertyReport c = blgeo::check_logdet_linearity(3, 50, 11);
  const PropertyReport d = blgeo::check_logdet_linearity(3, 50, 11);
  CHECK(c.worst_margin == d.worst_margin);
}

TEST_CASE("joint mean transfer on maps and on a datum") {
  const PropertyReport r = blgeo::check_joint_gm(
      {row(1, 0), row(0, 1), row(1, 1)}, {0.5, 0.5, 0.5}, 150, 9);
  CHECK(r.property == "joint_gm");
  CHECK(r.violations == 0);

  const PropertyReport s = blgeo::check_joint_gm(young(), 150, 9);
  CHECK(s.violations == 0);
}

TEST_CASE("log det linearity and mean maximality") {
  CHECK(blgeo::check_logdet_linearity(3, 200, 21).violations == 0);

  const PropertyReport r = blgeo::check_gm_maximal(3, 200, 31);
  CHECK(r.property == "gm_maximal");
  CHECK(r.violations == 0);

  Eigen::MatrixXd m(2, 3);
  m << 0, 1, 1, 1, 0, 2;
  CHECK(blgeo::check_gm_block_transfer(CongruenceMap(m), 200, 41).violations ==
        0);
}

TEST_CASE("objective concavity and capacity convexity on the triple") {
  const BLDatum d = young();
  CHECK(blgeo::check_bl_concavity(d, 100, 51).violations == 0);
  const blgeo::KrausSet k = blgeo::build_scaling_operator(d);
  CHECK(blgeo::check_capacity_convexity(k, 100, 61).violations == 0);
}

TEST_CASE("finite differences confirm the gradient and expose sabotage") {
  const BLDatum d = young();
  CHECK(blgeo::check_gradient_fd(d, 100, 71).violations == 0);

  const SpdSampler xs(2, 81, 10.0);
  const SpdMatrix x = xs.sample(0);
  const blgeo::TangentMatrix q = xs.sample_tangent(0);
  const Eigen::MatrixXd g = blgeo::f_euclidean_gradient(d, x).mat();
  const double analytic = (g * q.mat()).trace();

  CHECK(blgeo::gradient_fd_relative_error(d, x, q, analytic) <= 1e-6);
  // A wrong directional value must trip the check loudly.
  CHECK(blgeo::gradient_fd_relative_error(d, x, q, -analytic) > 1e-3);
  CHECK(blgeo::gradient_fd_relative_error(d, x, q, analytic + 1.0) > 1e-3);
}

TEST_CASE("inequalities survive badly conditioned inputs at looser tolerance") {
  // Margins are scale-normalized, so condition 1e8 pairs stay above a 1e-6
  // floor even though absolute eigenvalue error grows.
  const SpdSampler s(3, 91, 1e8);
  Eigen::MatrixXd m(2, 3);
  m << 1, 1, 0, 0, 1, 1;
  const CongruenceMap phi(m);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const SpdMatrix p = s.sample(2 * i);
    const SpdMatrix q = s.sample(2 * i + 1);
    const Eigen::MatrixXd lhs = phi.apply(blgeo::geometric_mean(p, q));
    const Eigen::MatrixXd rhs = blgeo::geometric_mean(
        SpdMatrix(phi.apply(p)), SpdMatrix(phi.apply(q))).mat();
    const Eigen::MatrixXd gap = rhs - lhs;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gap);
    const double margin =
        eig.eigenvalues().minCoeff() / (1.0 + lhs.norm() + rhs.norm());
    worst = std::min(worst, margin);
  }
  CHECK(worst >= -1e-6);
}

TEST_CASE("zero samples yield a sealed empty report") {
  const PropertyReport r =
      blgeo::check_ando(CongruenceMap(Eigen::MatrixXd::Identity(2, 2)), 0, 1);
  CHECK(r.samples == 0);
  CHECK(r.violations == 0);
  CHECK(r.worst_margin == 0.0);
}

TEST_CASE("suite composition tracks the datum") {
  const auto with = blgeo::run_property_suite(young(), 10, 3);
  const auto without = blgeo::run_property_suite(std::nullopt, 10, 3);
  CHECK(with.size() == 8);
  CHECK(without.size() == 5);
  for (const auto& rep : with) {
    CHECK(rep.samples == 10);
    CHECK(rep.violations == 0);
  }
  CHECK(with[0].property == "ando");
  CHECK(with[5].property == "bl_concavity");
  CHECK(with[6].property == "capacity_convexity");
  CHECK(with[7].property == "gradient_fd");
  // The gradient check carries its own tolerance; the rest share one.
  CHECK(with[7].tolerance == 1e-6);
  CHECK(with[0].tolerance == 1e-9);
}

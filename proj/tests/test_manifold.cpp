#include "gmc/manifold.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace gmc;
using gmc::testing::random_point;

namespace {

// Projector onto the tangent space at Q built from an explicit basis of the
// normal space {Q S : S symmetric}.
Eigen::MatrixXd brute_force_stiefel_projector(const ManifoldSpec& m, const Eigen::VectorXd& q) {
  const int p = m.rows(), k = m.cols();
  const Eigen::Map<const Eigen::MatrixXd> frame(q.data(), p, k);
  Eigen::MatrixXd normals(p * k, k * (k + 1) / 2);
  int col = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(k, k);
      s(i, j) = s(j, i) = 1.0;
      const Eigen::MatrixXd n = frame * s;
      normals.col(col++) = Eigen::Map<const Eigen::VectorXd>(n.data(), n.size());
    }
  }
  const Eigen::MatrixXd gram = normals.transpose() * normals;
  return Eigen::MatrixXd::Identity(p * k, p * k) - normals * gram.inverse() * normals.transpose();
}

}  // namespace

TEST_CASE("manifold dimensions") {
  CHECK(ManifoldSpec::sphere(2).ambient_dim() == 3);
  CHECK(ManifoldSpec::sphere(2).intrinsic_dim() == 2);
  CHECK(ManifoldSpec::stiefel(2, 5).ambient_dim() == 10);
  CHECK(ManifoldSpec::stiefel(2, 5).intrinsic_dim() == 7);
  CHECK(ManifoldSpec::stiefel(1, 3).intrinsic_dim() == 2);
  CHECK(ManifoldSpec::so3().intrinsic_dim() == 3);
  CHECK(ManifoldSpec::so3().ambient_dim() == 4);
  CHECK(ManifoldSpec::simplex(3).ambient_dim() == 4);
  CHECK(ManifoldSpec::ball(3).ambient_dim() == 4);
  CHECK_THROWS_AS(ManifoldSpec::stiefel(4, 3), ParameterError);
  CHECK_THROWS_AS(ManifoldSpec::sphere(0), ParameterError);
}

TEST_CASE("projection removes the radial component") {
  const auto m = ManifoldSpec::sphere(1);
  const Eigen::VectorXd p = project_to_tangent(m, Eigen::Vector2d(1, 0), Eigen::Vector2d(3, 4));
  CHECK(p(0) == 0.0);
  CHECK(p(1) == 4.0);
}

TEST_CASE("projection is idempotent and linear") {
  Rng rng(11);
  for (const auto& m : {ManifoldSpec::sphere(3), ManifoldSpec::stiefel(2, 4), ManifoldSpec::stiefel(3, 3),
                        ManifoldSpec::so3()}) {
    CAPTURE(m.name());
    const Eigen::VectorXd q = random_point(m, rng);
    const Eigen::VectorXd w1 = standard_normal(m.ambient_dim(), rng);
    const Eigen::VectorXd w2 = standard_normal(m.ambient_dim(), rng);
    const Eigen::VectorXd p1 = project_to_tangent(m, q, w1);
    CHECK((project_to_tangent(m, q, p1) - p1).norm() < 1e-14);
    CHECK(tangency_error(m, q, p1) < 1e-14);
    const Eigen::VectorXd combo = project_to_tangent(m, q, 2.0 * w1 - 3.0 * w2);
    CHECK((combo - (2.0 * p1 - 3.0 * project_to_tangent(m, q, w2))).norm() < 1e-13);
  }
}

TEST_CASE("stiefel(1,3) projection matches the dense projector I - qqᵀ") {
  Rng rng(5);
  const auto m = ManifoldSpec::stiefel(1, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd q = random_point(m, rng);
    const Eigen::VectorXd w = standard_normal(3, rng);
    const Eigen::Matrix3d dense = Eigen::Matrix3d::Identity() - q * q.transpose();
    CHECK((project_to_tangent(m, q, w) - dense * w).norm() < 1e-14);
  }
}

TEST_CASE("stiefel projection matches the normal-space projector") {
  Rng rng(6);
  for (const auto& m : {ManifoldSpec::stiefel(2, 4), ManifoldSpec::stiefel(3, 5)}) {
    const Eigen::VectorXd q = random_point(m, rng);
    const Eigen::MatrixXd oracle = brute_force_stiefel_projector(m, q);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd w = standard_normal(m.ambient_dim(), rng);
      CHECK((project_to_tangent(m, q, w) - oracle * w).norm() < 1e-12);
    }
  }
}

TEST_CASE("invalid points are rejected") {
  const auto m = ManifoldSpec::sphere(2);
  CHECK_THROWS_AS(project_to_tangent(m, Eigen::Vector3d(1, 1e-6, 0) * 1.001, Eigen::Vector3d(0, 1, 0)),
                  InvalidPointError);
  CHECK_THROWS_AS(project_to_tangent(m, Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)), DimensionError);
  CHECK_NOTHROW(project_to_tangent(m, Eigen::Vector3d(1 + 5e-9, 0, 0), Eigen::Vector3d(0, 1, 0)));
  const auto frame = ManifoldSpec::stiefel(2, 3);
  Eigen::VectorXd q(6);
  q << 1, 0, 0, 1, 0, 0;  // columns are parallel
  CHECK_THROWS_AS(project_to_tangent(frame, q, q), InvalidPointError);
}

TEST_CASE("barbell has no embedded geometry") {
  const auto m = ManifoldSpec::barbell();
  CHECK_THROWS_AS(project_to_tangent(m, Eigen::Vector3d(0, 1, 0), Eigen::Vector3d(1, 0, 0)),
                  NotImplementedError);
}

TEST_CASE("retraction lands on the manifold") {
  Rng rng(8);
  const auto m = ManifoldSpec::stiefel(3, 6);
  const Eigen::VectorXd q = random_point(m, rng);
  const Eigen::VectorXd noisy = q + 1e-4 * standard_normal(m.ambient_dim(), rng);
  const Eigen::VectorXd fixed = retract_point(m, noisy);
  CHECK(constraint_error(m, fixed) < 1e-14);
  CHECK((fixed - q).norm() < 1e-3);
  // An exact frame is a fixed point up to roundoff.
  CHECK((retract_point(m, q) - q).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("tangent gaussian has the projector covariance") {
  const auto m = ManifoldSpec::sphere(2);
  const Eigen::Vector3d q = Eigen::Vector3d(1, 2, 2) / 3.0;
  Rng rng(2024);
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d v = sample_tangent_gaussian(m, q, rng);
    REQUIRE(tangency_error(m, q, v) < 1e-14);
    cov += v * v.transpose();
  }
  cov /= n;
  const Eigen::Matrix3d expected = Eigen::Matrix3d::Identity() - q * q.transpose();
  CHECK((cov - expected).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("tangent gaussian is deterministic given the seed") {
  const auto m = ManifoldSpec::stiefel(2, 4);
  Rng seed_rng(3);
  const Eigen::VectorXd q = random_point(m, seed_rng);
  Rng a(99), b(99);
  const Eigen::VectorXd va = sample_tangent_gaussian(m, q, a);
  const Eigen::VectorXd vb = sample_tangent_gaussian(m, q, b);
  CHECK(va == vb);
  CHECK(tangency_error(m, q, va) < 1e-14);
}

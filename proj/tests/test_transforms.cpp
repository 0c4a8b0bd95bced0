#include "gmc/transforms.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace gmc;
using namespace gmc::testing;

TEST_CASE("ball to sphere") {
  CHECK(ball_to_sphere(Eigen::Vector3d::Zero(), 1) == Eigen::VectorXd(Eigen::Vector4d(0, 0, 0, 1)));
  CHECK((ball_to_sphere(Eigen::Vector2d(0.6, 0), -1) - Eigen::Vector3d(0.6, 0, -0.8)).norm() < 1e-15);
  CHECK(ball_to_sphere(Eigen::Vector2d(0.6, 0.8), 1)(2) == 0.0);
  CHECK_THROWS_AS(ball_to_sphere(Eigen::Vector2d(0.8, 0.8), 1), DomainError);
  CHECK_THROWS_AS(ball_to_sphere(Eigen::Vector2d(0.1, 0.1), 0), ParameterError);
}

TEST_CASE("ball round trip") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd theta = standard_normal(3, rng);
    theta *= uniform01(rng) / theta.norm();
    const int sign = i % 2 ? 1 : -1;
    const Eigen::VectorXd q = ball_to_sphere(theta, sign);
    CHECK(std::abs(q.norm() - 1.0) < 1e-15);
    CHECK((sphere_to_ball(q) - theta).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("sphere to simplex") {
  const auto vertex = sphere_to_simplex(Eigen::Vector3d(1, 0, 0));
  CHECK(vertex.x == Eigen::VectorXd(Eigen::Vector3d(1, 0, 0)));
  CHECK(vertex.log_correction == -std::numeric_limits<double>::infinity());

  const auto mid = sphere_to_simplex(Eigen::Vector2d(1, 1) / std::sqrt(2.0));
  CHECK((mid.x - Eigen::Vector2d(0.5, 0.5)).norm() < 1e-15);
  CHECK(mid.log_correction == doctest::Approx(2 * std::log(std::sqrt(2.0))));

  const Eigen::Vector3d q = Eigen::Vector3d(0.2, -0.7, 0.4).normalized();
  const auto pt = sphere_to_simplex(q);
  CHECK(pt.x.sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pt.log_correction == doctest::Approx(std::log(8 * std::abs(q(0) * q(1) * q(2)))));
}

TEST_CASE("uniform sphere pushes forward to Dirichlet(1/2)") {
  Rng rng(2);
  const int n = 4000;
  const Eigen::VectorXd alpha = Eigen::VectorXd::Constant(4, 0.5);
  Eigen::MatrixXd pushed(n, 4);
  for (int i = 0; i < n; ++i) pushed.row(i) = sphere_to_simplex(standard_normal(4, rng).normalized()).x.transpose();
  const Eigen::MatrixXd reference = dirichlet_gamma_ratio(alpha, n, rng);
  for (int j = 0; j < 4; ++j) CHECK(ks_two_sample(column(pushed, j), column(reference, j)).p_value > 0.01);
}

TEST_CASE("quaternion rotations are orthogonal with unit determinant") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector4d q = standard_normal(4, rng).normalized();
    const Eigen::Matrix3d r = quaternion_to_rotation(q);
    CHECK((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(r.determinant() == doctest::Approx(1.0));
    CHECK((quaternion_to_rotation(Eigen::Vector4d(-q)) - r).norm() < 1e-15);
  }
  // Rotation by π/2 about z takes e_x to e_y.
  const Eigen::Vector4d qz(std::cos(std::numbers::pi / 4), 0, 0, std::sin(std::numbers::pi / 4));
  CHECK((quaternion_to_rotation(qz) * Eigen::Vector3d(1, 0, 0) - Eigen::Vector3d(0, 1, 0)).norm() < 1e-15);
}

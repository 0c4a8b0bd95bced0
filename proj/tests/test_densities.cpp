#include "gmc/densities.hpp"
#include "gmc/target.hpp"
#include "gmc/transforms.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace gmc;
using namespace gmc::testing;

namespace {

FisherBinghamParams<double> random_fb(int p, Rng& rng) {
  return {standard_normal(p, rng), random_symmetric(p, 1.0, rng)};
}

/// Direct rotation matrix of a unit quaternion (w, x, y, z), written out
/// independently of the library's quadratic form.
Eigen::Matrix3d rotation_oracle(const Eigen::Vector4d& q) {
  const double w = q(0), x = q(1), y = q(2), z = q(3);
  Eigen::Matrix3d r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

}  // namespace

TEST_CASE("fisher-bingham: uniform case is flat") {
  const FisherBinghamParams<double> params{Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Zero(4, 4)};
  Rng rng(1);
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd x = standard_normal(4, rng).normalized();
    CHECK(log_density_fb(params, x) == 0.0);
    CHECK(grad_fb(params, x).norm() == 0.0);
  }
}

TEST_CASE("fisher-bingham: gradient matches finite differences") {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 2 + trial % 5;
    const auto params = random_fb(p, rng);
    const Eigen::VectorXd x = standard_normal(p, rng).normalized();
    const auto f = [&](const Eigen::VectorXd& y) { return log_density_fb(params, y); };
    CHECK(relative_error(grad_fb(params, x), finite_difference_gradient(f, x)) < 1e-6);
  }
}

TEST_CASE("fisher-bingham: shift invariance A -> A + aI") {
  Rng rng(3);
  const auto params = random_fb(5, rng);
  auto shifted = params;
  shifted.A += 3.0 * Eigen::MatrixXd::Identity(5, 5);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd x = standard_normal(5, rng).normalized();
    CHECK(log_density_fb(shifted, x) - log_density_fb(params, x) == doctest::Approx(3.0).epsilon(1e-13));
  }
}

TEST_CASE("fisher-bingham: validation") {
  FisherBinghamParams<double> bad{Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Zero(3, 3)};
  bad.A(0, 1) = 1.0;
  CHECK_THROWS_AS(validate(bad), ParameterError);
  const FisherBinghamParams<double> mismatched{Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Zero(4, 4)};
  CHECK_THROWS_AS(validate(mismatched), DimensionError);
  const FisherBinghamParams<double> ok{Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Zero(3, 3)};
  CHECK_THROWS_AS(log_density_fb(ok, Eigen::Vector4d(1, 0, 0, 0)), DimensionError);
}

TEST_CASE("gaussian equivalent: A = 0 closed form") {
  const Eigen::VectorXd c = (Eigen::VectorXd(5) << 1, -2, 0.5, 3, 0).finished();
  const auto g = gaussian_equivalent(FisherBinghamParams<double>{c, Eigen::MatrixXd::Zero(5, 5)});
  CHECK(g.a == doctest::Approx(-2.5).epsilon(1e-12));
  CHECK((g.sigma - Eigen::MatrixXd::Identity(5, 5) / 5.0).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((g.mu - c / 5.0).norm() < 1e-12);
}

TEST_CASE("gaussian equivalent: random symmetric A") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 2 + trial % 6;
    const auto params = random_fb(p, rng);
    const auto g = gaussian_equivalent(params);
    CHECK(std::abs(g.sigma.trace() - 1.0) < 1e-10);

    const Eigen::MatrixXd shifted = params.A + g.a * Eigen::MatrixXd::Identity(p, p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(shifted);
    CHECK(eig.eigenvalues().maxCoeff() < 0.0);
    CHECK((-0.5 * g.sigma.inverse() - shifted).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((g.mu - (-0.5 * shifted.inverse() * params.c)).norm() < 1e-8);
    CHECK(Eigen::LLT<Eigen::MatrixXd>(g.sigma).info() == Eigen::Success);
  }
}

TEST_CASE("barbell surface density") {
  const BarbellParams<double> params{1.0, 2.0, 4.0};
  CHECK(log_surface_density_barbell(params, 0.0) == doctest::Approx(0.0));
  CHECK(log_surface_density_barbell(params, 2.0) == doctest::Approx(0.0));
  CHECK(log_surface_density_barbell(params, -2.0) == doctest::Approx(0.0));
  CHECK(log_surface_density_barbell(params, 3.0) == doctest::Approx(std::log(std::pow(std::cosh(1.0), 2))));
  CHECK(log_surface_density_barbell(params, 3.0) == doctest::Approx(0.8675616609660544).epsilon(1e-14));

  const BarbellParams<double> wide{0.7, 1.0, 3.0};
  CHECK(log_surface_density_barbell(wide, 0.3) == doctest::Approx(std::log(0.7)));
  for (double x : {0.1, 1.5, 2.9}) {
    CHECK(log_surface_density_barbell(wide, x) == log_surface_density_barbell(wide, -x));
  }
  // Continuous at the seam.
  CHECK(std::abs(log_surface_density_barbell(wide, 1.0 + 1e-9) - log_surface_density_barbell(wide, 1.0 - 1e-9)) <
        1e-8);
  CHECK_THROWS_AS(log_surface_density_barbell(params, 4.5), DomainError);
  CHECK_THROWS_AS(validate(BarbellParams<double>{0.0, 1.0, 2.0}), ParameterError);
  CHECK_THROWS_AS(validate(BarbellParams<double>{1.0, 2.0, 2.0}), ParameterError);
}

TEST_CASE("barbell embedding") {
  const BarbellParams<double> params{1.0, 2.0, 4.0};
  CHECK((barbell_embed(params, 0.0, 0.0) - Eigen::Vector3d(0, 1, 0)).norm() < 1e-15);
  CHECK((barbell_embed(params, 0.0, std::numbers::pi / 2) - Eigen::Vector3d(0, 0, 1)).norm() < 1e-15);
  CHECK((barbell_embed(params, 3.0, 0.0) - Eigen::Vector3d(3, 1.5430806348152437, 0)).norm() < 1e-14);
  const Eigen::Vector3d p = barbell_embed(params, -3.5, 1.2);
  CHECK(p.tail<2>().norm() == doctest::Approx(std::cosh(1.5)));
  CHECK_THROWS_AS(barbell_embed(params, 5.0, 0.0), DomainError);
}

TEST_CASE("barbell surface density equals the parametrization's area element") {
  // sqrt(det(DBᵀDB)) computed from numerical partial derivatives of B.
  const BarbellParams<double> params{0.8, 1.5, 3.0};
  for (double x : {-2.7, -1.6, -0.4, 0.9, 2.2}) {
    const double h = 1e-6, theta = 0.7;
    const Eigen::Vector3d bx = (barbell_embed(params, x + h, theta) - barbell_embed(params, x - h, theta)) / (2 * h);
    const Eigen::Vector3d bt = (barbell_embed(params, x, theta + h) - barbell_embed(params, x, theta - h)) / (2 * h);
    const double area = std::sqrt(bx.squaredNorm() * bt.squaredNorm() - std::pow(bx.dot(bt), 2));
    // The area element is f·sqrt(1 + f'^2) = r cosh^2 off the bar.
    CHECK(area == doctest::Approx(surface_density_barbell(params, x)).epsilon(1e-6));
  }
}

TEST_CASE("matrix fisher to bingham") {
  CHECK(matrix_fisher_to_bingham(MatrixFisherParams<double>{Eigen::Matrix3d::Zero()}).isZero());

  const Eigen::Matrix4d a = matrix_fisher_to_bingham(MatrixFisherParams<double>{Eigen::Matrix3d::Identity()});
  Eigen::Matrix4d expected = -Eigen::Matrix4d::Identity();
  expected(0, 0) += 4.0;
  CHECK((a - expected).cwiseAbs().maxCoeff() < 1e-15);

  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::Matrix3d f;
    for (int i = 0; i < 9; ++i) f(i) = standard_normal(1, rng)(0) * 3.0;
    const Eigen::Matrix4d am = matrix_fisher_to_bingham(MatrixFisherParams<double>{f});
    CHECK((am - am.transpose()).norm() == 0.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Eigen::Vector4d x = standard_normal(4, rng).normalized();
      worst = std::max(worst, std::abs(x.dot(am * x) - (f.transpose() * rotation_oracle(x)).trace()));
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("dirichlet on the sphere") {
  const DirichletParams<double> half{Eigen::VectorXd::Constant(4, 0.5)};
  Rng rng(6);
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd q = standard_normal(4, rng).normalized();
    CHECK(log_density_dirichlet_on_sphere(half, q) == 0.0);
  }

  const DirichletParams<double> params{(Eigen::VectorXd(4) << 0.7, 2.0, 3.5, 1.2).finished()};
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd q = standard_normal(4, rng).normalized();
    if (q.cwiseAbs().minCoeff() < 0.05) continue;
    const auto f = [&](const Eigen::VectorXd& y) { return log_density_dirichlet_on_sphere(params, y); };
    CHECK(relative_error(grad_dirichlet_on_sphere(params, q), finite_difference_gradient(f, q)) < 1e-6);
  }

  // Matches the Dirichlet density pulled back through x = q².
  const Eigen::VectorXd q = Eigen::Vector4d(0.3, -0.5, 0.6, 0.0).normalized() + Eigen::Vector4d(0, 0, 0, 0.2);
  const Eigen::VectorXd qn = q.normalized();
  const auto pt = sphere_to_simplex(qn);
  double dirichlet = 0.0;
  for (int i = 0; i < 4; ++i) dirichlet += (params.alpha(i) - 1.0) * std::log(pt.x(i));
  CHECK(log_density_dirichlet_on_sphere(params, qn) ==
        doctest::Approx(dirichlet + pt.log_correction - 4 * std::log(2.0)).epsilon(1e-12));

  const DirichletParams<double> small{Eigen::Vector3d(0.3, 1.0, 1.0)};
  CHECK(log_density_dirichlet_on_sphere(small, Eigen::Vector3d(0, 0.6, 0.8)) ==
        -std::numeric_limits<double>::infinity());
  CHECK_FALSE(grad_dirichlet_on_sphere(small, Eigen::Vector3d(0, 0.6, 0.8)).allFinite());
  CHECK_THROWS_AS(validate(DirichletParams<double>{Eigen::Vector3d(1.0, -1.0, 1.0)}), ParameterError);
}

TEST_CASE("targets project nothing and report dimensions") {
  const auto target = fisher_bingham_target(ManifoldSpec::sphere(2),
                                            {Eigen::Vector3d(1, 0, 0), Eigen::Matrix3d::Identity()});
  CHECK(target.log_density(Eigen::Vector3d(1, 0, 0)) == doctest::Approx(2.0));
  CHECK((target.gradient(Eigen::Vector3d(1, 0, 0)) - Eigen::Vector3d(3, 0, 0)).norm() < 1e-15);
  CHECK_THROWS_AS(fisher_bingham_target(ManifoldSpec::sphere(3), {Eigen::Vector3d::Zero(), Eigen::Matrix3d::Zero()}),
                  DimensionError);

  const auto stiefel = fisher_bingham_target(ManifoldSpec::stiefel(2, 3),
                                             {Eigen::VectorXd::Zero(6), Eigen::MatrixXd::Identity(6, 6)});
  Eigen::VectorXd frame = Eigen::VectorXd::Zero(6);
  frame(0) = 1.0;
  frame(4) = 1.0;
  CHECK(stiefel.log_density(frame) == doctest::Approx(2.0));

  const auto mf = matrix_fisher_target({Eigen::Matrix3d::Identity()});
  CHECK(mf.manifold == ManifoldSpec::so3());
  CHECK(mf.log_density(Eigen::Vector4d(1, 0, 0, 0)) == doctest::Approx(3.0));
}

TEST_CASE("ball lift target") {
  const auto lifted = lift_ball_target(uniform_ball_target(2));
  CHECK(lifted.manifold == ManifoldSpec::ball(2));
  CHECK(lifted.manifold.ambient_dim() == 3);
  const Eigen::Vector3d q = Eigen::Vector3d(0.3, 0.4, std::sqrt(0.75));
  CHECK(lifted.log_density(q) == doctest::Approx(std::log(std::sqrt(0.75))));
  const auto f = [&](const Eigen::VectorXd& y) { return lifted.log_density(y); };
  CHECK(relative_error(lifted.gradient(q), finite_difference_gradient(f, q)) < 1e-6);
  CHECK(lifted.log_density(Eigen::Vector3d(0.6, 0.8, 0.0)) == -std::numeric_limits<double>::infinity());
}

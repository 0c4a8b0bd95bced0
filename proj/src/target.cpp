#include "gmc/target.hpp"

#include "gmc/transforms.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace gmc {

Target uniform_target(const ManifoldSpec& m) {
  const int n = m.ambient_dim();
  return {m, [](const Eigen::VectorXd&) { return 0.0; },
          [n](const Eigen::VectorXd&) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(n); },
          "uniform"};
}

Target fisher_bingham_target(const ManifoldSpec& m, FisherBinghamParams<double> params) {
  validate(params);
  if (params.dim() != m.ambient_dim()) {
    throw DimensionError("fisher_bingham_target: parameters have dimension " +
                         std::to_string(params.dim()) + " but " + m.name() + " has ambient dimension " +
                         std::to_string(m.ambient_dim()));
  }
  auto shared = std::make_shared<const FisherBinghamParams<double>>(std::move(params));
  return {m, [shared](const Eigen::VectorXd& x) { return log_density_fb(*shared, x); },
          [shared](const Eigen::VectorXd& x) -> Eigen::VectorXd { return grad_fb(*shared, x); },
          "fisher_bingham"};
}

Target matrix_fisher_target(const MatrixFisherParams<double>& params) {
  FisherBinghamParams<double> fb{Eigen::VectorXd::Zero(4), matrix_fisher_to_bingham(params)};
  Target t = fisher_bingham_target(ManifoldSpec::so3(), std::move(fb));
  t.name = "matrix_fisher";
  return t;
}

Target dirichlet_target(DirichletParams<double> params) {
  validate(params);
  const auto m = ManifoldSpec::simplex(static_cast<int>(params.alpha.size()) - 1);
  auto shared = std::make_shared<const DirichletParams<double>>(std::move(params));
  return {m, [shared](const Eigen::VectorXd& q) { return log_density_dirichlet_on_sphere(*shared, q); },
          [shared](const Eigen::VectorXd& q) -> Eigen::VectorXd {
            return grad_dirichlet_on_sphere(*shared, q);
          },
          "dirichlet"};
}

BallTarget uniform_ball_target(int dim) {
  if (dim < 1) throw ParameterError("uniform_ball_target: dim must be >= 1");
  return {dim, [](const Eigen::VectorXd&) { return 0.0; },
          [dim](const Eigen::VectorXd&) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(dim); },
          "uniform"};
}

Target lift_ball_target(const BallTarget& ball) {
  const int d = ball.dim;
  auto log_density = [ball, d](const Eigen::VectorXd& q) {
    const double z = std::abs(q(d));
    if (z == 0.0) return -std::numeric_limits<double>::infinity();
    return ball.log_density(sphere_to_ball(q)) + std::log(z);
  };
  auto gradient = [ball, d](const Eigen::VectorXd& q) -> Eigen::VectorXd {
    Eigen::VectorXd g(d + 1);
    g.head(d) = ball.gradient(sphere_to_ball(q));
    g(d) = 1.0 / q(d);
    return g;
  };
  return {ManifoldSpec::ball(d), std::move(log_density), std::move(gradient), "ball_" + ball.name};
}

}  // namespace gmc

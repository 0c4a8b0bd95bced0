#pragma once

// A sampling target: a manifold plus an unnormalized log-density and its
// ambient gradient, both evaluated at ambient coordinates.

#include "gmc/densities.hpp"
#include "gmc/manifold.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>

namespace gmc {

struct Target {
  ManifoldSpec manifold;
  std::function<double(const Eigen::VectorXd&)> log_density;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::string name;
};

Target uniform_target(const ManifoldSpec& m);

/// c·x + xᵀAx on any sphere-like manifold, or on vec(Q) for Stiefel frames.
Target fisher_bingham_target(const ManifoldSpec& m, FisherBinghamParams<double> params);

/// Matrix Fisher on SO(3), sampled as Bingham on unit quaternions.
Target matrix_fisher_target(const MatrixFisherParams<double>& params);

/// Dirichlet(α) on the simplex, pulled back to S^D.
Target dirichlet_target(DirichletParams<double> params);

/// A density on the closed unit ball of R^D, in ball coordinates.
struct BallTarget {
  int dim = 1;
  std::function<double(const Eigen::VectorXd&)> log_density;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::string name;
};

BallTarget uniform_ball_target(int dim);

/// Lifts a ball density onto S^D: π_B(θ)·|q_{D+1}|, the factor converting the
/// ball volume element into the sphere area element of either hemisphere.
Target lift_ball_target(const BallTarget& ball);

}  // namespace gmc

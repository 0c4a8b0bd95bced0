#pragma once

// Changes of variable between constrained domains and spheres.

#include "gmc/manifold.hpp"

#include <cmath>
#include <limits>

namespace gmc {

/// Lifts θ in the closed unit ball of R^D to (θ, ±sqrt(1 - ‖θ‖²)) on S^D.
template <typename Derived>
Vec<typename Derived::Scalar> ball_to_sphere(const Eigen::MatrixBase<Derived>& theta, int hemisphere_sign) {
  using Scalar = typename Derived::Scalar;
  using std::sqrt;
  if (hemisphere_sign != 1 && hemisphere_sign != -1) {
    throw ParameterError("ball_to_sphere: hemisphere_sign must be +1 or -1");
  }
  const Scalar r2 = theta.squaredNorm();
  if (r2 > Scalar(1 + 1e-12) * Scalar(1 + 1e-12)) throw DomainError("ball_to_sphere: ‖θ‖ > 1");
  const Eigen::Index d = theta.size();
  Vec<Scalar> out(d + 1);
  out.head(d) = theta;
  out(d) = Scalar(hemisphere_sign) * sqrt(std::max(Scalar(0), Scalar(1) - r2));
  return out;
}

/// Drops the auxiliary last coordinate.
template <typename Derived>
Vec<typename Derived::Scalar> sphere_to_ball(const Eigen::MatrixBase<Derived>& q) {
  if (q.size() < 2) throw DimensionError("sphere_to_ball: need at least 2 coordinates");
  return q.head(q.size() - 1);
}

template <typename Scalar>
struct SimplexPoint {
  Vec<Scalar> x;
  /// Σ log|2 qᵢ|; -inf when some qᵢ = 0.
  Scalar log_correction;
};

/// xᵢ = qᵢ². A Dirichlet(α) density on the simplex pulls back to Π|qᵢ|^{2αᵢ-1} on the sphere.
template <typename Derived>
SimplexPoint<typename Derived::Scalar> sphere_to_simplex(const Eigen::MatrixBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  using std::log;
  SimplexPoint<Scalar> out;
  out.x = q.cwiseAbs2();
  out.x /= out.x.sum();
  out.log_correction = Scalar(0);
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    out.log_correction += q(i) == Scalar(0) ? -std::numeric_limits<Scalar>::infinity()
                                            : log(abs(Scalar(2) * q(i)));
  }
  return out;
}

/// Rotation of the unit quaternion (w, x, y, z), written as a homogeneous
/// quadratic so it is exact for unit input and linear in the outer product qqᵀ.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, 3> quaternion_to_rotation(const Eigen::MatrixBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  if (q.size() != 4) throw DimensionError("quaternion_to_rotation: need 4 coordinates");
  const Scalar w = q(0), x = q(1), y = q(2), z = q(3);
  Eigen::Matrix<Scalar, 3, 3> r;
  r << w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z;
  return r;
}

}  // namespace gmc

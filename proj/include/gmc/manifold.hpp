#pragma once

// Embedded manifolds stored in ambient coordinates.
//
// Sphere-like kinds (Sphere, SO3 as unit quaternions, SimplexViaSphere,
// BallViaSphere) keep q on the unit sphere of R^{D+1}. Stiefel points are
// p x k matrices with orthonormal columns, flattened column-major into a
// vector of length k*p. Tangent vectors use the same layout.

#include "gmc/errors.hpp"
#include "gmc/random.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace gmc {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

enum class ManifoldKind { Sphere, Stiefel, SO3, SimplexViaSphere, BallViaSphere, Barbell };

/// Tolerance on the constraint of a point handed to a geometric operation.
inline constexpr double kPointTolerance = 1e-8;

class ManifoldSpec {
 public:
  static ManifoldSpec sphere(int dim) { return ManifoldSpec(ManifoldKind::Sphere, dim, 1, dim + 1); }
  static ManifoldSpec stiefel(int k, int p) { return ManifoldSpec(ManifoldKind::Stiefel, 0, k, p); }
  static ManifoldSpec so3() { return ManifoldSpec(ManifoldKind::SO3, 3, 1, 4); }
  static ManifoldSpec simplex(int dim) {
    return ManifoldSpec(ManifoldKind::SimplexViaSphere, dim, 1, dim + 1);
  }
  static ManifoldSpec ball(int dim) { return ManifoldSpec(ManifoldKind::BallViaSphere, dim, 1, dim + 1); }
  /// Surface of revolution in R^3; has no geodesic flow, only baseline samplers use it.
  static ManifoldSpec barbell() { return ManifoldSpec(ManifoldKind::Barbell, 2, 1, 3); }

  ManifoldKind kind() const { return kind_; }

  /// Rows of the point matrix (p for Stiefel, ambient dimension otherwise).
  int rows() const { return rows_; }
  /// Columns of the point matrix (k for Stiefel, 1 otherwise).
  int cols() const { return cols_; }

  int ambient_dim() const { return rows_ * cols_; }

  int intrinsic_dim() const {
    if (kind_ == ManifoldKind::Stiefel) return cols_ * rows_ - cols_ * (cols_ + 1) / 2;
    return dim_;
  }

  bool sphere_like() const {
    return kind_ == ManifoldKind::Sphere || kind_ == ManifoldKind::SO3 ||
           kind_ == ManifoldKind::SimplexViaSphere || kind_ == ManifoldKind::BallViaSphere;
  }

  std::string name() const {
    switch (kind_) {
      case ManifoldKind::Sphere: return "sphere(" + std::to_string(dim_) + ")";
      case ManifoldKind::Stiefel:
        return "stiefel(" + std::to_string(cols_) + "," + std::to_string(rows_) + ")";
      case ManifoldKind::SO3: return "so3";
      case ManifoldKind::SimplexViaSphere: return "simplex(" + std::to_string(dim_) + ")";
      case ManifoldKind::BallViaSphere: return "ball(" + std::to_string(dim_) + ")";
      case ManifoldKind::Barbell: return "barbell";
    }
    return "unknown";
  }

  friend bool operator==(const ManifoldSpec&, const ManifoldSpec&) = default;

 private:
  ManifoldSpec(ManifoldKind kind, int dim, int cols, int rows)
      : kind_(kind), dim_(dim), cols_(cols), rows_(rows) {
    if (kind == ManifoldKind::Stiefel) {
      if (cols < 1 || rows < 1) throw ParameterError("stiefel: k and p must be >= 1");
      if (cols > rows) throw ParameterError("stiefel: k must not exceed p");
    } else if (dim < 1) {
      throw ParameterError("manifold dimension must be >= 1");
    }
  }

  ManifoldKind kind_;
  int dim_;
  int cols_;
  int rows_;
};

/// Position and tangent velocity in ambient coordinates.
template <typename Scalar>
struct PhaseState {
  Vec<Scalar> q;
  Vec<Scalar> v;
};

using PhaseStated = PhaseState<double>;

namespace detail {

inline void require_dims(const ManifoldSpec& m, Eigen::Index n, const char* what) {
  if (n != m.ambient_dim()) {
    throw DimensionError(std::string(what) + ": expected ambient length " +
                         std::to_string(m.ambient_dim()) + " for " + m.name() + ", got " +
                         std::to_string(n));
  }
}

[[noreturn]] inline void no_geometry(const ManifoldSpec& m, const char* op) {
  throw NotImplementedError(std::string(op) + " is not available on " + m.name());
}

template <typename Derived>
auto as_frame(const Eigen::MatrixBase<Derived>& x, const ManifoldSpec& m) {
  using Scalar = typename Derived::Scalar;
  return Eigen::Map<const Mat<Scalar>>(x.derived().data(), m.rows(), m.cols());
}

template <typename Scalar>
Mat<Scalar> sym(const Mat<Scalar>& a) {
  return (a + a.transpose()) / Scalar(2);
}

}  // namespace detail

/// Max-abs violation of the manifold constraint (|‖q‖-1| or ‖QᵀQ - I‖_max).
template <typename Derived>
typename Derived::Scalar constraint_error(const ManifoldSpec& m, const Eigen::MatrixBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  detail::require_dims(m, q.size(), "constraint_error");
  if (m.sphere_like()) {
    using std::abs;
    return abs(q.norm() - Scalar(1));
  }
  if (m.kind() == ManifoldKind::Stiefel) {
    Vec<Scalar> qv = q;
    auto frame = detail::as_frame(qv, m);
    Mat<Scalar> gram = frame.transpose() * frame;
    return (gram - Mat<Scalar>::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
  }
  detail::no_geometry(m, "constraint_error");
}

/// Max-abs violation of tangency (|q·v| or ‖sym(QᵀV)‖_max).
template <typename DerivedQ, typename DerivedV>
typename DerivedQ::Scalar tangency_error(const ManifoldSpec& m, const Eigen::MatrixBase<DerivedQ>& q,
                                         const Eigen::MatrixBase<DerivedV>& v) {
  using Scalar = typename DerivedQ::Scalar;
  detail::require_dims(m, q.size(), "tangency_error");
  detail::require_dims(m, v.size(), "tangency_error");
  if (m.sphere_like()) {
    using std::abs;
    return abs(q.dot(v));
  }
  if (m.kind() == ManifoldKind::Stiefel) {
    Vec<Scalar> qv = q, vv = v;
    Mat<Scalar> a = detail::as_frame(qv, m).transpose() * detail::as_frame(vv, m);
    return detail::sym(a).cwiseAbs().maxCoeff();
  }
  detail::no_geometry(m, "tangency_error");
}

template <typename Derived>
void require_on_manifold(const ManifoldSpec& m, const Eigen::MatrixBase<Derived>& q,
                         double tol = kPointTolerance) {
  const double err = static_cast<double>(constraint_error(m, q));
  if (!(err <= tol)) {
    throw InvalidPointError("point is off " + m.name() + " by " + std::to_string(err));
  }
}

/// Orthogonal projection (ambient Euclidean metric) of w onto the tangent space at q.
template <typename DerivedQ, typename DerivedW>
Vec<typename DerivedQ::Scalar> project_to_tangent(const ManifoldSpec& m,
                                                  const Eigen::MatrixBase<DerivedQ>& q,
                                                  const Eigen::MatrixBase<DerivedW>& w) {
  using Scalar = typename DerivedQ::Scalar;
  detail::require_dims(m, w.size(), "project_to_tangent");
  require_on_manifold(m, q);
  if (m.sphere_like()) {
    return w - q * q.dot(w);
  }
  if (m.kind() == ManifoldKind::Stiefel) {
    Vec<Scalar> qv = q, wv = w;
    auto frame = detail::as_frame(qv, m);
    auto dir = detail::as_frame(wv, m);
    Mat<Scalar> out = dir - frame * detail::sym<Scalar>(frame.transpose() * dir);
    return Eigen::Map<Vec<Scalar>>(out.data(), out.size());
  }
  detail::no_geometry(m, "project_to_tangent");
}

/// Nearest-constraint correction of a point: normalization, or thin QR with a
/// positive-diagonal R for Stiefel frames.
template <typename Derived>
Vec<typename Derived::Scalar> retract_point(const ManifoldSpec& m, const Eigen::MatrixBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  detail::require_dims(m, q.size(), "retract_point");
  if (m.sphere_like()) return q.normalized();
  if (m.kind() == ManifoldKind::Stiefel) {
    Vec<Scalar> qv = q;
    Mat<Scalar> frame = detail::as_frame(qv, m);
    Eigen::HouseholderQR<Mat<Scalar>> qr(frame);
    Mat<Scalar> thin = qr.householderQ() * Mat<Scalar>::Identity(m.rows(), m.cols());
    const Mat<Scalar> r = qr.matrixQR().topLeftCorner(m.cols(), m.cols());
    for (int j = 0; j < m.cols(); ++j) {
      if (r(j, j) < Scalar(0)) thin.col(j) = -thin.col(j);
    }
    return Eigen::Map<Vec<Scalar>>(thin.data(), thin.size());
  }
  detail::no_geometry(m, "retract_point");
}

/// Re-imposes both the point constraint and tangency on a phase state.
template <typename Scalar>
PhaseState<Scalar> retract(const ManifoldSpec& m, const PhaseState<Scalar>& s) {
  PhaseState<Scalar> out;
  out.q = retract_point(m, s.q);
  out.v = project_to_tangent(m, out.q, s.v);
  return out;
}

/// Standard ambient Gaussian projected onto the tangent space at q.
template <typename Derived>
Vec<typename Derived::Scalar> sample_tangent_gaussian(const ManifoldSpec& m,
                                                      const Eigen::MatrixBase<Derived>& q, Rng& rng) {
  using Scalar = typename Derived::Scalar;
  require_on_manifold(m, q);
  const Vec<Scalar> z = standard_normal<Scalar>(m.ambient_dim(), rng);
  return project_to_tangent(m, q, z);
}

/// Checks both PhaseState invariants; throws InvalidPointError on violation.
template <typename Scalar>
void require_valid_state(const ManifoldSpec& m, const PhaseState<Scalar>& s,
                         double tol = kPointTolerance) {
  require_on_manifold(m, s.q, tol);
  const double terr = static_cast<double>(tangency_error(m, s.q, s.v));
  if (!(terr <= tol)) {
    throw InvalidPointError("velocity is not tangent on " + m.name() + " (error " +
                            std::to_string(terr) + ")");
  }
}

}  // namespace gmc

#pragma once

// Closed-form geodesic flows under the metric induced by the ambient
// Euclidean inner product, plus an RK4 integrator of the geodesic ODE used
// to cross-check them.
//
// Sphere:  q(t) = q cos(at) + (v/a) sin(at),  v(t) = v cos(at) - a q sin(at),  a = ‖v‖.
// Stiefel: with A = QᵀV, S = VᵀV and M = [A -S; I A],
//          [Q(t) V(t)] = [Q V] exp(tM) diag(exp(-tA), exp(-tA)).

#include "gmc/manifold.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <vector>

namespace gmc {

/// Antipodal endpoints with a·b below -1 + this are rejected by the sphere log map.
inline constexpr double kAntipodalTolerance = 1e-9;

namespace detail {

template <typename Scalar>
PhaseState<Scalar> sphere_flow(const PhaseState<Scalar>& s, Scalar t) {
  using std::cos;
  using std::sin;
  const Scalar speed = s.v.norm();
  if (speed == Scalar(0)) return s;
  const Scalar c = cos(speed * t);
  const Scalar sn = sin(speed * t);
  PhaseState<Scalar> out;
  out.q = s.q * c + s.v * (sn / speed);
  out.v = s.v * c - s.q * (speed * sn);
  return out;
}

template <typename Scalar>
PhaseState<Scalar> stiefel_flow(const ManifoldSpec& m, const PhaseState<Scalar>& s, Scalar t) {
  const int k = m.cols();
  const int p = m.rows();
  if (s.v.isZero(Scalar(0))) return s;
  auto frame = as_frame(s.q, m);
  auto vel = as_frame(s.v, m);
  const Mat<Scalar> a = frame.transpose() * vel;
  const Mat<Scalar> gram = vel.transpose() * vel;

  Mat<Scalar> block(2 * k, 2 * k);
  block << a, -gram, Mat<Scalar>::Identity(k, k), a;
  const Mat<Scalar> e = (t * block).exp();
  const Mat<Scalar> rot = (-t * a).exp();

  Mat<Scalar> basis(p, 2 * k);
  basis << frame, vel;
  const Mat<Scalar> qt = basis * e.leftCols(k) * rot;
  const Mat<Scalar> vt = basis * e.rightCols(k) * rot;
  PhaseState<Scalar> out;
  out.q = Eigen::Map<const Vec<Scalar>>(qt.data(), qt.size());
  out.v = Eigen::Map<const Vec<Scalar>>(vt.data(), vt.size());
  return out;
}

}  // namespace detail

/// Exact geodesic flow without the final re-projection onto the constraint set.
template <typename Scalar>
PhaseState<Scalar> geodesic_flow_unprojected(const ManifoldSpec& m, const PhaseState<Scalar>& s,
                                             Scalar t) {
  detail::require_dims(m, s.q.size(), "geodesic_flow");
  detail::require_dims(m, s.v.size(), "geodesic_flow");
  if (m.sphere_like()) return detail::sphere_flow(s, t);
  if (m.kind() == ManifoldKind::Stiefel) return detail::stiefel_flow(m, s, t);
  detail::no_geometry(m, "geodesic_flow");
}

/// Follows the geodesic through s for time t, then re-projects onto the
/// constraint set so drift cannot accumulate over long chains.
template <typename Scalar>
PhaseState<Scalar> geodesic_flow(const ManifoldSpec& m, const PhaseState<Scalar>& s, Scalar t) {
  using std::isfinite;
  if (!isfinite(static_cast<double>(t))) throw DomainError("geodesic_flow: non-finite time");
  if (!m.sphere_like() && m.kind() != ManifoldKind::Stiefel) detail::no_geometry(m, "geodesic_flow");
  return retract(m, geodesic_flow_unprojected(m, s, t));
}

/// Fixed-step RK4 on q' = v, v' = -q‖v‖² (sphere) or V' = -Q VᵀV (Stiefel).
/// Reference integrator for validating the closed forms; no re-projection.
template <typename Scalar>
PhaseState<Scalar> integrate_geodesic_ode(const ManifoldSpec& m, const PhaseState<Scalar>& s, Scalar t,
                                          int n_steps) {
  if (n_steps < 1) throw ParameterError("integrate_geodesic_ode: n_steps must be >= 1");
  detail::require_dims(m, s.q.size(), "integrate_geodesic_ode");
  detail::require_dims(m, s.v.size(), "integrate_geodesic_ode");
  if (!m.sphere_like() && m.kind() != ManifoldKind::Stiefel) {
    detail::no_geometry(m, "integrate_geodesic_ode");
  }

  auto accel = [&m](const Vec<Scalar>& q, const Vec<Scalar>& v) -> Vec<Scalar> {
    if (m.sphere_like()) return -q * v.squaredNorm();
    auto frame = detail::as_frame(q, m);
    auto vel = detail::as_frame(v, m);
    const Mat<Scalar> out = -frame * (vel.transpose() * vel);
    return Eigen::Map<const Vec<Scalar>>(out.data(), out.size());
  };

  const Scalar h = t / Scalar(n_steps);
  Vec<Scalar> q = s.q;
  Vec<Scalar> v = s.v;
  for (int i = 0; i < n_steps; ++i) {
    const Vec<Scalar> k1q = v;
    const Vec<Scalar> k1v = accel(q, v);
    const Vec<Scalar> q2 = q + h / 2 * k1q, v2 = v + h / 2 * k1v;
    const Vec<Scalar> k2q = v2;
    const Vec<Scalar> k2v = accel(q2, v2);
    const Vec<Scalar> q3 = q + h / 2 * k2q, v3 = v + h / 2 * k2v;
    const Vec<Scalar> k3q = v3;
    const Vec<Scalar> k3v = accel(q3, v3);
    const Vec<Scalar> q4 = q + h * k3q, v4 = v + h * k3v;
    const Vec<Scalar> k4q = v4;
    const Vec<Scalar> k4v = accel(q4, v4);
    q += h / 6 * (k1q + 2 * k2q + 2 * k3q + k4q);
    v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }
  return {q, v};
}

/// A geodesic segment: the flow through `start` for times in [0, duration].
template <typename Scalar>
class GeodesicPath {
 public:
  GeodesicPath(ManifoldSpec manifold, PhaseState<Scalar> start, Scalar duration)
      : manifold_(manifold), start_(std::move(start)), duration_(duration) {
    require_valid_state(manifold_, start_);
  }

  const PhaseState<Scalar>& start() const { return start_; }
  Scalar duration() const { return duration_; }

  PhaseState<Scalar> at(Scalar t) const {
    if (t == Scalar(0)) return start_;
    return geodesic_flow(manifold_, start_, t);
  }

  /// n evenly spaced positions from time 0 to duration inclusive.
  std::vector<Vec<Scalar>> positions(int n) const {
    if (n < 2) throw ParameterError("GeodesicPath::positions: need at least 2 frames");
    std::vector<Vec<Scalar>> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(at(duration_ * Scalar(i) / Scalar(n - 1)).q);
    return out;
  }

 private:
  ManifoldSpec manifold_;
  PhaseState<Scalar> start_;
  Scalar duration_;
};

namespace detail {

template <typename Scalar>
Vec<Scalar> sphere_log(const Vec<Scalar>& a, const Vec<Scalar>& b) {
  using std::atan2;
  const Scalar c = a.dot(b);
  if (c < Scalar(-1 + kAntipodalTolerance)) {
    throw DegenerateGeodesicError("endpoints are antipodal; the minimizing great circle is not unique");
  }
  const Vec<Scalar> perp = b - a * c;
  const Scalar pn = perp.norm();
  if (pn == Scalar(0)) return Vec<Scalar>::Zero(a.size());
  const Scalar angle = atan2(pn, c);
  return perp * (angle / pn);
}

/// Orthonormal basis (columns) of the tangent space at q.
template <typename Scalar>
Mat<Scalar> tangent_basis(const ManifoldSpec& m, const Vec<Scalar>& q) {
  const int n = m.ambient_dim();
  Mat<Scalar> proj(n, n);
  for (int i = 0; i < n; ++i) proj.col(i) = project_to_tangent(m, q, Vec<Scalar>::Unit(n, i));
  Eigen::JacobiSVD<Mat<Scalar>> svd(proj, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(m.intrinsic_dim());
}

/// Solves exp_a(B xi) = target for xi by damped Gauss-Newton with a
/// central-difference Jacobian. Returns false when it stalls.
template <typename Scalar>
bool shoot(const ManifoldSpec& m, const Vec<Scalar>& a, const Mat<Scalar>& basis,
           const Vec<Scalar>& target, Vec<Scalar>& xi) {
  const int d = static_cast<int>(basis.cols());
  auto endpoint = [&](const Vec<Scalar>& x) {
    return geodesic_flow_unprojected<Scalar>(m, {a, basis * x}, Scalar(1)).q;
  };
  Vec<Scalar> resid = endpoint(xi) - target;
  Scalar rnorm = resid.norm();
  const Scalar h = Scalar(1e-6);
  for (int iter = 0; iter < 100 && rnorm > Scalar(1e-13); ++iter) {
    Mat<Scalar> jac(target.size(), d);
    for (int j = 0; j < d; ++j) {
      Vec<Scalar> xp = xi, xm = xi;
      xp(j) += h;
      xm(j) -= h;
      jac.col(j) = (endpoint(xp) - endpoint(xm)) / (2 * h);
    }
    const Vec<Scalar> step = jac.colPivHouseholderQr().solve(-resid);
    if (!step.allFinite()) return false;
    Scalar scale(1);
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls) {
      const Vec<Scalar> trial = xi + scale * step;
      const Vec<Scalar> r = endpoint(trial) - target;
      if (r.norm() < rnorm) {
        xi = trial;
        resid = r;
        rnorm = r.norm();
        improved = true;
        break;
      }
      scale /= 2;
    }
    if (!improved) break;
  }
  return rnorm <= Scalar(1e-10);
}

template <typename Scalar>
Vec<Scalar> stiefel_log(const ManifoldSpec& m, const Vec<Scalar>& a, const Vec<Scalar>& b) {
  if ((a - b).cwiseAbs().maxCoeff() == Scalar(0)) return Vec<Scalar>::Zero(a.size());
  const Mat<Scalar> basis = tangent_basis(m, a);
  Vec<Scalar> xi = basis.transpose() * (b - a);
  if (shoot(m, a, basis, b, xi)) return basis * xi;

  // Continuation along the QR-retracted chord from a to b, warm-starting each stage.
  xi.setZero();
  constexpr int kStages = 16;
  for (int stage = 1; stage <= kStages; ++stage) {
    const Scalar s = Scalar(stage) / Scalar(kStages);
    const Vec<Scalar> chord = a + s * (b - a);
    auto frame = as_frame(chord, m);
    const Mat<Scalar> chord_frame = frame;
    Eigen::JacobiSVD<Mat<Scalar>> svd(chord_frame);
    if (svd.singularValues().minCoeff() < Scalar(1e-8)) {
      throw DegenerateGeodesicError("stiefel log: chord between frames loses rank");
    }
    const Vec<Scalar> waypoint = stage == kStages ? b : retract_point(m, chord);
    if (!shoot(m, a, basis, waypoint, xi)) {
      throw DegenerateGeodesicError("stiefel log: shooting did not converge");
    }
  }
  return basis * xi;
}

}  // namespace detail

/// Initial velocity of the geodesic from a reaching b at time 1.
template <typename DerivedA, typename DerivedB>
Vec<typename DerivedA::Scalar> log_map(const ManifoldSpec& m, const Eigen::MatrixBase<DerivedA>& a,
                                       const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  require_on_manifold(m, a);
  require_on_manifold(m, b);
  const Vec<Scalar> av = a, bv = b;
  if (m.sphere_like()) return detail::sphere_log(av, bv);
  if (m.kind() == ManifoldKind::Stiefel) return detail::stiefel_log(m, av, bv);
  detail::no_geometry(m, "log_map");
}

/// Geodesic distance under the embedded metric.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar geodesic_distance(const ManifoldSpec& m, const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedB>& b) {
  return log_map(m, a, b).norm();
}

/// n_frames points on the geodesic from a to b, both endpoints included verbatim.
template <typename DerivedA, typename DerivedB>
std::vector<Vec<typename DerivedA::Scalar>> geodesic_interpolate(const ManifoldSpec& m,
                                                                 const Eigen::MatrixBase<DerivedA>& a,
                                                                 const Eigen::MatrixBase<DerivedB>& b,
                                                                 int n_frames) {
  using Scalar = typename DerivedA::Scalar;
  if (n_frames < 2) throw ParameterError("geodesic_interpolate: n_frames must be >= 2");
  const Vec<Scalar> av = a, bv = b;
  const GeodesicPath<Scalar> path(m, {av, log_map(m, av, bv)}, Scalar(1));
  std::vector<Vec<Scalar>> frames = path.positions(n_frames);
  frames.front() = av;
  frames.back() = bv;
  return frames;
}

}  // namespace gmc
